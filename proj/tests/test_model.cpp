#include <doctest.h>

#include <cmath>

#include "llp/errors.hpp"
#include "llp/model.hpp"
#include "llp/rng.hpp"
#include "test_util.hpp"

using namespace llp;

TEST_CASE("latent_f sums over active kernels only") {
  Rng rng(2);
  const auto x = llp_test::random_points(2, 5, rng);
  KernelSpec spec;

  PosteriorSample empty;
  CHECK(latent_f(x.col(0), empty, x, spec) == 0.0);

  PosteriorSample self;
  self.active = {1};
  self.beta = Eigen::VectorXd::Constant(1, 2.0);
  CHECK(latent_f(x.col(1), self, x, spec) == doctest::Approx(2.0));
  CHECK(prob_positive(x.col(1), self, x, spec) ==
        doctest::Approx(std_normal_cdf(2.0)));

  PosteriorSample s3;
  s3.active = {0, 2, 4};
  s3.beta = Eigen::VectorXd(3);
  s3.beta << 0.3, -1.1, 0.8;
  Eigen::VectorXd q(2);
  q << 0.25, -0.4;
  double expect = 0.0;
  for (int t = 0; t < 3; ++t) {
    expect += s3.beta[t] * kernel_eval(spec, q, x.col(s3.active[t]));
  }
  CHECK(latent_f(q, s3, x, spec) == doctest::Approx(expect));
}

TEST_CASE("prob_positive basics") {
  Rng rng(3);
  const auto x = llp_test::random_points(2, 3, rng);
  KernelSpec spec;
  PosteriorSample empty;
  CHECK(prob_positive(x.col(0), empty, x, spec) == doctest::Approx(0.5));

  // Monotone in beta when the kernel response is positive.
  PosteriorSample s;
  s.active = {0};
  s.beta = Eigen::VectorXd::Constant(1, 0.4);
  const double p1 = prob_positive(x.col(1), s, x, spec);
  s.beta[0] = 1.4;
  CHECK(prob_positive(x.col(1), s, x, spec) > p1);
}

TEST_CASE("lambda_of counts strictly positive entries") {
  Eigen::VectorXd z(4);
  z << 0.5, -1.0, 2.0, -0.1;
  CHECK(lambda_of(z) == doctest::Approx(0.5));

  Eigen::VectorXd neg(3);
  neg << -1.0, -2.0, -0.5;
  CHECK(lambda_of(neg) == 0.0);

  Eigen::VectorXd border(2);
  border << 0.0, 1.0;  // exact zero counts as negative
  CHECK(lambda_of(border) == doctest::Approx(0.5));
}

TEST_CASE("log_m_likelihood: flat at chi=0, mode at lambda=m, normalized") {
  for (double m : {0.1, 0.5, 0.9}) {
    for (double lam : {0.0, 0.3, 1.0}) {
      CHECK(log_m_likelihood(m, lam, 0.0) == doctest::Approx(0.0));
    }
  }

  // Grid search over lambda puts the mode at the observed fraction.
  for (double m : {0.2, 0.5, 0.8}) {
    double best_lam = -1.0, best = -1e300;
    for (int t = 0; t <= 1000; ++t) {
      const double lam = t / 1000.0;
      const double ll = log_m_likelihood(m, lam, 200.0);
      if (ll > best) {
        best = ll;
        best_lam = lam;
      }
    }
    CHECK(std::abs(best_lam - m) < 0.02);
  }

  // A proper density in m for fixed lambda.
  for (double lam : {0.0, 0.37, 1.0}) {
    double integral = 0.0;
    const int steps = 20000;
    for (int t = 0; t < steps; ++t) {
      const double m = (t + 0.5) / steps;
      integral += std::exp(log_m_likelihood(m, lam, 7.0)) / steps;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
  }

  // At fixed lambda the normalizer cancels in ratios.
  const double lhs = log_m_likelihood(0.3, 0.6, 4.0) -
                     log_m_likelihood(0.7, 0.6, 4.0);
  const double rhs = 4.0 * (0.6 * (std::log(0.3) - std::log(0.7)) +
                            0.4 * (std::log(0.7) - std::log(0.3)));
  CHECK(lhs == doctest::Approx(rhs));

  // Concave in lambda.
  for (double m : {0.25, 0.6}) {
    double prev = log_m_likelihood(m, 0.0, 9.0);
    double prev_diff = 1e300;
    for (int t = 1; t <= 20; ++t) {
      const double cur = log_m_likelihood(m, t / 20.0, 9.0);
      const double diff = cur - prev;
      CHECK(diff <= prev_diff + 1e-9);
      prev_diff = diff;
      prev = cur;
    }
  }

  CHECK_THROWS_AS(log_m_likelihood(0.0, 0.5, 1.0), InputError);
  CHECK_THROWS_AS(log_m_likelihood(1.0, 0.5, 1.0), InputError);
}

TEST_CASE("log_gamma_prior: closed form and normalization") {
  CHECK(log_gamma_prior(1, 3, 1.0, 1.0) ==
        doctest::Approx(std::log(1.0 / 12.0)));

  for (auto [a, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}}) {
    const int n = 12;
    double total = 0.0;
    for (int k = 0; k <= n; ++k) {
      // multiplicity C(n, k) per value of k
      const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                               std::lgamma(n - k + 1.0);
      total += std::exp(log_binom + log_gamma_prior(k, n, a, b));
    }
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("log_gamma_conditional matches the beta-marginalized density") {
  Rng rng(21);
  const int n = 8;
  const auto x = llp_test::random_points(2, n, rng);
  KernelSpec spec{KernelKind::gaussian, 0.8, 1.0, 0.0};
  const auto psi = gram(x, spec);
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = 1.5 * rng.normal();
  const double delta2 = 1.7;
  const double a = 1.0, b = 1.0;

  // Marginal of Z with beta integrated out: N(0, I + delta2 * P_gamma).
  auto marginal_logpdf = [&](const std::vector<int>& active) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(n, n);
    if (!active.empty()) {
      const Eigen::MatrixXd cols = psi.psi(Eigen::all, active);
      cov += delta2 * cols * (cols.transpose() * cols).inverse() *
             cols.transpose();
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    const double logdet =
        2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    return -0.5 * logdet - 0.5 * z.dot(llt.solve(z));
  };

  auto random_subset = [&](std::size_t max_k) {
    std::vector<int> s;
    for (int i = 0; i < n; ++i) {
      if (rng.uniform() < static_cast<double>(max_k) / n) s.push_back(i);
    }
    return s;
  };

  for (int rep = 0; rep < 30; ++rep) {
    const auto g1 = random_subset(4);
    const auto g2 = random_subset(4);
    const auto lp1 = log_gamma_conditional(g1, delta2, z, psi, a, b);
    const auto lp2 = log_gamma_conditional(g2, delta2, z, psi, a, b);
    REQUIRE(lp1.has_value());
    REQUIRE(lp2.has_value());
    // Prior factors and the dropped Z^T Z constant cancel in the ratio.
    const double lhs = (*lp1 - log_gamma_prior(static_cast<int>(g1.size()),
                                               n, a, b)) -
                       (*lp2 - log_gamma_prior(static_cast<int>(g2.size()),
                                               n, a, b));
    const double rhs = marginal_logpdf(g1) - marginal_logpdf(g2);
    // Tolerance allows for the solver's trace-scaled stabilizing ridge.
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
  }

  const auto empty = log_gamma_conditional({}, delta2, z, psi, a, b);
  CHECK(*empty == doctest::Approx(log_gamma_prior(0, n, a, b)));
}

TEST_CASE("duplicate kernel column leaves the projection unchanged") {
  Rng rng(31);
  auto x = llp_test::random_points(2, 5, rng);
  x.col(4) = x.col(1);  // exact duplicate training point
  KernelSpec spec;
  const auto psi = gram(x, spec);
  Eigen::VectorXd z(5);
  for (int i = 0; i < 5; ++i) z[i] = rng.normal();

  const auto base = restricted_solve(psi, {0, 1}, z);
  const auto dup = restricted_solve(psi, {0, 1, 4}, z);
  REQUIRE(base.has_value());
  REQUIRE(dup.has_value());
  CHECK(std::abs(base->quad - dup->quad) < 1e-6);
}

TEST_CASE("dataset and hyperparameter validation") {
  Rng rng(1);
  auto data = llp_test::toy_soft_dataset(6, 3, rng);
  CHECK_NOTHROW(data.validate());

  auto bad = data;
  bad.groups[0].m = 1.2;
  CHECK_THROWS_AS(bad.validate(), InputError);

  auto orphan = data;
  orphan.groups[1].members.pop_back();
  CHECK_THROWS_AS(orphan.validate(), InputError);

  Hyperparams h;
  CHECK_NOTHROW(h.validate());
  h.a = 0.5;
  CHECK_THROWS_AS(h.validate(), InputError);
  h = Hyperparams{};
  h.chi = -1.0;
  CHECK_THROWS_AS(h.validate(), InputError);
}
