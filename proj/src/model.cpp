#include "llp/model.hpp"

#include <cmath>

#include "llp/errors.hpp"

namespace llp {

void Dataset::validate() const {
  const int N = n();
  if (N < 1) throw InputError("Dataset: no instances");
  if (static_cast<int>(group_of.size()) != N) {
    throw InputError("Dataset: group_of length mismatch");
  }
  if (groups.empty()) throw InputError("Dataset: no groups");
  std::vector<int> seen(static_cast<std::size_t>(N), 0);
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const Group& g = groups[j];
    if (g.members.empty()) throw InputError("Dataset: empty group");
    if (!(g.m >= 0.0 && g.m <= 1.0)) {
      throw InputError("Dataset: group fraction m outside [0,1]");
    }
    if (g.chi && !(*g.chi >= 0.0)) {
      throw InputError("Dataset: negative group confidence");
    }
    for (int i : g.members) {
      if (i < 0 || i >= N) throw InputError("Dataset: member index out of range");
      if (seen[static_cast<std::size_t>(i)]++) {
        throw InputError("Dataset: instance in more than one group");
      }
      if (group_of[static_cast<std::size_t>(i)] != static_cast<int>(j)) {
        throw InputError("Dataset: group_of inconsistent with membership");
      }
    }
  }
  for (int c : seen) {
    if (c != 1) throw InputError("Dataset: instance not covered by any group");
  }
  if (true_labels && static_cast<int>(true_labels->size()) != N) {
    throw InputError("Dataset: label length mismatch");
  }
}

void Hyperparams::validate() const {
  kernel.validate();
  if (!(a >= 1.0) || !(b >= 1.0)) throw InputError("Hyperparams: a, b must be >= 1");
  if (!(mu > 0.0) || !(nu > 0.0)) throw InputError("Hyperparams: mu, nu must be positive");
  if (!(chi >= 0.0)) throw InputError("Hyperparams: chi must be non-negative");
}

void ModelState::rebuild_active() {
  active.clear();
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    if (gamma[i]) active.push_back(static_cast<int>(i));
  }
}

double latent_f(const Eigen::VectorXd& x, const PosteriorSample& sample,
                const Eigen::MatrixXd& training_x, const KernelSpec& spec) {
  double f = 0.0;
  for (std::size_t t = 0; t < sample.active.size(); ++t) {
    f += sample.beta[static_cast<Eigen::Index>(t)] *
         kernel_eval(spec, x, training_x.col(sample.active[t]));
  }
  return f;
}

double prob_positive(const Eigen::VectorXd& x, const PosteriorSample& sample,
                     const Eigen::MatrixXd& training_x,
                     const KernelSpec& spec) {
  return std_normal_cdf(latent_f(x, sample, training_x, spec));
}

double lambda_of(const Eigen::VectorXd& z_group) {
  if (z_group.size() == 0) throw InputError("lambda_of: empty group");
  return static_cast<double>((z_group.array() > 0.0).count()) /
         static_cast<double>(z_group.size());
}

double log_m_likelihood(double m, double lambda, double chi) {
  if (!(m > 0.0 && m < 1.0)) {
    throw InputError("log_m_likelihood: m must lie strictly in (0,1)");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0) || !(chi >= 0.0)) {
    throw InputError("log_m_likelihood: bad lambda or chi");
  }
  const double a1 = chi * lambda + 1.0;
  const double a2 = chi * (1.0 - lambda) + 1.0;
  return chi * (lambda * std::log(m) + (1.0 - lambda) * std::log1p(-m)) -
         log_beta_fn(a1, a2);
}

double log_gamma_prior(int k, int n, double a, double b) {
  if (k < 0 || k > n) throw InputError("log_gamma_prior: k out of range");
  return std::lgamma(k + a) + std::lgamma(n - k + b) -
         std::lgamma(n + a + b) + std::lgamma(a + b) - std::lgamma(a) -
         std::lgamma(b);
}

std::optional<double> log_gamma_conditional_core(const Eigen::MatrixXd& a_sub,
                                                 const Eigen::VectorXd& u,
                                                 int n, double delta2,
                                                 double a, double b) {
  const int k = static_cast<int>(u.size());
  if (k == 0) return log_gamma_prior(0, n, a, b);
  const auto solve = solve_normal_system(a_sub, u);
  if (!solve) return std::nullopt;
  const double shrink = delta2 / (1.0 + delta2);
  return -0.5 * k * std::log1p(delta2) + 0.5 * shrink * solve->quad +
         log_gamma_prior(k, n, a, b);
}

std::optional<double> log_gamma_conditional(
    const std::vector<int>& active, double delta2, const Eigen::VectorXd& z,
    const GramMatrix& psi, double a, double b) {
  const int n = psi.n();
  if (active.empty()) return log_gamma_prior(0, n, a, b);
  const Eigen::MatrixXd cols = psi.psi(Eigen::all, active);
  return log_gamma_conditional_core(cols.transpose() * cols,
                                    cols.transpose() * z, n, delta2, a, b);
}

}  // namespace llp
