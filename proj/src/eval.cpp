#include "llp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "llp/errors.hpp"

namespace llp {

double auc(const std::vector<double>& scores,
           const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw InputError("auc: scores/labels size mismatch");
  }
  const std::size_t n = scores.size();
  long n_pos = std::count(labels.begin(), labels.end(), 1);
  long n_neg = static_cast<long>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw InputError("auc: needs both classes present");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return scores[i] < scores[j];
  });

  // Mid-ranks over tie runs give half credit per tied pair.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (std::size_t t = i; t < j; ++t) {
      if (labels[order[t]] == 1) rank_sum_pos += mid_rank;
    }
    i = j;
  }
  const double u = rank_sum_pos -
                   0.5 * static_cast<double>(n_pos) *
                       static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

SparsitySummary sparsity_summary(
    const std::vector<PosteriorSample>& samples) {
  if (samples.empty()) throw InputError("sparsity_summary: no samples");
  std::vector<int> ks;
  ks.reserve(samples.size());
  double sum = 0.0;
  for (const PosteriorSample& s : samples) {
    ks.push_back(static_cast<int>(s.active.size()));
    sum += static_cast<double>(s.active.size());
  }
  std::sort(ks.begin(), ks.end());
  auto nearest_rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::min<double>(
        std::max(0.0, std::ceil(q * static_cast<double>(ks.size())) - 1.0),
        static_cast<double>(ks.size() - 1)));
    return ks[idx];
  };
  return SparsitySummary{sum / static_cast<double>(ks.size()),
                         nearest_rank(0.05), nearest_rank(0.50),
                         nearest_rank(0.95)};
}

std::vector<double> training_scores(
    const std::vector<PosteriorSample>& samples, const GramCache& gram) {
  if (samples.empty()) throw InputError("training_scores: no samples");
  const int n = gram.n();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
  for (const PosteriorSample& s : samples) {
    if (s.active.empty()) {
      acc.array() += 0.5;
      continue;
    }
    const Eigen::VectorXd f = gram.g.psi(Eigen::all, s.active) * s.beta;
    for (int i = 0; i < n; ++i) acc[i] += std_normal_cdf(f[i]);
  }
  acc /= static_cast<double>(samples.size());
  return {acc.data(), acc.data() + n};
}

namespace {

EvalReport eval_on_training(const Dataset& data, const Hyperparams& hyper,
                            const ChainConfig& config) {
  const auto [samples, report] = run_chain(data, hyper, config);
  const GramCache gram(data.X, hyper.kernel);
  EvalReport out;
  out.auc = auc(training_scores(samples, gram), *data.true_labels);
  out.n_pos = static_cast<int>(std::count(data.true_labels->begin(),
                                          data.true_labels->end(), 1));
  out.n_neg = data.n() - out.n_pos;
  out.mean_active_kernels = sparsity_summary(samples).mean;
  return out;
}

}  // namespace

AblationResult ablation_compare(const Dataset& data,
                                const Hyperparams& hyper,
                                const ChainConfig& config) {
  if (!data.true_labels) {
    throw InputError("ablation_compare: dataset has no true labels");
  }
  AblationResult out;
  out.full = eval_on_training(data, hyper, config);

  Dataset impoverished = data;
  for (Group& g : impoverished.groups) {
    double lambda = 0.0;
    for (int i : g.members) {
      lambda += (*data.true_labels)[static_cast<std::size_t>(i)];
    }
    lambda /= static_cast<double>(g.members.size());
    if (lambda == 0.0) {
      g.m = 0.0;  // stays on the hard all-negative path
    } else if (g.m != 1.0 && g.m != 0.0) {
      g.chi = 0.0;  // fraction carries no information
    }
  }
  out.ablated = eval_on_training(impoverished, hyper, config);
  return out;
}

double ks_statistic(std::vector<double> draws,
                    const std::function<double(double)>& cdf) {
  if (draws.empty()) throw InputError("ks_statistic: no draws");
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double d = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double c = cdf(draws[i]);
    d = std::max(d, std::abs(c - static_cast<double>(i) / n));
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - c));
  }
  return d;
}

double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term =
        2.0 * std::pow(-1.0, k - 1) * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-12) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

double inverse_gamma_cdf(double x, double shape, double scale) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_q(shape, scale / x);
}

PriorRecoveryResult prior_recovery_test(const Dataset& data,
                                        const Hyperparams& hyper,
                                        const ChainConfig& config) {
  if (hyper.chi != 0.0) {
    throw InputError("prior_recovery_test: global chi must be 0");
  }
  for (const Group& g : data.groups) {
    if (g.chi && *g.chi != 0.0) {
      throw InputError("prior_recovery_test: per-group chi must be 0");
    }
    if (g.m == 0.0 || g.m == 1.0) {
      throw InputError("prior_recovery_test: hard groups not allowed");
    }
  }

  const auto [samples, report] = run_chain(data, hyper, config);
  const int n = data.n();

  // Analytic marginal over K from the selection prior.
  std::vector<double> pk(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) {
    pk[static_cast<std::size_t>(k)] =
        std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                 std::lgamma(n - k + 1.0) +
                 log_gamma_prior(k, n, hyper.a, hyper.b));
  }
  std::vector<double> hist(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k : report.active_kernel_trace) {
    hist[static_cast<std::size_t>(k)] += 1.0;
  }
  PriorRecoveryResult out;
  for (int k = 0; k <= n; ++k) {
    out.tv_k += 0.5 * std::abs(hist[static_cast<std::size_t>(k)] /
                                   static_cast<double>(
                                       report.active_kernel_trace.size()) -
                               pk[static_cast<std::size_t>(k)]);
  }

  out.ks_stat = ks_statistic(report.delta2_trace, [&](double x) {
    return inverse_gamma_cdf(x, 0.5 * hyper.mu, 0.5 * hyper.nu);
  });
  out.ks_p = ks_pvalue(out.ks_stat, report.delta2_trace.size());
  return out;
}

}  // namespace llp
