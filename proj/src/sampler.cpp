#include "llp/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "llp/errors.hpp"

namespace llp {

void ChainConfig::validate() const {
  if (burn_in < 0) throw InputError("ChainConfig: burn_in must be >= 0");
  if (n_samples < 0) throw InputError("ChainConfig: n_samples must be >= 0");
  if (thin < 1) throw InputError("ChainConfig: thin must be >= 1");
  if (gamma_sweeps_per_iter < 1) {
    throw InputError("ChainConfig: gamma_sweeps_per_iter must be >= 1");
  }
  if (z_steps_per_iter < 1) {
    throw InputError("ChainConfig: z_steps_per_iter must be >= 1");
  }
}

double z_proposal_stddev(int group_size) {
  return 2.4 / std::sqrt(static_cast<double>(group_size));
}

ModelState init_state(const Dataset& data, const Hyperparams& hyper,
                      Rng& rng) {
  const int n = data.n();
  ModelState state;
  state.gamma.assign(static_cast<std::size_t>(n), 0);

  // Each component active with the prior mean inclusion rate a/(a+b),
  // capped so the initial active set stays small on large problems; one
  // resample if the draw comes up empty. Starting with hundreds of
  // active kernels is both slow (each flip proposal factors a KxK system)
  // and risky: a small initial delta^2 then shrinks beta so hard that the
  // fit term keeps delta^2 pinned near zero for hundreds of sweeps, a
  // metastable state the chain escapes only by a rare fluctuation.
  const double p_active = std::min(hyper.a / (hyper.a + hyper.b),
                                   20.0 / static_cast<double>(n));
  for (int attempt = 0; attempt < 2; ++attempt) {
    for (auto& gi : state.gamma) {
      gi = rng.uniform() < p_active ? 1 : 0;
    }
    if (std::accumulate(state.gamma.begin(), state.gamma.end(), 0) > 0) break;
  }
  state.rebuild_active();
  state.beta = Eigen::VectorXd::Zero(state.k());

  state.delta2 = rng.inverse_gamma(0.5 * hyper.mu, 0.5 * hyper.nu);

  // Start each group's Z so that lambda_j is the smallest attainable
  // fraction >= m_j: ceil(m_j * n_gj) members get positive draws.
  state.z.resize(n);
  for (const Group& g : data.groups) {
    const int ng = static_cast<int>(g.members.size());
    const int n_pos = static_cast<int>(
        std::ceil(g.m * static_cast<double>(ng) - 1e-12));
    std::vector<int> order = g.members;
    rng.shuffle(order);
    for (int t = 0; t < ng; ++t) {
      state.z[order[static_cast<std::size_t>(t)]] =
          rng.truncated_normal(0.0, t < n_pos);
    }
  }
  return state;
}

std::pair<long, long> sample_gamma(ModelState& state, const GramCache& gram,
                                   const Hyperparams& hyper, Rng& rng) {
  const int n = gram.n();
  const Eigen::VectorXd v = gram.g.psi.transpose() * state.z;

  auto log_target = [&](const std::vector<int>& active) {
    if (active.empty()) {
      return std::optional<double>(log_gamma_prior(0, n, hyper.a, hyper.b));
    }
    return log_gamma_conditional_core(
        gram.psi_t_psi(active, active), v(active), n, state.delta2, hyper.a,
        hyper.b);
  };

  double lp = log_target(state.active)
                  .value_or(-std::numeric_limits<double>::infinity());

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  long accepted = 0;
  for (int i : order) {
    std::vector<int> proposed = state.active;
    if (state.gamma[static_cast<std::size_t>(i)]) {
      proposed.erase(std::lower_bound(proposed.begin(), proposed.end(), i));
    } else {
      proposed.insert(std::lower_bound(proposed.begin(), proposed.end(), i),
                      i);
    }
    const auto lp_new = log_target(proposed);
    if (!lp_new) continue;  // singular system: reject outright
    const double diff = *lp_new - lp;
    if (diff >= 0.0 || std::log(rng.uniform()) < diff) {
      state.gamma[static_cast<std::size_t>(i)] ^= 1;
      state.active = std::move(proposed);
      lp = *lp_new;
      ++accepted;
    }
  }
  return {accepted, static_cast<long>(n)};
}

std::optional<Eigen::VectorXd> sample_beta(const std::vector<int>& active,
                                           double delta2,
                                           const Eigen::VectorXd& z,
                                           const GramCache& gram, Rng& rng) {
  if (active.empty()) return Eigen::VectorXd(0);
  const auto solve = solve_normal_system(
      gram.psi_t_psi(active, active),
      Eigen::VectorXd(gram.g.psi(Eigen::all, active).transpose() * z));
  if (!solve) return std::nullopt;

  const double shrink = delta2 / (1.0 + delta2);
  Eigen::VectorXd eps(static_cast<Eigen::Index>(active.size()));
  for (Eigen::Index t = 0; t < eps.size(); ++t) eps[t] = rng.normal();
  // A = L L^T, so U^{-1} eps has covariance A^{-1}.
  return (shrink * solve->mean_core +
          std::sqrt(shrink) * solve->chol.matrixU().solve(eps))
      .eval();
}

double sample_delta2(const Eigen::VectorXd& beta,
                     const std::vector<int>& active, const GramCache& gram,
                     const Hyperparams& hyper, Rng& rng) {
  const int k = static_cast<int>(active.size());
  double fit = 0.0;
  if (k > 0) {
    fit = (gram.g.psi(Eigen::all, active) * beta).squaredNorm();
  }
  const double extra =
      hyper.delta2_shape_rule == Delta2ShapeRule::paper ? 1.0 : 0.0;
  return rng.inverse_gamma(0.5 * (hyper.mu + k + extra),
                           0.5 * (hyper.nu + fit));
}

namespace {

double z_block_log_target(const Eigen::VectorXd& zg,
                          const Eigen::VectorXd& fg, const Group& g,
                          double chi) {
  return -0.5 * (zg - fg).squaredNorm() +
         log_m_likelihood(g.m, lambda_of(zg), chi);
}

}  // namespace

bool sample_z_group(int group_index, ModelState& state,
                    const Eigen::VectorXd& latent_mean, const Dataset& data,
                    const Hyperparams& hyper, Rng& rng) {
  const Group& g = data.groups[static_cast<std::size_t>(group_index)];
  const int ng = static_cast<int>(g.members.size());
  const double chi = hyper.chi_for(g);
  const double c = z_proposal_stddev(ng);

  Eigen::VectorXd zg(ng), fg(ng);
  for (int t = 0; t < ng; ++t) {
    zg[t] = state.z[g.members[static_cast<std::size_t>(t)]];
    fg[t] = latent_mean[g.members[static_cast<std::size_t>(t)]];
  }
  Eigen::VectorXd proposal(ng);
  for (int t = 0; t < ng; ++t) proposal[t] = zg[t] + c * rng.normal();

  const double diff = z_block_log_target(proposal, fg, g, chi) -
                      z_block_log_target(zg, fg, g, chi);
  if (diff >= 0.0 || std::log(rng.uniform()) < diff) {
    for (int t = 0; t < ng; ++t) {
      state.z[g.members[static_cast<std::size_t>(t)]] = proposal[t];
    }
    return true;
  }
  return false;
}

void sample_z_group_hard(int group_index, ModelState& state,
                         const Eigen::VectorXd& latent_mean,
                         const Dataset& data, Rng& rng) {
  const Group& g = data.groups[static_cast<std::size_t>(group_index)];
  const bool positive = g.m == 1.0;
  for (int i : g.members) {
    state.z[i] = rng.truncated_normal(latent_mean[i], positive);
  }
}

std::pair<std::vector<PosteriorSample>, ChainReport> run_chain(
    const Dataset& data, const Hyperparams& hyper,
    const ChainConfig& config) {
  data.validate();
  hyper.validate();
  config.validate();

  const auto t_start = std::chrono::steady_clock::now();
  Rng rng(config.seed);
  const GramCache gram(data.X, hyper.kernel);
  ModelState state = init_state(data, hyper, rng);

  const int n_groups = static_cast<int>(data.groups.size());
  ChainReport report;
  report.z_acceptance_rate.assign(static_cast<std::size_t>(n_groups), 0.0);
  std::vector<long> z_accepted(static_cast<std::size_t>(n_groups), 0);
  std::vector<long> z_proposed(static_cast<std::size_t>(n_groups), 0);
  long g_accepted = 0, g_proposed = 0;

  std::vector<PosteriorSample> samples;
  samples.reserve(static_cast<std::size_t>(config.n_samples));

  const long total_iters =
      static_cast<long>(config.burn_in) +
      static_cast<long>(config.n_samples) * config.thin;
  for (long it = 0; it < total_iters; ++it) {
    for (int s = 0; s < config.gamma_sweeps_per_iter; ++s) {
      const auto [acc, prop] = sample_gamma(state, gram, hyper, rng);
      g_accepted += acc;
      g_proposed += prop;
    }

    if (auto beta = sample_beta(state.active, state.delta2, state.z, gram,
                                rng)) {
      state.beta = std::move(*beta);
    } else {
      ++report.beta_solve_failures;
      if (state.beta.size() != state.k()) {
        state.beta = Eigen::VectorXd::Zero(state.k());
      }
    }

    state.delta2 = sample_delta2(state.beta, state.active, gram, hyper, rng);

    Eigen::VectorXd latent = Eigen::VectorXd::Zero(data.n());
    if (state.k() > 0) {
      latent = gram.g.psi(Eigen::all, state.active) * state.beta;
    }
    for (int j = 0; j < n_groups; ++j) {
      const Group& g = data.groups[static_cast<std::size_t>(j)];
      if (g.m == 0.0 || g.m == 1.0) {
        sample_z_group_hard(j, state, latent, data, rng);
        continue;
      }
      for (int s = 0; s < config.z_steps_per_iter; ++s) {
        z_accepted[static_cast<std::size_t>(j)] +=
            sample_z_group(j, state, latent, data, hyper, rng) ? 1 : 0;
        ++z_proposed[static_cast<std::size_t>(j)];
      }
    }

    for (const Group& g : data.groups) {
      if (g.m != 0.0 && g.m != 1.0) continue;
      for (int i : g.members) {
        const bool bad = g.m == 1.0 ? !(state.z[i] > 0.0) : !(state.z[i] <= 0.0);
        if (bad) ++report.hard_sign_violations;
      }
    }

    if (!state.z.allFinite() || !state.beta.allFinite() ||
        !std::isfinite(state.delta2) || state.delta2 <= 0.0) {
      throw RuntimeFailure("run_chain: non-finite state at iteration " +
                           std::to_string(it));
    }

    const long post = it - config.burn_in;
    if (post >= 0 && (post + 1) % config.thin == 0) {
      samples.push_back(PosteriorSample{state.active, state.beta, 0});
      report.active_kernel_trace.push_back(state.k());
      report.delta2_trace.push_back(state.delta2);
    }
  }

  for (int j = 0; j < n_groups; ++j) {
    const auto ju = static_cast<std::size_t>(j);
    report.z_acceptance_rate[ju] =
        z_proposed[ju] > 0
            ? static_cast<double>(z_accepted[ju]) /
                  static_cast<double>(z_proposed[ju])
            : 1.0;
  }
  report.gamma_flip_acceptance =
      g_proposed > 0
          ? static_cast<double>(g_accepted) / static_cast<double>(g_proposed)
          : 0.0;
  report.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                    t_start)
          .count();
  return {std::move(samples), std::move(report)};
}

}  // namespace llp
