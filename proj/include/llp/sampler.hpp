#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "llp/model.hpp"
#include "llp/rng.hpp"

namespace llp {

struct ChainConfig {
  int burn_in = 1000;
  int n_samples = 1000;
  int thin = 1;
  std::uint64_t seed = 0;
  int gamma_sweeps_per_iter = 1;
  int z_steps_per_iter = 1;

  void validate() const;
};

/// Per-chain diagnostics.
struct ChainReport {
  std::vector<double> z_acceptance_rate;  // per group; 1.0 for hard groups
  double gamma_flip_acceptance = 0.0;
  std::vector<int> active_kernel_trace;   // K per retained sample
  std::vector<double> delta2_trace;       // delta^2 per retained sample
  double wall_time_sec = 0.0;
  long beta_solve_failures = 0;
  long hard_sign_violations = 0;  // checked after every iteration
};

/// Isotropic Metropolis proposal scale for a Z-group of the given size,
/// 2.4 / sqrt(n).
double z_proposal_stddev(int group_size);

ModelState init_state(const Dataset& data, const Hyperparams& hyper, Rng& rng);

/// One Metropolis-within-Gibbs sweep over the selection vector: visit all
/// indices in a fresh random permutation, proposing single-component
/// flips against the marginal gamma conditional. Returns
/// (accepted, proposed) counts.
std::pair<long, long> sample_gamma(ModelState& state, const GramCache& gram,
                                   const Hyperparams& hyper, Rng& rng);

/// Exact Gaussian conditional draw of the reduced coefficient vector.
/// Empty result on a numerically singular system.
std::optional<Eigen::VectorXd> sample_beta(const std::vector<int>& active,
                                           double delta2,
                                           const Eigen::VectorXd& z,
                                           const GramCache& gram, Rng& rng);

/// Conjugate inverse-Gamma draw for delta^2. The shape follows
/// hyper.delta2_shape_rule: (mu + K)/2 (derived) or (mu + K + 1)/2 (paper).
double sample_delta2(const Eigen::VectorXd& beta,
                     const std::vector<int>& active, const GramCache& gram,
                     const Hyperparams& hyper, Rng& rng);

/// One Metropolis step on a soft group's Z-block (0 < m < 1).
/// latent_mean is Psi_gamma * beta over all N instances. Returns whether
/// the proposal was accepted.
bool sample_z_group(int group_index, ModelState& state,
                    const Eigen::VectorXd& latent_mean, const Dataset& data,
                    const Hyperparams& hyper, Rng& rng);

/// Independent truncated-normal refresh for a hard group (m in {0,1}).
void sample_z_group_hard(int group_index, ModelState& state,
                         const Eigen::VectorXd& latent_mean,
                         const Dataset& data, Rng& rng);

/// Full blocked Gibbs run: gamma, beta, delta^2, then the per-group Z
/// blocks, for burn_in + n_samples * thin iterations; retains every
/// thin-th post-burn-in (gamma, beta). Deterministic given config.seed.
std::pair<std::vector<PosteriorSample>, ChainReport> run_chain(
    const Dataset& data, const Hyperparams& hyper, const ChainConfig& config);

}  // namespace llp
