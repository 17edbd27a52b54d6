#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "llp/kernel.hpp"
#include "llp/numerics.hpp"

namespace llp {

/// One group of instances with its observed positive-fraction estimate m
/// and optional per-group confidence (overrides the global one).
struct Group {
  std::vector<int> members;
  double m = 0.0;
  std::optional<double> chi;
};

/// Grouped training data. Instances are columns of X; every instance
/// belongs to exactly one group. True labels, when present, are for
/// evaluation only and are never read by the training path.
struct Dataset {
  Eigen::MatrixXd X;  // d x N
  std::vector<int> group_of;
  std::vector<Group> groups;
  std::optional<std::vector<int>> true_labels;  // 0/1 per instance

  int n() const { return static_cast<int>(X.cols()); }
  int dim() const { return static_cast<int>(X.rows()); }

  void validate() const;
};

enum class Delta2ShapeRule { derived, paper };

struct Hyperparams {
  KernelSpec kernel;
  double a = 1.0;      // Beta prior on the kernel inclusion rate
  double b = 1.0;
  double mu = 1.0;     // delta^2 prior shape parameter (mu/2)
  double nu = 1.0;     // delta^2 prior scale parameter (nu/2)
  double chi = 1000.0; // global fraction-confidence
  Delta2ShapeRule delta2_shape_rule = Delta2ShapeRule::derived;

  void validate() const;

  double chi_for(const Group& g) const { return g.chi.value_or(chi); }
};

/// Current state of one Markov chain. beta is the reduced coefficient
/// vector over active kernels only.
struct ModelState {
  std::vector<std::uint8_t> gamma;  // 0/1 per training instance
  std::vector<int> active;          // sorted indices with gamma == 1
  Eigen::VectorXd beta;             // length == active.size()
  double delta2 = 1.0;
  Eigen::VectorXd z;                // length N

  int k() const { return static_cast<int>(active.size()); }
  void rebuild_active();
};

/// One retained posterior draw used for prediction.
struct PosteriorSample {
  std::vector<int> active;
  Eigen::VectorXd beta;
  int chain = 0;
};

/// Latent score f(x) = sum over active kernels of beta_i K(x, x_i).
double latent_f(const Eigen::VectorXd& x, const PosteriorSample& sample,
                const Eigen::MatrixXd& training_x, const KernelSpec& spec);

/// Phi(f(x)).
double prob_positive(const Eigen::VectorXd& x, const PosteriorSample& sample,
                     const Eigen::MatrixXd& training_x,
                     const KernelSpec& spec);

/// Fraction of strictly positive entries; z = 0 counts as negative.
double lambda_of(const Eigen::VectorXd& z_group);

/// Log-density of the observed fraction m under the Beta measurement
/// model with mode at lambda and concentration chi:
///   log Beta(m; chi*lambda + 1, chi*(1 - lambda) + 1).
/// Requires m strictly inside (0,1); the m in {0,1} boundary cases are the
/// sampler's hard-constraint path and never reach this density.
double log_m_likelihood(double m, double lambda, double chi);

/// Log prior over selection vectors with k of n active, Beta(a,b)
/// inclusion rate integrated out.
double log_gamma_prior(int k, int n, double a, double b);

/// Unnormalized log conditional of the selection vector given (delta2, Z):
///   -(K/2) log(1+delta2) + (delta2/(1+delta2))/2 * Z^T P_gamma Z
///   + log_gamma_prior(K, N, a, b).
/// Empty result: numerically singular active system (caller rejects).
std::optional<double> log_gamma_conditional(
    const std::vector<int>& active, double delta2, const Eigen::VectorXd& z,
    const GramMatrix& psi, double a, double b);

/// Same quantity from precomputed A = Psi_g^T Psi_g and u = Psi_g^T Z.
std::optional<double> log_gamma_conditional_core(const Eigen::MatrixXd& a_sub,
                                                 const Eigen::VectorXd& u,
                                                 int n, double delta2,
                                                 double a, double b);

}  // namespace llp
