#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "llp/kernel.hpp"

namespace llp {

/// Standard normal CDF.
double std_normal_cdf(double t);

/// log Gamma(a)Gamma(b)/Gamma(a+b).
double log_beta_fn(double a, double b);

/// Solution of the active-set normal system A x = u with
/// A = Psi_gamma^T Psi_gamma and u = Psi_gamma^T Z.
struct ActiveSolve {
  Eigen::VectorXd mean_core;          // A^{-1} u
  Eigen::LLT<Eigen::MatrixXd> chol;   // factor of (possibly jittered) A
  double quad = 0.0;                  // u . mean_core = Z^T P_gamma Z
};

/// Cholesky-solve an SPD system with an always-on trace-scaled ridge
/// (1e-9 * trace / K on the diagonal) so near-collinear kernel columns
/// cannot produce unbounded solutions, plus one larger-jitter retry.
/// Empty result means the system is numerically singular even after the
/// retry and the caller should reject the proposal.
std::optional<ActiveSolve> solve_normal_system(Eigen::MatrixXd a,
                                               const Eigen::VectorXd& u);

/// Restricted projection solve over the active kernel columns.
/// active must be non-empty and hold valid column indices of psi.
std::optional<ActiveSolve> restricted_solve(const GramMatrix& psi,
                                            const std::vector<int>& active,
                                            const Eigen::VectorXd& z);

}  // namespace llp
