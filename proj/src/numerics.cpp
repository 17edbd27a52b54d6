#include "llp/numerics.hpp"

#include <cmath>

#include "llp/errors.hpp"

namespace llp {

double std_normal_cdf(double t) {
  return 0.5 * std::erfc(-t / std::sqrt(2.0));
}

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

std::optional<ActiveSolve> solve_normal_system(Eigen::MatrixXd a,
                                               const Eigen::VectorXd& u) {
  const auto k = a.rows();
  if (k == 0 || u.size() != k) {
    throw InputError("solve_normal_system: bad dimensions");
  }
  ActiveSolve out;
  // Always-on trace-scaled ridge. Large active sets of overlapping kernels
  // make A ill-conditioned enough that a raw Cholesky completes without
  // reporting failure yet returns solutions with huge norm; those feed back
  // through f = Psi beta into Z and delta^2 and the chain diverges. The
  // ridge caps the condition number near K*1e9, which keeps the projection
  // quadratic form bounded by ||u|| while perturbing well-conditioned
  // systems at the 1e-9 relative level (far below every statistical
  // tolerance in use).
  a.diagonal().array() += 1e-9 * a.trace() / static_cast<double>(k);
  out.chol.compute(a);
  if (out.chol.info() != Eigen::Success) {
    a.diagonal().array() += 1e-6 * a.trace() / static_cast<double>(k);
    out.chol.compute(a);
    if (out.chol.info() != Eigen::Success) return std::nullopt;
  }
  out.mean_core = out.chol.solve(u);
  out.quad = u.dot(out.mean_core);
  return out;
}

std::optional<ActiveSolve> restricted_solve(const GramMatrix& psi,
                                            const std::vector<int>& active,
                                            const Eigen::VectorXd& z) {
  if (active.empty()) throw InputError("restricted_solve: empty active set");
  if (z.size() != psi.psi.rows()) {
    throw InputError("restricted_solve: Z length mismatch");
  }
  const Eigen::MatrixXd cols = psi.psi(Eigen::all, active);
  return solve_normal_system(cols.transpose() * cols, cols.transpose() * z);
}

}  // namespace llp
