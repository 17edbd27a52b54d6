#pragma once

#include <Eigen/Dense>

namespace llp {

enum class KernelKind { gaussian, sigmoidal };

/// Kernel configuration. The gaussian kernel is
/// K(x, x') = exp(-sigma * |x - x'|^2); the sigmoidal kernel is
/// K(x, x') = tanh(kappa * <x, x'> + theta).
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double sigma = 1.0;  // gaussian bandwidth, > 0
  double kappa = 1.0;  // sigmoidal slope
  double theta = 0.0;  // sigmoidal offset

  void validate() const;
};

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2);

/// Symmetric N x N matrix of pairwise kernel values over the training
/// points. Immutable after construction.
struct GramMatrix {
  Eigen::MatrixXd psi;

  int n() const { return static_cast<int>(psi.rows()); }
};

/// X holds instances as columns (d x N).
GramMatrix gram(const Eigen::MatrixXd& X, const KernelSpec& spec);

/// GramMatrix plus the precomputed cross-product Psi^T Psi, from which any
/// active-set normal matrix is a plain submatrix.
struct GramCache {
  GramMatrix g;
  Eigen::MatrixXd psi_t_psi;

  GramCache(const Eigen::MatrixXd& X, const KernelSpec& spec)
      : g(gram(X, spec)), psi_t_psi(g.psi.transpose() * g.psi) {}
  explicit GramCache(GramMatrix gm)
      : g(std::move(gm)), psi_t_psi(g.psi.transpose() * g.psi) {}

  int n() const { return g.n(); }
};

}  // namespace llp
