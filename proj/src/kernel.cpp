#include "llp/kernel.hpp"

#include <cmath>

#include "llp/errors.hpp"

namespace llp {

void KernelSpec::validate() const {
  if (kind == KernelKind::gaussian && !(sigma > 0.0)) {
    throw InputError("KernelSpec: gaussian sigma must be positive");
  }
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& x,
                   const Eigen::VectorXd& x2) {
  if (x.size() != x2.size()) {
    throw InputError("kernel_eval: dimension mismatch");
  }
  switch (spec.kind) {
    case KernelKind::gaussian:
      return std::exp(-spec.sigma * (x - x2).squaredNorm());
    case KernelKind::sigmoidal:
      return std::tanh(spec.kappa * x.dot(x2) + spec.theta);
  }
  throw InputError("kernel_eval: unknown kernel kind");
}

GramMatrix gram(const Eigen::MatrixXd& X, const KernelSpec& spec) {
  spec.validate();
  const int n = static_cast<int>(X.cols());
  if (n < 1) throw InputError("gram: need at least one instance");
  GramMatrix out;
  out.psi.resize(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = kernel_eval(spec, X.col(i), X.col(j));
      out.psi(i, j) = v;
      out.psi(j, i) = v;
    }
  }
  return out;
}

}  // namespace llp
