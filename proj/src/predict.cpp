#include "llp/predict.hpp"

#include "llp/errors.hpp"

namespace llp {

void TrainedModel::validate() const {
  if (samples.empty()) throw InputError("TrainedModel: no samples");
  const int n = static_cast<int>(training_x.cols());
  for (const PosteriorSample& s : samples) {
    if (static_cast<Eigen::Index>(s.active.size()) != s.beta.size()) {
      throw InputError("TrainedModel: sample beta/active length mismatch");
    }
    for (int i : s.active) {
      if (i < 0 || i >= n) {
        throw InputError("TrainedModel: active index out of range");
      }
    }
  }
  kernel.validate();
}

double predictive_prob(const TrainedModel& model, const Eigen::VectorXd& x) {
  if (x.size() != model.training_x.rows()) {
    throw InputError("predictive_prob: dimension mismatch");
  }
  double acc = 0.0;
  for (const PosteriorSample& s : model.samples) {
    acc += prob_positive(x, s, model.training_x, model.kernel);
  }
  return acc / static_cast<double>(model.samples.size());
}

PredictiveGrid predictive_grid(const TrainedModel& model,
                               const std::array<double, 2>& lo,
                               const std::array<double, 2>& hi, int nx,
                               int ny) {
  if (model.dim() != 2) {
    throw InputError("predictive_grid: only defined for 2-D feature spaces");
  }
  if (nx < 1 || ny < 1) throw InputError("predictive_grid: bad resolution");
  if (!(hi[0] > lo[0]) || !(hi[1] > lo[1])) {
    throw InputError("predictive_grid: empty bounds");
  }
  PredictiveGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.lo = lo;
  grid.hi = hi;
  grid.values.resize(static_cast<std::size_t>(nx) *
                     static_cast<std::size_t>(ny));
  Eigen::VectorXd x(2);
  for (int r = 0; r < ny; ++r) {
    x[1] = lo[1] + (r + 0.5) * (hi[1] - lo[1]) / ny;
    for (int c = 0; c < nx; ++c) {
      x[0] = lo[0] + (c + 0.5) * (hi[0] - lo[0]) / nx;
      grid.values[static_cast<std::size_t>(r) *
                      static_cast<std::size_t>(nx) +
                  static_cast<std::size_t>(c)] = predictive_prob(model, x);
    }
  }
  return grid;
}

std::vector<int> classify(const TrainedModel& model,
                          const Eigen::MatrixXd& x_test, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw InputError("classify: threshold must lie in (0,1)");
  }
  std::vector<int> labels(static_cast<std::size_t>(x_test.cols()));
  for (Eigen::Index i = 0; i < x_test.cols(); ++i) {
    labels[static_cast<std::size_t>(i)] =
        predictive_prob(model, x_test.col(i)) >= threshold ? 1 : 0;
  }
  return labels;
}

}  // namespace llp
