#pragma once

#include <array>
#include <vector>

#include "llp/model.hpp"

namespace llp {

/// Retained posterior samples plus everything needed to score new points.
struct TrainedModel {
  std::vector<PosteriorSample> samples;
  Eigen::MatrixXd training_x;  // d x N
  KernelSpec kernel;

  void validate() const;
  int dim() const { return static_cast<int>(training_x.rows()); }
};

/// Monte Carlo predictive probability: mean of Phi(f(x)) over all samples.
double predictive_prob(const TrainedModel& model, const Eigen::VectorXd& x);

/// Row-major raster of predictive probabilities over a 2-D box, evaluated
/// at cell centers: value(row r, col c) is the probability at
/// x = lo_x + (c + 0.5) * (hi_x - lo_x) / nx and the analogous y for r.
struct PredictiveGrid {
  int nx = 0, ny = 0;
  std::array<double, 2> lo{}, hi{};
  std::vector<double> values;  // row-major, ny rows of nx, y ascending

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) *
                      static_cast<std::size_t>(nx) +
                  static_cast<std::size_t>(col)];
  }
};

PredictiveGrid predictive_grid(const TrainedModel& model,
                               const std::array<double, 2>& lo,
                               const std::array<double, 2>& hi, int nx,
                               int ny);

/// Hard labels: 1 iff predictive_prob >= threshold.
std::vector<int> classify(const TrainedModel& model,
                          const Eigen::MatrixXd& x_test,
                          double threshold = 0.5);

}  // namespace llp
