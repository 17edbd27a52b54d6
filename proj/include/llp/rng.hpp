#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace llp {

/// Seedable random stream. All distributions are implemented on top of the
/// raw 64-bit engine output, so draw sequences are identical across
/// platforms and standard-library versions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// U(0,1), strictly inside the open interval.
  double uniform();

  /// Uniform integer in {0, ..., n-1}. Requires n >= 1.
  std::size_t uniform_below(std::size_t n);

  /// Standard normal draw (Box-Muller).
  double normal();

  /// Gamma(shape, scale 1) via Marsaglia-Tsang; shape > 0.
  double gamma(double shape);

  /// Inverse-Gamma(shape, scale): density proportional to
  /// x^(-shape-1) exp(-scale/x). Both parameters must be positive.
  double inverse_gamma(double shape, double scale);

  /// Beta(alpha, beta) draw via two Gammas.
  double beta(double alpha, double beta);

  /// Draw from N(mean, 1) restricted to z > 0 (positive_side) or z <= 0.
  /// Stays efficient for arbitrarily extreme means (tail draws use an
  /// exponential-rejection scheme rather than naive resampling).
  double truncated_normal(double mean, bool positive_side);

  /// Derive an independent child stream.
  Rng split() { return Rng(next_u64()); }

  /// Fisher-Yates shuffle driven by this stream.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::swap(v[i - 1], v[uniform_below(i)]);
    }
  }

 private:
  std::uint64_t next_u64() { return engine_(); }

  /// Standard normal conditioned on X >= a, for any a.
  double std_normal_lower_tail(double a);

  std::mt19937_64 engine_;
};

}  // namespace llp
