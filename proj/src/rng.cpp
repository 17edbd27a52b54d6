#include "llp/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "llp/errors.hpp"

namespace llp {

double Rng::uniform() {
  // 52 mantissa bits plus a half-ulp offset keeps the value in (0,1).
  return (static_cast<double>(next_u64() >> 12) + 0.5) * 0x1.0p-52;
}

std::size_t Rng::uniform_below(std::size_t n) {
  if (n == 0) throw InputError("uniform_below: n must be >= 1");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() / n * n;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

double Rng::normal() {
  const double u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::gamma(double shape) {
  if (!(shape > 0.0)) throw InputError("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost the shape and correct with a uniform power.
    return gamma(shape + 1.0) * std::pow(uniform(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double Rng::inverse_gamma(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) {
    throw InputError("inverse_gamma: shape and scale must be positive");
  }
  return scale / gamma(shape);
}

double Rng::beta(double alpha, double b) {
  const double x = gamma(alpha);
  const double y = gamma(b);
  return x / (x + y);
}

double Rng::std_normal_lower_tail(double a) {
  if (a <= 0.45) {
    // Acceptance probability 1 - Phi(a) >= 0.33 here.
    for (;;) {
      const double x = normal();
      if (x >= a) return x;
    }
  }
  // Robert (1995): shifted-exponential proposal for the tail.
  const double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double x = a - std::log(uniform()) / alpha;
    const double d = x - alpha;
    if (std::log(uniform()) <= -0.5 * d * d) return x;
  }
}

double Rng::truncated_normal(double mean, bool positive_side) {
  if (positive_side) {
    // z > 0, z ~ N(mean, 1)  <=>  z = mean + s with s >= -mean standard.
    return mean + std_normal_lower_tail(-mean);
  }
  // z <= 0 from N(mean, 1) is -w with w > 0 from N(-mean, 1).
  return -(-mean + std_normal_lower_tail(mean));
}

}  // namespace llp
