#pragma once

#include <complex>
#include <random>
#include <vector>

#include "minlift/analytic.hpp"

namespace minlift_test {

using minlift::Complex;

// Deterministic sample of points with |z| <= radius.
inline std::vector<Complex> random_disk_points(std::size_t count, double radius,
                                               unsigned seed = 20240811u) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Complex> out;
  out.reserve(count);
  while (out.size() < count) {
    const double x = 2.0 * unif(rng) - 1.0;
    const double y = 2.0 * unif(rng) - 1.0;
    if (x * x + y * y <= 1.0) out.emplace_back(radius * x, radius * y);
  }
  return out;
}

inline double rel_err(Complex got, Complex want) {
  const double scale = std::max(1.0, std::abs(want));
  return std::abs(got - want) / scale;
}

}  // namespace minlift_test
