#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "minlift/analytic.hpp"
#include "minlift/errors.hpp"

namespace minlift {

// Polar lattice on the closed disk of radius r_max: the origin plus
// z = (j/n_r) * r_max * e^{2 pi i k / n_theta}, j = 1..n_r, k = 0..n_theta-1.
// Point order is origin first, then j ascending, k ascending; doubling n_r and
// n_theta reproduces every coarse point bit-exactly (the refined grid is a superset).
struct DiskGrid {
  int n_r = 0;
  int n_theta = 0;
  double r_max = 0.0;
  std::vector<Complex> points;

  DiskGrid(int nr, int ntheta, double rmax) : n_r(nr), n_theta(ntheta), r_max(rmax) {
    if (nr < 1 || ntheta < 1) throw DomainError("DiskGrid needs n_r >= 1 and n_theta >= 1");
    if (!(rmax > 0.0) || !(rmax < 1.0)) throw DomainError("DiskGrid r_max must lie in (0, 1)");
    points.reserve(static_cast<std::size_t>(nr) * ntheta + 1);
    points.emplace_back(0.0, 0.0);
    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int j = 1; j <= nr; ++j) {
      const double r = (static_cast<double>(j) / nr) * rmax;
      for (int k = 0; k < ntheta; ++k) {
        const double ang = (two_pi * k) / ntheta;
        points.emplace_back(r * std::cos(ang), r * std::sin(ang));
      }
    }
  }

  std::size_t size() const { return points.size(); }

  // Index of the (j, k) lattice point; index 0 is the origin.
  std::size_t index_of(int j, int k) const {
    return 1 + static_cast<std::size_t>(j - 1) * n_theta + static_cast<std::size_t>(k);
  }
};

}  // namespace minlift
