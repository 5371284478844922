#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include <json.hpp>

#include "minlift/analytic.hpp"
#include "minlift/errors.hpp"
#include "minlift/grid.hpp"
#include "minlift/mappings.hpp"
#include "minlift/parallel.hpp"

namespace minlift {

inline constexpr double kCriterionTol = 1e-10;
inline constexpr double kSymmetryTol = 1e-12;

// Outcome of a grid-evaluated criterion.
struct CriterionReport {
  std::string criterion;
  int n_r = 0;
  int n_theta = 0;
  double grid_r_max = 0.0;
  double min_value = 0.0;
  Complex argmin{};
  double tolerance = 0.0;
  bool passed = false;
  std::map<std::string, double> parameters;
};

namespace detail {

// Evaluates value_at over the grid and reports the minimum; ties break toward
// the smallest grid index, independent of the thread count.
template <class ValueAt>
CriterionReport grid_min_report(std::string criterion, const DiskGrid& grid, double tolerance,
                                ValueAt&& value_at) {
  std::vector<double> values(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) { values[i] = value_at(grid.points[i]); });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] < values[best]) best = i;
  CriterionReport rep;
  rep.criterion = std::move(criterion);
  rep.n_r = grid.n_r;
  rep.n_theta = grid.n_theta;
  rep.grid_r_max = grid.r_max;
  rep.min_value = values[best];
  rep.argmin = grid.points[best];
  rep.tolerance = tolerance;
  rep.passed = rep.min_value >= -tolerance;
  return rep;
}

}  // namespace detail

// Lewy / Jacobian positivity: min of |h'|^2 - |g'|^2, which equals J_f.
// Passes only on strict positivity (min > tolerance).
inline CriterionReport check_local_univalence(const HarmonicMap& f, const DiskGrid& grid,
                                              double tolerance = kCriterionTol) {
  auto rep = detail::grid_min_report("local-univalence", grid, tolerance, [&](Complex z) {
    const Complex hp = f.h.eval_d(z, 1).d1;
    const Complex gp = f.g.eval_d(z, 1).d1;
    return std::norm(hp) - std::norm(gp);
  });
  rep.passed = rep.min_value > tolerance;
  return rep;
}

// Hengartner-Schober: min of Re{(1 - z^2) phi'(z)}. The strict flag demands
// min > 0 instead of min >= -tolerance (sensible for interior grids only;
// the condition degenerates as r -> 1).
inline CriterionReport check_hs(const AnalyticExpr& phi, const DiskGrid& grid,
                                double tolerance = kCriterionTol, bool strict = false) {
  auto rep = detail::grid_min_report("hs", grid, tolerance, [&](Complex z) {
    const Complex dphi = phi.eval_d(z, 1).d1;
    return ((1.0 - z * z) * dphi).real();
  });
  if (strict) {
    rep.passed = rep.min_value > 0.0;
    rep.parameters["strict"] = 1.0;
  }
  return rep;
}

// Koepf-style condition: min of Re{phi'(z) (1 + z e^{i(alpha+beta)}) (1 + z e^{-i(alpha-beta)})}.
inline CriterionReport check_koepf(const AnalyticExpr& phi, double beta, double alpha,
                                   const DiskGrid& grid, double tolerance = kCriterionTol,
                                   bool strict = false) {
  const Complex ra = std::exp(Complex{0.0, alpha + beta});
  const Complex rb = std::exp(Complex{0.0, -(alpha - beta)});
  auto rep = detail::grid_min_report("koepf", grid, tolerance, [&](Complex z) {
    const Complex dphi = phi.eval_d(z, 1).d1;
    return (dphi * (1.0 + z * ra) * (1.0 + z * rb)).real();
  });
  rep.parameters["beta"] = beta;
  rep.parameters["alpha"] = alpha;
  if (strict) {
    rep.passed = rep.min_value > 0.0;
    rep.parameters["strict"] = 1.0;
  }
  return rep;
}

// Searches alpha over a uniform grid and keeps the best (largest) minimum.
inline CriterionReport check_koepf_best_alpha(const AnalyticExpr& phi, double beta,
                                              const DiskGrid& grid,
                                              double tolerance = kCriterionTol,
                                              int n_alpha = 64) {
  CriterionReport best;
  bool have = false;
  for (int j = 0; j < n_alpha; ++j) {
    const double alpha = 2.0 * std::numbers::pi * j / n_alpha;
    CriterionReport rep = check_koepf(phi, beta, alpha, grid, tolerance);
    if (!have || rep.min_value > best.min_value) {
      best = rep;
      have = true;
    }
  }
  best.parameters["alpha_search"] = 1.0;
  return best;
}

// Arbitrary-direction convexity product, evaluated at z = r e^{i gamma}:
// [cos a + cos(b+gamma)] [phiR' cos(b+gamma) - phiI' sin(b+gamma)].
inline CriterionReport check_taylor(const AnalyticExpr& phi, double beta, double alpha,
                                    const DiskGrid& grid, double tolerance = kCriterionTol,
                                    bool strict = false) {
  auto rep = detail::grid_min_report("taylor", grid, tolerance, [&](Complex z) {
    const Complex dphi = phi.eval_d(z, 1).d1;
    const double gamma = std::arg(z);  // arg(0) = 0 for the origin sample
    const double bg = beta + gamma;
    return (std::cos(alpha) + std::cos(bg)) *
           (dphi.real() * std::cos(bg) - dphi.imag() * std::sin(bg));
  });
  rep.parameters["beta"] = beta;
  rep.parameters["alpha"] = alpha;
  if (strict) {
    rep.passed = rep.min_value > 0.0;
    rep.parameters["strict"] = 1.0;
  }
  return rep;
}

// Clunie-Sheil-Small composite: local univalence plus directional convexity of
// the shear. beta = pi/2 uses the Hengartner-Schober check; other directions use
// the Koepf condition with an alpha search. Reports the weaker sub-minimum.
inline CriterionReport check_css_univalence(const HarmonicMap& f, double beta,
                                            const DiskGrid& grid,
                                            double tolerance = kCriterionTol) {
  const CriterionReport local = check_local_univalence(f, grid, tolerance);
  const AnalyticExpr phi = shear(f, beta);
  const bool imaginary_axis = std::abs(beta - 0.5 * std::numbers::pi) < 1e-9;
  const CriterionReport dir = imaginary_axis ? check_hs(phi, grid, tolerance)
                                             : check_koepf_best_alpha(phi, beta, grid, tolerance);
  CriterionReport rep = (local.min_value <= dir.min_value) ? local : dir;
  rep.criterion = "css-univalence";
  rep.passed = local.passed && dir.passed;
  rep.parameters["beta"] = beta;
  rep.parameters["local_min"] = local.min_value;
  rep.parameters["shear_min"] = dir.min_value;
  return rep;
}

// Equal-dilatation hypothesis: max |omega_a - omega_b| over the grid is at most tol.
inline bool check_dilatation_equal(const HarmonicMap& a, const HarmonicMap& b,
                                   const DiskGrid& grid, double tol = kDilatationEqualTol) {
  return max_dilatation_gap(a, b, grid) <= tol;
}

// k-fold rotational symmetry: max over the grid and j = 1..k-1 of
// |e^{2 pi i j/k} f(z e^{-2 pi i j/k}) - f(z)|. When k divides n_theta the
// rotated points are grid points, so no interpolation error enters.
inline CriterionReport check_rotational_symmetry(const HarmonicMap& f, int k,
                                                 const DiskGrid& grid,
                                                 double tolerance = kSymmetryTol) {
  if (k < 1) throw DomainError("rotational symmetry needs k >= 1");
  const bool aligned = (grid.n_theta % k) == 0;
  std::vector<Complex> values(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) { values[i] = eval_map(f, grid.points[i]); });

  double max_err = 0.0;
  Complex arg_worst = grid.points[0];
  for (int jj = 1; jj < k; ++jj) {
    const Complex mul = std::exp(Complex{0.0, 2.0 * std::numbers::pi * jj / k});
    const Complex rot = std::exp(Complex{0.0, -2.0 * std::numbers::pi * jj / k});
    const int shift = aligned ? jj * (grid.n_theta / k) : 0;
    for (int j = 1; j <= grid.n_r; ++j) {
      for (int kk = 0; kk < grid.n_theta; ++kk) {
        const std::size_t idx = grid.index_of(j, kk);
        Complex rotated_value;
        if (aligned) {
          const int kk2 = ((kk - shift) % grid.n_theta + grid.n_theta) % grid.n_theta;
          rotated_value = values[grid.index_of(j, kk2)];
        } else {
          rotated_value = eval_map(f, grid.points[idx] * rot);
        }
        const double err = std::abs(mul * rotated_value - values[idx]);
        if (err > max_err) {
          max_err = err;
          arg_worst = grid.points[idx];
        }
      }
    }
  }
  CriterionReport rep;
  rep.criterion = "symmetry";
  rep.n_r = grid.n_r;
  rep.n_theta = grid.n_theta;
  rep.grid_r_max = grid.r_max;
  rep.min_value = -max_err;
  rep.argmin = arg_worst;
  rep.tolerance = tolerance;
  rep.passed = max_err <= tolerance;
  rep.parameters["k"] = k;
  return rep;
}

namespace detail {

inline int orientation(Complex a, Complex b, Complex c) {
  const double v = (b.real() - a.real()) * (c.imag() - a.imag()) -
                   (b.imag() - a.imag()) * (c.real() - a.real());
  return (v > 0.0) - (v < 0.0);
}

// p assumed collinear with [a, b].
inline bool on_segment(Complex a, Complex b, Complex p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

inline bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const int d1 = orientation(q1, q2, p1);
  const int d2 = orientation(q1, q2, p2);
  const int d3 = orientation(p1, p2, q1);
  const int d4 = orientation(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace detail

// Samples f on the circle |z| = r and tests the closed polyline for
// self-intersection by pairwise segment tests. Together with Jacobian
// positivity inside, a simple boundary is strong numeric evidence of
// univalence on |z| <= r.
inline CriterionReport check_injectivity_boundary(const HarmonicMap& f, double r, int n) {
  if (!(r < f.r_max)) throw DomainError("boundary radius must satisfy r < r_max");
  if (n < 16) throw DomainError("boundary polyline needs n >= 16 samples");

  std::vector<Complex> params(n);
  std::vector<Complex> w(n);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  detail::parallel_for(static_cast<std::size_t>(n), [&](std::size_t k) {
    const double ang = (two_pi * static_cast<double>(k)) / n;
    params[k] = Complex{r * std::cos(ang), r * std::sin(ang)};
    w[k] = eval_map(f, params[k]);
  });
  for (int k = 0; k < n; ++k)
    if (std::abs(w[k] - w[(k + 1) % n]) < 1e-14)
      throw DegenerateCurve("coincident consecutive boundary samples near index " +
                            std::to_string(k));

  // Non-adjacent pairs only; adjacent segments legitimately share an endpoint.
  std::vector<int> hit(n, -1);
  detail::parallel_for(static_cast<std::size_t>(n - 2), [&](std::size_t iu) {
    const int i = static_cast<int>(iu);
    const Complex a1 = w[i], a2 = w[i + 1];
    const int j_end = (i == 0) ? n - 1 : n;
    for (int j = i + 2; j < j_end; ++j) {
      if (detail::segments_intersect(a1, a2, w[j], w[(j + 1) % n])) {
        hit[i] = j;
        break;
      }
    }
  });
  int first = -1;
  for (int i = 0; i < n - 2 && first < 0; ++i)
    if (hit[i] >= 0) first = i;

  CriterionReport rep;
  rep.criterion = "injectivity-boundary";
  rep.n_r = 1;
  rep.n_theta = n;
  rep.grid_r_max = r;
  rep.min_value = (first < 0) ? 1.0 : -1.0;
  rep.argmin = (first < 0) ? params[0] : params[first];
  rep.tolerance = 0.0;
  rep.passed = first < 0;
  rep.parameters["r"] = r;
  rep.parameters["n"] = n;
  return rep;
}

// Diagnostic scan of Re{phi} on circles approaching the boundary: reports where
// the supremum/infimum are attained and whether they sit near z = +1 / z = -1.
// Informational only; it never gates a pass/fail.
struct BoundaryScan {
  double radius = 0.0;
  double sup_re = 0.0;
  double inf_re = 0.0;
  Complex arg_sup{};
  Complex arg_inf{};
  bool sup_near_plus_one = false;
  bool inf_near_minus_one = false;
};

inline std::vector<BoundaryScan> hs_normalization_scan(const AnalyticExpr& phi,
                                                       int n_samples = 512,
                                                       std::vector<double> radius_factors = {
                                                           0.90, 0.95, 0.99}) {
  std::vector<BoundaryScan> out;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  constexpr double window = std::numbers::pi / 8.0;
  for (const double factor : radius_factors) {
    const double r = factor * phi.r_max();
    BoundaryScan scan;
    scan.radius = r;
    bool first = true;
    for (int k = 0; k < n_samples; ++k) {
      const double ang = (two_pi * k) / n_samples;
      const Complex z{r * std::cos(ang), r * std::sin(ang)};
      const double re = phi.eval(z).real();
      if (first || re > scan.sup_re) {
        scan.sup_re = re;
        scan.arg_sup = z;
      }
      if (first || re < scan.inf_re) {
        scan.inf_re = re;
        scan.arg_inf = z;
      }
      first = false;
    }
    scan.sup_near_plus_one = std::abs(std::arg(scan.arg_sup)) < window;
    scan.inf_near_minus_one = std::abs(std::abs(std::arg(scan.arg_inf)) - std::numbers::pi) < window;
    out.push_back(scan);
  }
  return out;
}

// ---- report output ----------------------------------------------------------

inline nlohmann::json report_to_json(const CriterionReport& rep) {
  nlohmann::json j;
  j["criterion"] = rep.criterion;
  j["grid"] = {{"n_r", rep.n_r}, {"n_theta", rep.n_theta}, {"r_max", rep.grid_r_max}};
  j["min_value"] = rep.min_value;
  j["argmin"] = {rep.argmin.real(), rep.argmin.imag()};
  j["tolerance"] = rep.tolerance;
  j["passed"] = rep.passed;
  j["parameters"] = rep.parameters;
  return j;
}

inline CriterionReport report_from_json(const nlohmann::json& j) {
  CriterionReport rep;
  rep.criterion = j.at("criterion").get<std::string>();
  rep.n_r = j.at("grid").at("n_r").get<int>();
  rep.n_theta = j.at("grid").at("n_theta").get<int>();
  rep.grid_r_max = j.at("grid").at("r_max").get<double>();
  rep.min_value = j.at("min_value").get<double>();
  rep.argmin = detail::complex_from_json(j.at("argmin"));
  rep.tolerance = j.at("tolerance").get<double>();
  rep.passed = j.at("passed").get<bool>();
  for (const auto& [key, value] : j.at("parameters").items())
    rep.parameters[key] = value.get<double>();
  return rep;
}

}  // namespace minlift
