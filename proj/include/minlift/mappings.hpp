#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "minlift/analytic.hpp"
#include "minlift/errors.hpp"
#include "minlift/grid.hpp"

namespace minlift {

// Tolerance and sample count for the dilatation-equality precondition of combine().
inline constexpr double kDilatationEqualTol = 1e-10;
inline constexpr int kDilatationGridNR = 8;
inline constexpr int kDilatationGridNTheta = 25;

// Planar harmonic mapping f = h + conj(g), normalized to f(0) = 0, together
// with the analytic square root q of its dilatation (g'/h' = q^2). Immutable.
struct HarmonicMap {
  std::string name;
  AnalyticExpr h;
  AnalyticExpr g;
  AnalyticExpr q;
  double r_max = kDefaultRMax;
};

inline const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names = {
      "enneper", "scherk-singly", "scherk-doubly", "catenoid", "enneper4", "noid4"};
  return names;
}

// Printable dilatation of a catalog entry (for display only).
inline std::string catalog_omega_label(std::string_view name) {
  if (name == "enneper" || name == "scherk-singly") return "z^2";
  if (name == "scherk-doubly" || name == "catenoid") return "-z^2";
  if (name == "enneper4" || name == "noid4") return "-z^6";
  throw UnknownName("unknown catalog entry: " + std::string(name));
}

// The six mappings of the deformation families.
//
// All logarithms are the disk-safe L(sigma z) = log((1+sigma z)/(1-sigma z));
// in particular the 4-noid's log((z+1)/(z-1)) is -L(z) + i pi and the additive
// constant is dropped (every entry is normalized to f(0) = 0).
//
// scherk-singly: the classical assignment of h and g gives omega = 1/z^2,
// which is sense-reversing on the disk; the entry swaps the two so that
// omega = z^2. The swap reflects the surface's second coordinate.
inline HarmonicMap catalog(std::string_view name) {
  const Complex i{0.0, 1.0};
  const AnalyticExpr z = AnalyticExpr::variable();
  const AnalyticExpr one = AnalyticExpr::constant(1.0);
  const AnalyticExpr L = AnalyticExpr::atanh_log();
  const AnalyticExpr Li = rotate(i, L);  // L(iz) = log((1+iz)/(1-iz))

  if (name == "enneper") {
    return {"enneper", z, Complex{1.0 / 3.0, 0.0} * AnalyticExpr::power(3), z, kDefaultRMax};
  }
  if (name == "scherk-singly") {
    const AnalyticExpr h = Complex{0.25, 0.0} * L + (-0.25 * i) * Li;
    const AnalyticExpr g = Complex{0.25, 0.0} * L + (0.25 * i) * Li;
    return {"scherk-singly", h, g, z, kDefaultRMax};
  }
  if (name == "scherk-doubly") {
    const AnalyticExpr h = Complex{0.25, 0.0} * L + (-0.25 * i) * Li;
    const AnalyticExpr g = Complex{-0.25, 0.0} * L + (-0.25 * i) * Li;
    return {"scherk-doubly", h, g, i * z, kDefaultRMax};
  }
  if (name == "catenoid") {
    const AnalyticExpr rat = z / (one - AnalyticExpr::power(2));  // z / (1 - z^2)
    const AnalyticExpr h = Complex{0.25, 0.0} * L + Complex{0.5, 0.0} * rat;
    const AnalyticExpr g = Complex{0.25, 0.0} * L + Complex{-0.5, 0.0} * rat;
    return {"catenoid", h, g, i * z, kDefaultRMax};
  }
  if (name == "enneper4") {
    const double r = 0.95;
    const AnalyticExpr h = z.with_r_max(r);
    const AnalyticExpr g = (Complex{-1.0 / 7.0, 0.0} * AnalyticExpr::power(7)).with_r_max(r);
    const AnalyticExpr q = (i * AnalyticExpr::power(3)).with_r_max(r);
    return {"enneper4", h, g, q, r};
  }
  if (name == "noid4") {
    const double r = 0.95;
    // Sum/difference forms, disk-safe:
    //   h+g = (1/8) (2z/(1+z^2) + 3 L(z))          [log((z+1)/(z-1)) = -L(z) + i pi]
    //   h-g = (1/4) (z/(1-z^2) + (3i/2) L(-iz))    [log((1-iz)/(1+iz)) = L(-iz)]
    const AnalyticExpr sum_pn =
        Complex{0.125, 0.0} *
        (Complex{2.0, 0.0} * (z / (one + AnalyticExpr::power(2))) + Complex{3.0, 0.0} * L);
    const AnalyticExpr dif_pn =
        Complex{0.25, 0.0} *
        (z / (one - AnalyticExpr::power(2)) + (1.5 * i) * rotate(-i, L));
    const AnalyticExpr h = (Complex{0.5, 0.0} * (sum_pn + dif_pn)).with_r_max(r);
    const AnalyticExpr g = (Complex{0.5, 0.0} * (sum_pn - dif_pn)).with_r_max(r);
    const AnalyticExpr q = (i * AnalyticExpr::power(3)).with_r_max(r);
    return {"noid4", h, g, q, r};
  }
  throw UnknownName("unknown catalog entry: " + std::string(name));
}

// f(z) = h(z) + conj(g(z)).
inline Complex eval_map(const HarmonicMap& f, Complex z) {
  if (!(std::abs(z) < f.r_max))
    throw DomainError("evaluation point outside |z| < r_max of map " + f.name);
  return f.h.eval(z) + std::conj(f.g.eval(z));
}

// omega(z) = g'(z) / h'(z).
inline Complex dilatation(const HarmonicMap& f, Complex z) {
  if (!(std::abs(z) < f.r_max))
    throw DomainError("evaluation point outside |z| < r_max of map " + f.name);
  const Complex hp = f.h.eval_d(z, 1).d1;
  const Complex gp = f.g.eval_d(z, 1).d1;
  if (std::abs(hp) < kPoleGuard) throw PoleError("h'(z) vanishes; dilatation undefined");
  return gp / hp;
}

// CSS shear phi = h - e^{2 i beta} g. The rotation factor is snapped onto exact
// axis values so beta = pi/2 yields h + g and beta = 0 yields h - g.
inline AnalyticExpr shear(const HarmonicMap& f, double beta) {
  Complex c = std::exp(Complex{0.0, 2.0 * beta});
  auto snap = [](double x) {
    if (std::abs(x) < 4e-16) return 0.0;
    if (std::abs(x - 1.0) < 4e-16) return 1.0;
    if (std::abs(x + 1.0) < 4e-16) return -1.0;
    return x;
  };
  c = Complex{snap(c.real()), snap(c.imag())};
  return f.h + (-c) * f.g;
}

// Largest |omega_a - omega_b| over the grid.
inline double max_dilatation_gap(const HarmonicMap& a, const HarmonicMap& b,
                                 const DiskGrid& grid) {
  double worst = 0.0;
  for (const Complex z : grid.points)
    worst = std::max(worst, std::abs(dilatation(a, z) - dilatation(b, z)));
  return worst;
}

namespace detail {

inline DiskGrid dilatation_check_grid(const HarmonicMap& a, const HarmonicMap& b) {
  const double r = 0.95 * std::min(a.r_max, b.r_max);
  return DiskGrid(kDilatationGridNR, kDilatationGridNTheta, r);
}

}  // namespace detail

// Convex combination (1-s) a + s b; s = 0 yields the first endpoint. Requires
// equal endpoint dilatations, checked on a 200-point grid.
inline HarmonicMap combine(const HarmonicMap& a, const HarmonicMap& b, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw DomainError("combination parameter must lie in [0, 1]");
  const DiskGrid grid = detail::dilatation_check_grid(a, b);
  const double gap = max_dilatation_gap(a, b, grid);
  if (gap > kDilatationEqualTol)
    throw DilatationMismatch("dilatations of " + a.name + " and " + b.name +
                             " differ by " + std::to_string(gap));
  const Complex ca{1.0 - s, 0.0};
  const Complex cb{s, 0.0};
  HarmonicMap out;
  out.name = a.name + "+" + b.name + "@" + std::to_string(s);
  out.h = ca * a.h + cb * b.h;
  out.g = ca * a.g + cb * b.g;
  out.q = a.q;
  out.r_max = std::min(a.r_max, b.r_max);
  return out;
}

// Weierstrass data (p, q) -> harmonic map with h' = p and g' = p q^2,
// realized as radial integrals so h(0) = g(0) = 0. q must be analytic.
inline HarmonicMap from_pq(const AnalyticExpr& p, const AnalyticExpr& q,
                           int quad_nodes = kDefaultQuadNodes) {
  HarmonicMap out;
  out.name = "from_pq";
  out.h = antiderivative(p, quad_nodes);
  out.g = antiderivative(p * q * q, quad_nodes);
  out.q = q;
  out.r_max = std::min(p.r_max(), q.r_max());
  return out;
}

// Two endpoints with a sorted parameter schedule in [0, 1].
struct FamilySpec {
  HarmonicMap endpoint_a;
  HarmonicMap endpoint_b;
  std::vector<double> parameters;

  FamilySpec(HarmonicMap a, HarmonicMap b, std::vector<double> params)
      : endpoint_a(std::move(a)), endpoint_b(std::move(b)), parameters(std::move(params)) {
    if (!std::is_sorted(parameters.begin(), parameters.end()))
      throw DomainError("family schedule must be sorted");
    for (const double s : parameters)
      if (!(s >= 0.0 && s <= 1.0)) throw DomainError("family schedule values must lie in [0, 1]");
  }
};

// Evenly spaced schedule with `steps` members: s = i / (steps - 1).
inline FamilySpec make_family(const HarmonicMap& a, const HarmonicMap& b, int steps) {
  if (steps < 2) throw DomainError("a family sweep needs at least 2 steps");
  std::vector<double> params(steps);
  for (int i = 0; i < steps; ++i) params[i] = static_cast<double>(i) / (steps - 1);
  return FamilySpec(a, b, std::move(params));
}

inline nlohmann::json map_to_json(const HarmonicMap& f) {
  nlohmann::json j;
  j["name"] = f.name;
  j["h"] = expr_to_json(f.h);
  j["g"] = expr_to_json(f.g);
  j["q"] = expr_to_json(f.q);
  j["r_max"] = f.r_max;
  return j;
}

inline HarmonicMap map_from_json(const nlohmann::json& j) {
  HarmonicMap f;
  f.name = j.at("name").get<std::string>();
  f.h = expr_from_json(j.at("h"));
  f.g = expr_from_json(j.at("g"));
  f.q = expr_from_json(j.at("q"));
  f.r_max = j.at("r_max").get<double>();
  if (!(f.r_max > 0.0) || f.r_max > 1.0) throw Error("map r_max must lie in (0, 1]");
  return f;
}

}  // namespace minlift
