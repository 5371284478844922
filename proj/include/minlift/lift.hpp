#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <utility>

#include "minlift/analytic.hpp"
#include "minlift/errors.hpp"
#include "minlift/mappings.hpp"

namespace minlift {

// A point of the lifted surface in R^3.
struct SurfacePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double x3 = 0.0;
};

using Vec3 = std::array<double, 3>;

// First partial derivatives of the lift with respect to u and v (z = u + iv).
struct LiftPartials {
  Vec3 xu{};
  Vec3 xv{};
};

// Caches the derivative expressions and the x3 integrand h'q of one map, so
// repeated lifts (mesh building, sweeps) do not rebuild trees per point.
// The square root of h'g' is always h' q, never a pointwise complex sqrt;
// q fixes the branch.
class Lifter {
 public:
  explicit Lifter(HarmonicMap f, int quad_nodes = kDefaultQuadNodes)
      : map_(std::move(f)),
        hp_(derivative(map_.h)),
        gp_(derivative(map_.g)),
        integrand_(hp_ * map_.q),
        quad_nodes_(quad_nodes) {
    if (quad_nodes_ < 2) throw DomainError("lift quadrature needs at least 2 nodes");
  }

  const HarmonicMap& map() const { return map_; }
  int quad_nodes() const { return quad_nodes_; }

  // (Re{h+g}, Im{h-g}, 2 Im int_0^z h'q).
  SurfacePoint lift(Complex z) const {
    check_domain(z);
    const Complex hv = map_.h.eval(z);
    const Complex gv = map_.g.eval(z);
    const Complex x3i = integrate_radial(integrand_, z, quad_nodes_);
    return {(hv + gv).real(), (hv - gv).imag(), 2.0 * x3i.imag()};
  }

  // Analytic first partials; no numeric differentiation, no quadrature.
  LiftPartials partials(Complex z) const {
    check_domain(z);
    const Complex hp = hp_.eval(z);
    const Complex gp = gp_.eval(z);
    const Complex w3 = hp * map_.q.eval(z);  // (d/dz) of the x3 integral
    const Complex sum = hp + gp;
    const Complex dif = hp - gp;
    LiftPartials p;
    p.xu = {sum.real(), dif.imag(), 2.0 * w3.imag()};
    p.xv = {-sum.imag(), dif.real(), 2.0 * w3.real()};
    return p;
  }

  Complex h_prime(Complex z) const { return hp_.eval(z); }
  Complex g_prime(Complex z) const { return gp_.eval(z); }

 private:
  void check_domain(Complex z) const {
    if (!(std::abs(z) < map_.r_max))
      throw DomainError("lift point outside |z| < r_max of map " + map_.name);
  }

  HarmonicMap map_;
  AnalyticExpr hp_;
  AnalyticExpr gp_;
  AnalyticExpr integrand_;
  int quad_nodes_;
};

inline SurfacePoint lift_point(const HarmonicMap& f, Complex z,
                               int quad_nodes = kDefaultQuadNodes) {
  return Lifter(f, quad_nodes).lift(z);
}

// Closed-form parametrizations of the four classical surfaces, used as the
// quadrature oracle. Conventions match the catalog entries (in particular the
// scherk-singly h/g swap, which reflects the second coordinate).
inline SurfacePoint closed_form_oracle(std::string_view name, Complex z) {
  if (!(std::abs(z) < kDefaultRMax))
    throw DomainError("oracle point outside |z| < " + std::to_string(kDefaultRMax));
  auto L = [](Complex w) { return std::log((1.0 + w) / (1.0 - w)); };
  const Complex i{0.0, 1.0};
  if (name == "enneper") {
    const Complex z3 = z * z * z;
    return {(z + z3 / 3.0).real(), (z - z3 / 3.0).imag(), (z * z).imag()};
  }
  if (name == "scherk-singly") {
    return {0.5 * L(z).real(), (-0.5 * i * L(i * z)).imag(), 0.5 * L(z * z).imag()};
  }
  if (name == "scherk-doubly") {
    return {0.5 * L(i * z).imag(), 0.5 * L(z).imag(), 0.5 * L(z * z).real()};
  }
  if (name == "catenoid") {
    const Complex r = 1.0 / (1.0 - z * z);
    return {0.5 * L(z).real(), (z * r).imag(), r.real() - 1.0};
  }
  throw UnknownName("no closed-form oracle for: " + std::string(name));
}

}  // namespace minlift
