#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "minlift/errors.hpp"

namespace minlift {

using Complex = std::complex<double>;

inline constexpr double kDefaultRMax = 0.99;
inline constexpr double kPoleGuard = 1e-14;
inline constexpr int kDefaultQuadNodes = 64;

// Value of an analytic function and its first two derivatives at a point.
struct Jet {
  Complex f{};
  Complex d1{};
  Complex d2{};
};

namespace detail {

struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;

enum class NodeKind : std::uint8_t {
  Constant,   // c
  Variable,   // z
  Power,      // z^n, n >= 0
  AtanhLog,   // L(z) = log((1+z)/(1-z)), principal branch
  Rotate,     // E(sigma*z), |sigma| = 1
  Sum,        // E_1 + ... + E_k
  Product,    // E_1 * E_2
  Quotient,   // E_1 / E_2
  Scale,      // c * E
  Integral,   // int_0^z E(w) dw, Gauss-Legendre on the radial segment
};

struct ExprNode {
  ExprNode(NodeKind k, Complex v = {}) : kind(k), value(v) {}

  NodeKind kind;
  Complex value;      // Constant payload, Scale factor, or Rotate sigma
  int exponent = 0;   // Power
  int quad_nodes = 0; // Integral
  std::vector<NodePtr> children;
};

inline NodePtr make_node(ExprNode n) {
  return std::make_shared<const ExprNode>(std::move(n));
}

// z^n by repeated squaring; deterministic, no log/exp round trip.
inline Complex ipow(Complex z, int n) {
  Complex acc{1.0, 0.0};
  while (n > 0) {
    if (n & 1) acc *= z;
    z *= z;
    n >>= 1;
  }
  return acc;
}

}  // namespace detail

// Gauss-Legendre rule on [-1, 1]; nodes found by Newton iteration on P_n.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n) : nodes_(n), weights_(n) {
    if (n < 2) throw DomainError("Gauss-Legendre rule needs at least 2 nodes");
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 64; ++iter) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
        }
        dp = n * (x * p1 - p2) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      nodes_[i] = -x;
      nodes_[n - 1 - i] = x;
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      weights_[i] = w;
      weights_[n - 1 - i] = w;
    }
  }

  static std::shared_ptr<const GaussLegendre> get(int n) {
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const GaussLegendre>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const GaussLegendre>(n);
    return slot;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

namespace detail {

inline Jet eval_node(const ExprNode& node, Complex z, int order);

inline Complex integrate_nodes(const ExprNode& node, Complex a, Complex b, int n) {
  const auto rule = GaussLegendre::get(n);
  const Complex mid = 0.5 * (a + b);
  const Complex half = 0.5 * (b - a);
  Complex acc{0.0, 0.0};
  for (int i = 0; i < rule->size(); ++i) {
    const Complex zeta = mid + half * rule->nodes()[i];
    acc += rule->weights()[i] * eval_node(node, zeta, 0).f;
  }
  return acc * half;
}

inline Jet eval_node(const ExprNode& node, Complex z, int order) {
  switch (node.kind) {
    case NodeKind::Constant:
      return {node.value, {}, {}};
    case NodeKind::Variable:
      return {z, {1.0, 0.0}, {}};
    case NodeKind::Power: {
      const int n = node.exponent;
      Jet out;
      out.f = ipow(z, n);
      if (order >= 1) out.d1 = (n >= 1) ? double(n) * ipow(z, n - 1) : Complex{};
      if (order >= 2) out.d2 = (n >= 2) ? double(n) * double(n - 1) * ipow(z, n - 2) : Complex{};
      return out;
    }
    case NodeKind::AtanhLog: {
      const Complex w = 1.0 - z * z;
      if (std::abs(w) < kPoleGuard) throw PoleError("L(z) evaluated too close to z = +/-1");
      Jet out;
      out.f = std::log((1.0 + z) / (1.0 - z));
      if (order >= 1) out.d1 = 2.0 / w;
      if (order >= 2) out.d2 = 4.0 * z / (w * w);
      return out;
    }
    case NodeKind::Rotate: {
      const Complex sigma = node.value;
      const Jet c = eval_node(*node.children[0], sigma * z, order);
      Jet out;
      out.f = c.f;
      if (order >= 1) out.d1 = sigma * c.d1;
      if (order >= 2) out.d2 = sigma * sigma * c.d2;
      return out;
    }
    case NodeKind::Sum: {
      Jet out;
      for (const auto& ch : node.children) {
        const Jet c = eval_node(*ch, z, order);
        out.f += c.f;
        if (order >= 1) out.d1 += c.d1;
        if (order >= 2) out.d2 += c.d2;
      }
      return out;
    }
    case NodeKind::Product: {
      const Jet a = eval_node(*node.children[0], z, order);
      const Jet b = eval_node(*node.children[1], z, order);
      Jet out;
      out.f = a.f * b.f;
      if (order >= 1) out.d1 = a.d1 * b.f + a.f * b.d1;
      if (order >= 2) out.d2 = a.d2 * b.f + 2.0 * a.d1 * b.d1 + a.f * b.d2;
      return out;
    }
    case NodeKind::Quotient: {
      const Jet u = eval_node(*node.children[0], z, order);
      const Jet v = eval_node(*node.children[1], z, order);
      if (std::abs(v.f) < kPoleGuard) throw PoleError("quotient denominator below pole guard");
      Jet out;
      out.f = u.f / v.f;
      if (order >= 1) out.d1 = (u.d1 - out.f * v.d1) / v.f;
      if (order >= 2) out.d2 = (u.d2 - 2.0 * out.d1 * v.d1 - out.f * v.d2) / v.f;
      return out;
    }
    case NodeKind::Scale: {
      const Jet c = eval_node(*node.children[0], z, order);
      Jet out;
      out.f = node.value * c.f;
      if (order >= 1) out.d1 = node.value * c.d1;
      if (order >= 2) out.d2 = node.value * c.d2;
      return out;
    }
    case NodeKind::Integral: {
      Jet out;
      const Jet c = (order >= 1) ? eval_node(*node.children[0], z, order - 1) : Jet{};
      out.f = integrate_nodes(*node.children[0], {0.0, 0.0}, z, node.quad_nodes);
      if (order >= 1) out.d1 = c.f;
      if (order >= 2) out.d2 = c.d1;
      return out;
    }
  }
  throw Error("corrupt expression node");
}

inline bool jet_finite(const Jet& j, int order) {
  auto ok = [](Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); };
  if (!ok(j.f)) return false;
  if (order >= 1 && !ok(j.d1)) return false;
  if (order >= 2 && !ok(j.d2)) return false;
  return true;
}

}  // namespace detail

// Immutable expression tree for a function analytic on {|z| < r_max}.
// Copies share structure; evaluation is pure and safe to run concurrently.
class AnalyticExpr {
 public:
  AnalyticExpr() : AnalyticExpr(detail::make_node({detail::NodeKind::Constant}), kDefaultRMax) {}

  static AnalyticExpr constant(Complex c) {
    return AnalyticExpr(detail::make_node({detail::NodeKind::Constant, c}), kDefaultRMax);
  }
  static AnalyticExpr variable() {
    return AnalyticExpr(detail::make_node({detail::NodeKind::Variable}), kDefaultRMax);
  }
  static AnalyticExpr power(int n) {
    if (n < 0) throw DomainError("power exponent must be nonnegative");
    detail::ExprNode node{detail::NodeKind::Power};
    node.exponent = n;
    return AnalyticExpr(detail::make_node(std::move(node)), kDefaultRMax);
  }
  // L(z) = log((1+z)/(1-z)); the argument has positive real part on the disk,
  // so the principal branch is continuous there.
  static AnalyticExpr atanh_log() {
    return AnalyticExpr(detail::make_node({detail::NodeKind::AtanhLog}), kDefaultRMax);
  }

  Jet eval_d(Complex z, int order = 2) const {
    if (order < 0 || order > 2) throw DomainError("derivative order must be 0, 1, or 2");
    if (!(std::abs(z) < r_max_))
      throw DomainError("evaluation point outside validity disk |z| < " + std::to_string(r_max_));
    Jet j = detail::eval_node(*root_, z, order);
    if (!detail::jet_finite(j, order)) throw DomainError("nonfinite value in expression evaluation");
    return j;
  }
  Complex eval(Complex z) const { return eval_d(z, 0).f; }

  double r_max() const { return r_max_; }
  AnalyticExpr with_r_max(double r) const {
    if (!(r > 0.0) || r > 1.0) throw DomainError("r_max must lie in (0, 1]");
    return AnalyticExpr(root_, r);
  }

  const detail::NodePtr& root() const { return root_; }

  AnalyticExpr(detail::NodePtr root, double r_max) : root_(std::move(root)), r_max_(r_max) {}

 private:
  detail::NodePtr root_;
  double r_max_ = kDefaultRMax;
};

// ---- construction helpers -------------------------------------------------

inline AnalyticExpr operator+(const AnalyticExpr& a, const AnalyticExpr& b) {
  detail::ExprNode node{detail::NodeKind::Sum};
  node.children = {a.root(), b.root()};
  return AnalyticExpr(detail::make_node(std::move(node)), std::min(a.r_max(), b.r_max()));
}

inline AnalyticExpr operator*(Complex c, const AnalyticExpr& e) {
  detail::ExprNode node{detail::NodeKind::Scale, c};
  node.children = {e.root()};
  return AnalyticExpr(detail::make_node(std::move(node)), e.r_max());
}

inline AnalyticExpr operator-(const AnalyticExpr& e) { return Complex{-1.0, 0.0} * e; }

inline AnalyticExpr operator-(const AnalyticExpr& a, const AnalyticExpr& b) { return a + (-b); }

inline AnalyticExpr operator*(const AnalyticExpr& a, const AnalyticExpr& b) {
  detail::ExprNode node{detail::NodeKind::Product};
  node.children = {a.root(), b.root()};
  return AnalyticExpr(detail::make_node(std::move(node)), std::min(a.r_max(), b.r_max()));
}

inline AnalyticExpr operator/(const AnalyticExpr& a, const AnalyticExpr& b) {
  detail::ExprNode node{detail::NodeKind::Quotient};
  node.children = {a.root(), b.root()};
  return AnalyticExpr(detail::make_node(std::move(node)), std::min(a.r_max(), b.r_max()));
}

// E(sigma * z) for unit-modulus sigma; rotations keep the validity disk.
inline AnalyticExpr rotate(Complex sigma, const AnalyticExpr& e) {
  if (std::abs(std::abs(sigma) - 1.0) > 1e-12)
    throw DomainError("rotate() requires |sigma| = 1");
  detail::ExprNode node{detail::NodeKind::Rotate, sigma};
  node.children = {e.root()};
  return AnalyticExpr(detail::make_node(std::move(node)), e.r_max());
}

// int_0^z E(w) dw as an expression; differentiation recovers E exactly.
inline AnalyticExpr antiderivative(const AnalyticExpr& e, int quad_nodes = kDefaultQuadNodes) {
  if (quad_nodes < 2) throw DomainError("antiderivative needs at least 2 quadrature nodes");
  detail::ExprNode node{detail::NodeKind::Integral};
  node.quad_nodes = quad_nodes;
  node.children = {e.root()};
  return AnalyticExpr(detail::make_node(std::move(node)), e.r_max());
}

// ---- operations -------------------------------------------------------------

inline Jet eval_d(const AnalyticExpr& e, Complex z, int order = 2) { return e.eval_d(z, order); }

namespace detail {

inline NodePtr derivative_node(const NodePtr& n) {
  using K = NodeKind;
  switch (n->kind) {
    case K::Constant:
      return make_node({K::Constant});
    case K::Variable:
      return make_node({K::Constant, Complex{1.0, 0.0}});
    case K::Power: {
      if (n->exponent == 0) return make_node({K::Constant});
      if (n->exponent == 1) return make_node({K::Constant, Complex{1.0, 0.0}});
      ExprNode pw{K::Power};
      pw.exponent = n->exponent - 1;
      ExprNode sc{K::Scale, Complex(double(n->exponent), 0.0)};
      sc.children = {make_node(std::move(pw))};
      return make_node(std::move(sc));
    }
    case K::AtanhLog: {
      // L'(z) = 2 / (1 - z^2)
      ExprNode z2{K::Power};
      z2.exponent = 2;
      ExprNode neg{K::Scale, Complex{-1.0, 0.0}};
      neg.children = {make_node(std::move(z2))};
      ExprNode den{K::Sum};
      den.children = {make_node({K::Constant, Complex{1.0, 0.0}}), make_node(std::move(neg))};
      ExprNode quo{K::Quotient};
      quo.children = {make_node({K::Constant, Complex{2.0, 0.0}}), make_node(std::move(den))};
      return make_node(std::move(quo));
    }
    case K::Rotate: {
      ExprNode rot{K::Rotate, n->value};
      rot.children = {derivative_node(n->children[0])};
      ExprNode sc{K::Scale, n->value};
      sc.children = {make_node(std::move(rot))};
      return make_node(std::move(sc));
    }
    case K::Sum: {
      ExprNode sum{K::Sum};
      for (const auto& ch : n->children) sum.children.push_back(derivative_node(ch));
      return make_node(std::move(sum));
    }
    case K::Product: {
      ExprNode lhs{K::Product};
      lhs.children = {derivative_node(n->children[0]), n->children[1]};
      ExprNode rhs{K::Product};
      rhs.children = {n->children[0], derivative_node(n->children[1])};
      ExprNode sum{K::Sum};
      sum.children = {make_node(std::move(lhs)), make_node(std::move(rhs))};
      return make_node(std::move(sum));
    }
    case K::Quotient: {
      // (u/v)' = (u'v - uv') / v^2
      ExprNode du_v{K::Product};
      du_v.children = {derivative_node(n->children[0]), n->children[1]};
      ExprNode u_dv{K::Product};
      u_dv.children = {n->children[0], derivative_node(n->children[1])};
      ExprNode neg{K::Scale, Complex{-1.0, 0.0}};
      neg.children = {make_node(std::move(u_dv))};
      ExprNode num{K::Sum};
      num.children = {make_node(std::move(du_v)), make_node(std::move(neg))};
      ExprNode den{K::Product};
      den.children = {n->children[1], n->children[1]};
      ExprNode quo{K::Quotient};
      quo.children = {make_node(std::move(num)), make_node(std::move(den))};
      return make_node(std::move(quo));
    }
    case K::Scale: {
      ExprNode sc{K::Scale, n->value};
      sc.children = {derivative_node(n->children[0])};
      return make_node(std::move(sc));
    }
    case K::Integral:
      return n->children[0];
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

// Exact rule-based derivative; closed over the node algebra.
inline AnalyticExpr derivative(const AnalyticExpr& e) {
  return AnalyticExpr(detail::derivative_node(e.root()), e.r_max());
}

// Gauss-Legendre integral of e along the straight segment [a, b].
inline Complex integrate_segment(const AnalyticExpr& e, Complex a, Complex b,
                                 int nodes = kDefaultQuadNodes) {
  if (nodes < 2) throw DomainError("integrate_segment needs at least 2 nodes");
  if (!(std::max(std::abs(a), std::abs(b)) < e.r_max()))
    throw DomainError("integration segment leaves the validity disk");
  const Complex value = detail::integrate_nodes(*e.root(), a, b, nodes);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw DomainError("nonfinite value in segment integration");
  return value;
}

// Integral from 0 to z along the radial segment; path-independent on the disk.
inline Complex integrate_radial(const AnalyticExpr& e, Complex z,
                                int nodes = kDefaultQuadNodes) {
  return integrate_segment(e, Complex{0.0, 0.0}, z, nodes);
}

// ---- JSON serialization ---------------------------------------------------

namespace detail {

inline nlohmann::json complex_to_json(Complex c) {
  return nlohmann::json::array({c.real(), c.imag()});
}

inline Complex complex_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2)
    throw Error("complex value must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline nlohmann::json node_to_json(const NodePtr& n) {
  using K = NodeKind;
  nlohmann::json j;
  switch (n->kind) {
    case K::Constant:
      j["kind"] = "const";
      j["value"] = complex_to_json(n->value);
      return j;
    case K::Variable:
      j["kind"] = "var";
      return j;
    case K::Power:
      j["kind"] = "pow";
      j["n"] = n->exponent;
      return j;
    case K::AtanhLog:
      j["kind"] = "atanh_log";
      return j;
    case K::Rotate:
      j["kind"] = "rotate";
      j["sigma"] = complex_to_json(n->value);
      j["child"] = node_to_json(n->children[0]);
      return j;
    case K::Sum:
    case K::Product:
    case K::Quotient: {
      j["kind"] = n->kind == K::Sum ? "sum" : (n->kind == K::Product ? "product" : "quotient");
      auto arr = nlohmann::json::array();
      for (const auto& ch : n->children) arr.push_back(node_to_json(ch));
      j["children"] = std::move(arr);
      return j;
    }
    case K::Scale:
      j["kind"] = "scale";
      j["value"] = complex_to_json(n->value);
      j["child"] = node_to_json(n->children[0]);
      return j;
    case K::Integral:
      j["kind"] = "integral";
      j["nodes"] = n->quad_nodes;
      j["child"] = node_to_json(n->children[0]);
      return j;
  }
  throw Error("corrupt expression node");
}

inline NodePtr node_from_json(const nlohmann::json& j) {
  using K = NodeKind;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "const") return make_node({K::Constant, complex_from_json(j.at("value"))});
  if (kind == "var") return make_node({K::Variable});
  if (kind == "pow") {
    ExprNode node{K::Power};
    node.exponent = j.at("n").get<int>();
    if (node.exponent < 0) throw Error("pow node with negative exponent");
    return make_node(std::move(node));
  }
  if (kind == "atanh_log") return make_node({K::AtanhLog});
  if (kind == "rotate") {
    ExprNode node{K::Rotate, complex_from_json(j.at("sigma"))};
    if (std::abs(std::abs(node.value) - 1.0) > 1e-12) throw Error("rotate sigma must be unit modulus");
    node.children = {node_from_json(j.at("child"))};
    return make_node(std::move(node));
  }
  if (kind == "sum" || kind == "product" || kind == "quotient") {
    ExprNode node{kind == "sum" ? K::Sum : (kind == "product" ? K::Product : K::Quotient)};
    for (const auto& cj : j.at("children")) node.children.push_back(node_from_json(cj));
    if (kind != "sum" && node.children.size() != 2)
      throw Error(kind + " node requires exactly 2 children");
    if (node.children.empty()) throw Error("sum node requires children");
    return make_node(std::move(node));
  }
  if (kind == "scale") {
    ExprNode node{K::Scale, complex_from_json(j.at("value"))};
    node.children = {node_from_json(j.at("child"))};
    return make_node(std::move(node));
  }
  if (kind == "integral") {
    ExprNode node{K::Integral};
    node.quad_nodes = j.at("nodes").get<int>();
    if (node.quad_nodes < 2) throw Error("integral node needs at least 2 quadrature nodes");
    node.children = {node_from_json(j.at("child"))};
    return make_node(std::move(node));
  }
  throw Error("unknown expression node kind: " + kind);
}

}  // namespace detail

inline nlohmann::json expr_to_json(const AnalyticExpr& e) {
  nlohmann::json j;
  j["r_max"] = e.r_max();
  j["tree"] = detail::node_to_json(e.root());
  return j;
}

inline AnalyticExpr expr_from_json(const nlohmann::json& j) {
  return AnalyticExpr(detail::node_from_json(j.at("tree")), j.at("r_max").get<double>());
}

// ---- display --------------------------------------------------------------

namespace detail {

inline std::string fmt_real(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

inline std::string fmt_complex(Complex c) {
  if (c.imag() == 0.0) return fmt_real(c.real());
  if (c.real() == 0.0) {
    if (c.imag() == 1.0) return "i";
    if (c.imag() == -1.0) return "-i";
    return fmt_real(c.imag()) + "i";
  }
  std::ostringstream os;
  os << "(" << fmt_real(c.real()) << (c.imag() < 0 ? "-" : "+") << fmt_real(std::abs(c.imag()))
     << "i)";
  return os.str();
}

inline std::string node_to_string(const NodePtr& n, const std::string& var) {
  using K = NodeKind;
  auto paren_if_sum = [&](const NodePtr& ch) {
    std::string s = node_to_string(ch, var);
    if (ch->kind == K::Sum || ch->kind == K::Scale) return "(" + s + ")";
    return s;
  };
  switch (n->kind) {
    case K::Constant:
      return fmt_complex(n->value);
    case K::Variable:
      return var;
    case K::Power:
      return var + "^" + std::to_string(n->exponent);
    case K::AtanhLog:
      return "L(" + var + ")";
    case K::Rotate: {
      const std::string sigma = fmt_complex(n->value);
      const std::string inner = (sigma == "1") ? var : (sigma == "-1" ? "-" + var : sigma + var);
      return node_to_string(n->children[0], inner);
    }
    case K::Sum: {
      std::string s;
      for (std::size_t i = 0; i < n->children.size(); ++i) {
        const auto& ch = n->children[i];
        const bool negative_scale =
            ch->kind == K::Scale && ((ch->value.imag() == 0.0 && ch->value.real() < 0.0) ||
                                     (ch->value.real() == 0.0 && ch->value.imag() < 0.0));
        if (i && negative_scale) {
          ExprNode flipped{K::Scale, -ch->value};
          flipped.children = ch->children;
          s += " - " + node_to_string(make_node(std::move(flipped)), var);
          continue;
        }
        if (i) s += " + ";
        s += node_to_string(ch, var);
      }
      return s;
    }
    case K::Product:
      return paren_if_sum(n->children[0]) + "*" + paren_if_sum(n->children[1]);
    case K::Quotient:
      return paren_if_sum(n->children[0]) + "/(" + node_to_string(n->children[1], var) + ")";
    case K::Scale: {
      const std::string c = fmt_complex(n->value);
      if (c == "1") return node_to_string(n->children[0], var);
      if (c == "-1") return "-" + paren_if_sum(n->children[0]);
      return c + "*" + paren_if_sum(n->children[0]);
    }
    case K::Integral:
      return "int_0^" + var + " " + node_to_string(n->children[0], "w") + " dw";
  }
  throw Error("corrupt expression node");
}

}  // namespace detail

inline std::string to_string(const AnalyticExpr& e) {
  return detail::node_to_string(e.root(), "z");
}

}  // namespace minlift
