#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "minlift/criteria.hpp"
#include "minlift/errors.hpp"
#include "minlift/grid.hpp"
#include "minlift/lift.hpp"
#include "minlift/mappings.hpp"
#include "minlift/parallel.hpp"

namespace minlift {

inline constexpr double kCurvatureStep = 1e-4;
// Five-point truncation is step^2 * |x''''|; 1e-4 keeps the residual below
// 1e-5 for |z| <= 0.8 r_max on every catalog surface (1e-3 does not).
inline constexpr double kLaplacianStep = 1e-4;

// Quad face; d = -1 marks an origin-fan triangle.
struct MeshFace {
  int a = 0;
  int b = 0;
  int c = 0;
  int d = -1;
  bool is_quad() const { return d >= 0; }
};

// Sampled lift over a polar disk grid with per-vertex diagnostics.
struct SurfaceMesh {
  std::string name;
  int n_r = 0;
  int n_theta = 0;
  double grid_r_max = 0.0;
  int quad_nodes = 0;
  std::vector<Complex> params;
  std::vector<SurfacePoint> vertices;
  std::vector<MeshFace> faces;
  std::vector<double> lambda;   // conformal factor |x_u|^2
  std::vector<double> iso_dev;  // max(|x_u . x_v|, ||x_u|^2 - |x_v|^2|)
  std::vector<double> h_est;    // |H| estimate
};

namespace detail {

inline double dot3(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline Vec3 sub3(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline Vec3 scale3(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

// |H| from the fundamental forms; second partials by central differences of
// the analytic first partials.
inline double mean_curvature_from_lifter(const Lifter& lifter, Complex z, double step) {
  const Complex du{step, 0.0};
  const Complex dv{0.0, step};
  const LiftPartials at = lifter.partials(z);
  const LiftPartials pu = lifter.partials(z + du);
  const LiftPartials mu = lifter.partials(z - du);
  const LiftPartials pv = lifter.partials(z + dv);
  const LiftPartials mv = lifter.partials(z - dv);

  const double inv2s = 1.0 / (2.0 * step);
  const Vec3 xuu = scale3(sub3(pu.xu, mu.xu), inv2s);
  const Vec3 xuv = scale3(sub3(pv.xu, mv.xu), inv2s);
  const Vec3 xvv = scale3(sub3(pv.xv, mv.xv), inv2s);

  const double E = dot3(at.xu, at.xu);
  const double F = dot3(at.xu, at.xv);
  const double G = dot3(at.xv, at.xv);
  Vec3 n = cross3(at.xu, at.xv);
  const double nn = std::sqrt(dot3(n, n));
  if (!(nn > 0.0)) throw DomainError("degenerate tangent plane in curvature estimate");
  n = scale3(n, 1.0 / nn);

  const double e = dot3(n, xuu);
  const double f = dot3(n, xuv);
  const double g = dot3(n, xvv);
  const double denom = 2.0 * (E * G - F * F);
  if (!(std::abs(denom) > 0.0)) throw DomainError("singular first fundamental form");
  return std::abs((e * G - 2.0 * f * F + g * E) / denom);
}

}  // namespace detail

// |H| at z with second partials by central finite differences (default step 1e-4).
inline double mean_curvature_estimate(const HarmonicMap& f, Complex z,
                                      double step = kCurvatureStep) {
  if (!(std::abs(z) + 2.0 * step < f.r_max))
    throw DomainError("curvature stencil leaves |z| < r_max");
  return detail::mean_curvature_from_lifter(Lifter(f), z, step);
}

// Max over the three coordinates of the five-point-stencil Laplacian magnitude.
inline double laplacian_residual_fn(const std::function<SurfacePoint(Complex)>& x, Complex z,
                                    double step = kLaplacianStep) {
  const Complex du{step, 0.0};
  const Complex dv{0.0, step};
  const SurfacePoint c = x(z);
  const SurfacePoint e = x(z + du);
  const SurfacePoint w = x(z - du);
  const SurfacePoint n = x(z + dv);
  const SurfacePoint s = x(z - dv);
  const double inv_s2 = 1.0 / (step * step);
  const double r1 = std::abs((e.x1 + w.x1 + n.x1 + s.x1 - 4.0 * c.x1) * inv_s2);
  const double r2 = std::abs((e.x2 + w.x2 + n.x2 + s.x2 - 4.0 * c.x2) * inv_s2);
  const double r3 = std::abs((e.x3 + w.x3 + n.x3 + s.x3 - 4.0 * c.x3) * inv_s2);
  return std::max({r1, r2, r3});
}

inline double laplacian_residual(const HarmonicMap& f, Complex z, double step = kLaplacianStep) {
  if (!(std::abs(z) + step < f.r_max)) throw DomainError("Laplacian stencil leaves |z| < r_max");
  const Lifter lifter(f);
  return laplacian_residual_fn([&](Complex w) { return lifter.lift(w); }, z, step);
}

// Lifts every grid point and fills the per-vertex diagnostics. First partials
// are analytic (from h', g', q); only the x3 value requires quadrature.
inline SurfaceMesh build_mesh(const HarmonicMap& f, const DiskGrid& grid,
                              int quad_nodes = kDefaultQuadNodes) {
  if (!(grid.r_max < f.r_max))
    throw DomainError("mesh grid must stay strictly inside |z| < r_max of the map");
  const Lifter lifter(f, quad_nodes);

  SurfaceMesh mesh;
  mesh.name = f.name;
  mesh.n_r = grid.n_r;
  mesh.n_theta = grid.n_theta;
  mesh.grid_r_max = grid.r_max;
  mesh.quad_nodes = quad_nodes;
  mesh.params = grid.points;
  mesh.vertices.resize(grid.size());
  mesh.lambda.resize(grid.size());
  mesh.iso_dev.resize(grid.size());
  mesh.h_est.resize(grid.size());

  detail::parallel_for(grid.size(), [&](std::size_t idx) {
    const Complex z = grid.points[idx];
    mesh.vertices[idx] = lifter.lift(z);
    const LiftPartials p = lifter.partials(z);
    const double lu = detail::dot3(p.xu, p.xu);
    const double lv = detail::dot3(p.xv, p.xv);
    mesh.lambda[idx] = lu;
    mesh.iso_dev[idx] = std::max(std::abs(detail::dot3(p.xu, p.xv)), std::abs(lu - lv));
    const double step = std::min(kCurvatureStep, 0.25 * (f.r_max - std::abs(z)));
    mesh.h_est[idx] = detail::mean_curvature_from_lifter(lifter, z, step);
  });

  // Origin fan, then ring quads; CCW in the parameter plane.
  mesh.faces.reserve(static_cast<std::size_t>(grid.n_r) * grid.n_theta);
  for (int k = 0; k < grid.n_theta; ++k) {
    const int k1 = (k + 1) % grid.n_theta;
    mesh.faces.push_back({0, static_cast<int>(grid.index_of(1, k)),
                          static_cast<int>(grid.index_of(1, k1)), -1});
  }
  for (int j = 1; j < grid.n_r; ++j) {
    for (int k = 0; k < grid.n_theta; ++k) {
      const int k1 = (k + 1) % grid.n_theta;
      mesh.faces.push_back(
          {static_cast<int>(grid.index_of(j, k)), static_cast<int>(grid.index_of(j + 1, k)),
           static_cast<int>(grid.index_of(j + 1, k1)), static_cast<int>(grid.index_of(j, k1))});
    }
  }
  return mesh;
}

// One mesh per schedule entry; deterministic ordering by s then grid index.
inline std::vector<std::pair<double, SurfaceMesh>> lift_family(
    const FamilySpec& family, const DiskGrid& grid, int quad_nodes = kDefaultQuadNodes) {
  const DiskGrid check = detail::dilatation_check_grid(family.endpoint_a, family.endpoint_b);
  if (!check_dilatation_equal(family.endpoint_a, family.endpoint_b, check))
    throw DilatationMismatch("family endpoints " + family.endpoint_a.name + " and " +
                             family.endpoint_b.name + " have unequal dilatations");
  std::vector<std::pair<double, SurfaceMesh>> out;
  out.reserve(family.parameters.size());
  for (const double s : family.parameters) {
    SurfaceMesh mesh = build_mesh(combine(family.endpoint_a, family.endpoint_b, s), grid, quad_nodes);
    mesh.name = family.endpoint_a.name + "-to-" + family.endpoint_b.name;
    out.emplace_back(s, std::move(mesh));
  }
  return out;
}

// ---- export -----------------------------------------------------------------

enum class MeshFormat { Obj, Ply, Csv, Json };

inline MeshFormat mesh_format_from_string(std::string_view s) {
  if (s == "obj") return MeshFormat::Obj;
  if (s == "ply") return MeshFormat::Ply;
  if (s == "csv") return MeshFormat::Csv;
  if (s == "json") return MeshFormat::Json;
  throw UnknownName("unknown mesh format: " + std::string(s));
}

inline std::string mesh_format_extension(MeshFormat f) {
  switch (f) {
    case MeshFormat::Obj: return "obj";
    case MeshFormat::Ply: return "ply";
    case MeshFormat::Csv: return "csv";
    case MeshFormat::Json: return "json";
  }
  throw Error("corrupt mesh format");
}

namespace detail {

inline std::string fixed9(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9f", x);
  return buf;
}

inline std::string shortest(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_obj(std::ostream& os, const SurfaceMesh& m) {
  for (const SurfacePoint& p : m.vertices)
    os << "v " << fixed9(p.x1) << " " << fixed9(p.x2) << " " << fixed9(p.x3) << "\n";
  for (const MeshFace& f : m.faces) {
    os << "f " << f.a + 1 << " " << f.b + 1 << " " << f.c + 1;
    if (f.is_quad()) os << " " << f.d + 1;
    os << "\n";
  }
}

inline void write_ply(std::ostream& os, const SurfaceMesh& m) {
  os << "ply\nformat ascii 1.0\n";
  os << "element vertex " << m.vertices.size() << "\n";
  os << "property double x\nproperty double y\nproperty double z\n";
  os << "property double lambda\nproperty double iso_dev\nproperty double h_est\n";
  os << "element face " << m.faces.size() << "\n";
  os << "property list uchar int vertex_indices\nend_header\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const SurfacePoint& p = m.vertices[i];
    os << fixed9(p.x1) << " " << fixed9(p.x2) << " " << fixed9(p.x3) << " "
       << shortest(m.lambda[i]) << " " << shortest(m.iso_dev[i]) << " " << shortest(m.h_est[i])
       << "\n";
  }
  for (const MeshFace& f : m.faces) {
    if (f.is_quad())
      os << "4 " << f.a << " " << f.b << " " << f.c << " " << f.d << "\n";
    else
      os << "3 " << f.a << " " << f.b << " " << f.c << "\n";
  }
}

inline void write_csv(std::ostream& os, const SurfaceMesh& m) {
  os << "z_re,z_im,x1,x2,x3,lambda,iso_dev,h_est\n";
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    const SurfacePoint& p = m.vertices[i];
    os << shortest(m.params[i].real()) << "," << shortest(m.params[i].imag()) << ","
       << shortest(p.x1) << "," << shortest(p.x2) << "," << shortest(p.x3) << ","
       << shortest(m.lambda[i]) << "," << shortest(m.iso_dev[i]) << "," << shortest(m.h_est[i])
       << "\n";
  }
}

}  // namespace detail

inline nlohmann::json mesh_to_json(const SurfaceMesh& m) {
  nlohmann::json j;
  j["name"] = m.name;
  j["grid"] = {{"n_r", m.n_r}, {"n_theta", m.n_theta}, {"r_max", m.grid_r_max}};
  j["quad_nodes"] = m.quad_nodes;
  auto params = nlohmann::json::array();
  for (const Complex z : m.params) params.push_back({z.real(), z.imag()});
  j["params"] = std::move(params);
  auto vertices = nlohmann::json::array();
  for (const SurfacePoint& p : m.vertices) vertices.push_back({p.x1, p.x2, p.x3});
  j["vertices"] = std::move(vertices);
  auto faces = nlohmann::json::array();
  for (const MeshFace& f : m.faces) {
    if (f.is_quad())
      faces.push_back({f.a, f.b, f.c, f.d});
    else
      faces.push_back({f.a, f.b, f.c});
  }
  j["faces"] = std::move(faces);
  j["lambda"] = m.lambda;
  j["iso_dev"] = m.iso_dev;
  j["h_est"] = m.h_est;
  return j;
}

inline SurfaceMesh mesh_from_json(const nlohmann::json& j) {
  SurfaceMesh m;
  m.name = j.at("name").get<std::string>();
  m.n_r = j.at("grid").at("n_r").get<int>();
  m.n_theta = j.at("grid").at("n_theta").get<int>();
  m.grid_r_max = j.at("grid").at("r_max").get<double>();
  m.quad_nodes = j.at("quad_nodes").get<int>();
  for (const auto& p : j.at("params")) m.params.emplace_back(p[0].get<double>(), p[1].get<double>());
  for (const auto& v : j.at("vertices"))
    m.vertices.push_back({v[0].get<double>(), v[1].get<double>(), v[2].get<double>()});
  for (const auto& f : j.at("faces")) {
    if (f.size() == 4)
      m.faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>(), f[3].get<int>()});
    else
      m.faces.push_back({f[0].get<int>(), f[1].get<int>(), f[2].get<int>(), -1});
  }
  m.lambda = j.at("lambda").get<std::vector<double>>();
  m.iso_dev = j.at("iso_dev").get<std::vector<double>>();
  m.h_est = j.at("h_est").get<std::vector<double>>();
  if (m.vertices.size() != m.params.size() || m.vertices.size() != m.lambda.size() ||
      m.vertices.size() != m.iso_dev.size() || m.vertices.size() != m.h_est.size())
    throw Error("mesh arrays disagree in length");
  return m;
}

// Byte-deterministic export; written to a temp file then renamed into place.
inline void export_mesh(const SurfaceMesh& m, MeshFormat format,
                        const std::filesystem::path& path) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + tmp.string());
    switch (format) {
      case MeshFormat::Obj: detail::write_obj(os, m); break;
      case MeshFormat::Ply: detail::write_ply(os, m); break;
      case MeshFormat::Csv: detail::write_csv(os, m); break;
      case MeshFormat::Json: os << mesh_to_json(m).dump() << "\n"; break;
    }
    os.flush();
    if (!os) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed for " + path.string() + ": " + ec.message());
}

inline SurfaceMesh import_mesh_json(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open for reading: " + path.string());
  nlohmann::json j;
  is >> j;
  return mesh_from_json(j);
}

// family_{name}_s{percent}.{ext}; percent is the rounded, zero-padded schedule value.
inline std::string family_member_filename(const std::string& family_name, double s,
                                          MeshFormat format) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%03d", static_cast<int>(std::lround(100.0 * s)));
  return "family_" + family_name + "_s" + buf + "." + mesh_format_extension(format);
}

}  // namespace minlift
