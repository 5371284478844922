// minlift — harmonic-mapping catalog, univalence/convexity checks, and
// Weierstrass-Enneper minimal-surface sweeps.
//
// Exit codes: 0 pass, 1 criterion fail, 2 usage error, 3 numeric/domain error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "minlift/minlift.hpp"

namespace fs = std::filesystem;
using minlift::Complex;
using minlift::CriterionReport;
using minlift::DiskGrid;
using minlift::HarmonicMap;

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

// Default grid radius 0.95, tightened to 0.94 for the B(0, 0.95)-restricted entries.
double default_grid_rmax(const HarmonicMap& f) { return f.r_max > 0.98 ? 0.95 : 0.94; }

void write_text_atomic(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw minlift::IoError("cannot open for writing: " + tmp.string());
    os << text;
    os.flush();
    if (!os) throw minlift::IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw minlift::IoError("rename failed for " + path.string() + ": " + ec.message());
}

std::string fmt_complex_pair(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "(%.6g, %.6g)", z.real(), z.imag());
  return buf;
}

void print_report_table(const std::vector<CriterionReport>& reports) {
  std::printf("%-22s %-14s %-14s %-22s %-9s %s\n", "criterion", "grid", "min_value", "argmin",
              "tol", "passed");
  for (const auto& rep : reports) {
    char grid[32];
    std::snprintf(grid, sizeof(grid), "%dx%d@%.3g", rep.n_r, rep.n_theta, rep.grid_r_max);
    std::printf("%-22s %-14s %-14.6g %-22s %-9.3g %s\n", rep.criterion.c_str(), grid,
                rep.min_value, fmt_complex_pair(rep.argmin).c_str(), rep.tolerance,
                rep.passed ? "yes" : "no");
  }
}

// ---- catalog ----------------------------------------------------------------

int run_catalog(const std::string& json_path) {
  std::printf("%-14s %-42s %-42s %-10s %-7s %s\n", "name", "h", "g", "q", "omega", "r_max");
  auto maps = nlohmann::json::array();
  for (const auto& name : minlift::catalog_names()) {
    const HarmonicMap f = minlift::catalog(name);
    std::printf("%-14s %-42s %-42s %-10s %-7s %.2f\n", name.c_str(),
                minlift::to_string(f.h).c_str(), minlift::to_string(f.g).c_str(),
                minlift::to_string(f.q).c_str(), minlift::catalog_omega_label(name).c_str(),
                f.r_max);
    maps.push_back(minlift::map_to_json(f));
  }
  if (!json_path.empty()) {
    nlohmann::json out;
    out["maps"] = std::move(maps);
    write_text_atomic(json_path, out.dump(2) + "\n");
    std::printf("catalog written to %s\n", json_path.c_str());
  }
  return 0;
}

// ---- check ------------------------------------------------------------------

struct CheckOpts {
  std::string map_name;
  std::string pair;
  std::string criterion;
  double beta = kHalfPi;
  double alpha = std::numeric_limits<double>::quiet_NaN();
  int k = 4;
  int n_r = 100;
  int n_theta = 256;
  double grid_rmax = -1.0;
  double tol = minlift::kCriterionTol;
  double boundary_r = -1.0;
  int boundary_n = 2000;
  std::string phi_convention = "css";
  std::string json_path = "minlift_report.json";
};

minlift::AnalyticExpr shear_for(const HarmonicMap& f, const CheckOpts& opt) {
  if (opt.phi_convention == "paper") return f.h - f.g;
  return minlift::shear(f, opt.beta);
}

int run_check(const CheckOpts& opt) {
  const bool pair_criterion = opt.criterion == "dilatation-equal";
  if (pair_criterion && opt.pair.empty())
    throw minlift::UnknownName("criterion dilatation-equal requires --pair A,B");
  if (!pair_criterion && opt.map_name.empty())
    throw minlift::UnknownName("criterion " + opt.criterion + " requires --map NAME");
  if (opt.phi_convention != "css" && opt.phi_convention != "paper")
    throw minlift::UnknownName("--phi-convention must be css or paper");

  std::vector<CriterionReport> reports;
  nlohmann::json extra;

  if (pair_criterion) {
    const auto comma = opt.pair.find(',');
    if (comma == std::string::npos)
      throw minlift::UnknownName("--pair expects two comma-separated catalog names");
    const HarmonicMap a = minlift::catalog(opt.pair.substr(0, comma));
    const HarmonicMap b = minlift::catalog(opt.pair.substr(comma + 1));
    const double rmax = opt.grid_rmax > 0.0
                            ? opt.grid_rmax
                            : std::min(default_grid_rmax(a), default_grid_rmax(b));
    const DiskGrid grid(opt.n_r, opt.n_theta, rmax);
    const double gap = minlift::max_dilatation_gap(a, b, grid);
    CriterionReport rep;
    rep.criterion = "dilatation-equal";
    rep.n_r = grid.n_r;
    rep.n_theta = grid.n_theta;
    rep.grid_r_max = grid.r_max;
    rep.min_value = -gap;
    rep.argmin = {0.0, 0.0};
    rep.tolerance = minlift::kDilatationEqualTol;
    rep.passed = gap <= rep.tolerance;
    rep.parameters["max_gap"] = gap;
    reports.push_back(rep);
  } else {
    const HarmonicMap f = minlift::catalog(opt.map_name);
    const double rmax = opt.grid_rmax > 0.0 ? opt.grid_rmax : default_grid_rmax(f);
    const DiskGrid grid(opt.n_r, opt.n_theta, rmax);

    if (opt.criterion == "local-univalence") {
      reports.push_back(minlift::check_local_univalence(f, grid, opt.tol));
    } else if (opt.criterion == "hs") {
      reports.push_back(minlift::check_hs(shear_for(f, opt), grid, opt.tol));
    } else if (opt.criterion == "koepf") {
      const auto phi = shear_for(f, opt);
      reports.push_back(std::isnan(opt.alpha)
                            ? minlift::check_koepf_best_alpha(phi, opt.beta, grid, opt.tol)
                            : minlift::check_koepf(phi, opt.beta, opt.alpha, grid, opt.tol));
    } else if (opt.criterion == "taylor") {
      const double alpha = std::isnan(opt.alpha) ? 0.0 : opt.alpha;
      reports.push_back(minlift::check_taylor(shear_for(f, opt), opt.beta, alpha, grid, opt.tol));
    } else if (opt.criterion == "css") {
      reports.push_back(minlift::check_css_univalence(f, opt.beta, grid, opt.tol));
    } else if (opt.criterion == "symmetry") {
      reports.push_back(minlift::check_rotational_symmetry(f, opt.k, grid));
    } else if (opt.criterion == "injectivity") {
      const double r = opt.boundary_r > 0.0 ? opt.boundary_r : 0.9 * f.r_max;
      reports.push_back(minlift::check_injectivity_boundary(f, r, opt.boundary_n));
    } else if (opt.criterion == "hs-normalization") {
      const auto scans = minlift::hs_normalization_scan(shear_for(f, opt));
      std::printf("%-8s %-14s %-22s %-14s %-22s %s\n", "radius", "sup Re", "at", "inf Re", "at",
                  "near +1/-1");
      auto arr = nlohmann::json::array();
      for (const auto& s : scans) {
        std::printf("%-8.4f %-14.6g %-22s %-14.6g %-22s %s/%s\n", s.radius, s.sup_re,
                    fmt_complex_pair(s.arg_sup).c_str(), s.inf_re,
                    fmt_complex_pair(s.arg_inf).c_str(), s.sup_near_plus_one ? "yes" : "no",
                    s.inf_near_minus_one ? "yes" : "no");
        arr.push_back({{"radius", s.radius},
                       {"sup_re", s.sup_re},
                       {"arg_sup", {s.arg_sup.real(), s.arg_sup.imag()}},
                       {"inf_re", s.inf_re},
                       {"arg_inf", {s.arg_inf.real(), s.arg_inf.imag()}},
                       {"sup_near_plus_one", s.sup_near_plus_one},
                       {"inf_near_minus_one", s.inf_near_minus_one}});
      }
      extra["hs_normalization"] = std::move(arr);
    } else {
      throw minlift::UnknownName("unknown criterion: " + opt.criterion);
    }
  }

  nlohmann::json out;
  auto arr = nlohmann::json::array();
  for (const auto& rep : reports) arr.push_back(minlift::report_to_json(rep));
  out["reports"] = std::move(arr);
  if (!extra.empty()) out["diagnostics"] = extra;
  write_text_atomic(opt.json_path, out.dump(2) + "\n");

  if (!reports.empty()) print_report_table(reports);
  std::printf("report written to %s\n", opt.json_path.c_str());
  const bool all_passed =
      std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.passed; });
  return all_passed ? 0 : 1;
}

// ---- sweep ------------------------------------------------------------------

struct SweepOpts {
  std::string from;
  std::string to;
  int steps = 6;
  double grid_rmax = -1.0;
  int n_r = 100;
  int n_theta = 256;
  int nodes = minlift::kDefaultQuadNodes;
  std::string format = "obj";
  std::string out_dir = "out";
};

struct MemberVerdict {
  double s = 0.0;
  std::string file;
  CriterionReport jacobian;
  CriterionReport boundary;
  double max_iso_ratio = 0.0;
  double max_h = 0.0;
  double max_lap = 0.0;
  double css_min = 0.0;
  bool css_passed = false;
  bool passed = false;
};

int run_sweep(const SweepOpts& opt) {
  const HarmonicMap a = minlift::catalog(opt.from);
  const HarmonicMap b = minlift::catalog(opt.to);
  const minlift::MeshFormat format = minlift::mesh_format_from_string(opt.format);
  const double rmax = opt.grid_rmax > 0.0
                          ? opt.grid_rmax
                          : std::min(default_grid_rmax(a), default_grid_rmax(b));
  const DiskGrid grid(opt.n_r, opt.n_theta, rmax);

  const auto family = minlift::lift_family(minlift::make_family(a, b, opt.steps), grid, opt.nodes);
  fs::create_directories(opt.out_dir);

  std::vector<MemberVerdict> verdicts;
  for (std::size_t mi = 0; mi < family.size(); ++mi) {
    const double s = family[mi].first;
    const minlift::SurfaceMesh& mesh = family[mi].second;
    const HarmonicMap member = minlift::combine(a, b, s);

    MemberVerdict v;
    v.s = s;
    v.file = minlift::family_member_filename(mesh.name, s, format);
    minlift::export_mesh(mesh, format, fs::path(opt.out_dir) / v.file);

    v.jacobian = minlift::check_local_univalence(member, grid);
    v.boundary = minlift::check_injectivity_boundary(member, 0.9 * member.r_max, 2000);

    const double iso_rim = 0.9 * grid.r_max;
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
      if (std::abs(mesh.params[i]) <= iso_rim)
        v.max_iso_ratio = std::max(v.max_iso_ratio, mesh.iso_dev[i] / mesh.lambda[i]);
    }

    // Deterministic interior sample for the curvature/harmonicity diagnostics.
    std::mt19937 rng(1234u + static_cast<unsigned>(mi));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int taken = 0;
    while (taken < 50) {
      const double x = 2.0 * unif(rng) - 1.0;
      const double y = 2.0 * unif(rng) - 1.0;
      if (x * x + y * y > 1.0) continue;
      ++taken;
      const Complex z{0.7 * member.r_max * x, 0.7 * member.r_max * y};
      v.max_h = std::max(v.max_h, minlift::mean_curvature_estimate(member, z));
      v.max_lap = std::max(v.max_lap, minlift::laplacian_residual(member, z));
    }

    const CriterionReport css = minlift::check_css_univalence(member, kHalfPi, grid);
    v.css_min = css.min_value;
    v.css_passed = css.passed;

    v.passed = v.jacobian.passed && v.boundary.passed && v.max_iso_ratio <= 1e-9 &&
               v.max_h <= 1e-6 && v.max_lap <= 1e-5;
    verdicts.push_back(std::move(v));
  }

  nlohmann::json summary;
  summary["family"] = family.front().second.name;
  summary["from"] = opt.from;
  summary["to"] = opt.to;
  summary["grid"] = {{"n_r", grid.n_r}, {"n_theta", grid.n_theta}, {"r_max", grid.r_max}};
  summary["quad_nodes"] = opt.nodes;
  summary["format"] = opt.format;
  auto members = nlohmann::json::array();

  std::printf("%-6s %-44s %-12s %-9s %-10s %-10s %-10s %-14s %s\n", "s", "file", "jacobian",
              "boundary", "iso/lam", "max|H|", "max lap", "css(min)", "passed");
  bool all_passed = true;
  for (const auto& v : verdicts) {
    all_passed = all_passed && v.passed;
    std::printf("%-6.3f %-44s %-12.4g %-9s %-10.3g %-10.3g %-10.3g %-14.4g %s\n", v.s,
                v.file.c_str(), v.jacobian.min_value, v.boundary.passed ? "simple" : "CROSSES",
                v.max_iso_ratio, v.max_h, v.max_lap, v.css_min, v.passed ? "yes" : "NO");
    members.push_back({{"s", v.s},
                       {"file", v.file},
                       {"jacobian", minlift::report_to_json(v.jacobian)},
                       {"boundary", minlift::report_to_json(v.boundary)},
                       {"max_iso_ratio", v.max_iso_ratio},
                       {"max_mean_curvature", v.max_h},
                       {"max_laplacian_residual", v.max_lap},
                       {"css_min", v.css_min},
                       {"css_passed", v.css_passed},
                       {"passed", v.passed}});
  }
  summary["members"] = std::move(members);
  summary["all_passed"] = all_passed;

  const fs::path report =
      fs::path(opt.out_dir) / ("family_" + family.front().second.name + "_report.json");
  write_text_atomic(report, summary.dump(2) + "\n");
  std::printf("%zu mesh files and %s written to %s\n", verdicts.size(),
              report.filename().string().c_str(), opt.out_dir.c_str());
  return all_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minlift: harmonic mappings, convexity certificates, and minimal-surface lifts"};
  app.require_subcommand(1);
  app.footer("Environment: MINLIFT_THREADS caps internal parallelism.");

  std::string catalog_json;
  auto* cmd_catalog = app.add_subcommand("catalog", "list the six built-in harmonic mappings");
  cmd_catalog->add_option("--json", catalog_json, "also write the maps as an expression-tree JSON");

  CheckOpts check;
  auto* cmd_check = app.add_subcommand("check", "run a univalence/convexity criterion");
  cmd_check->add_option("--map", check.map_name, "catalog map name");
  cmd_check->add_option("--pair", check.pair, "two catalog names, comma separated");
  cmd_check
      ->add_option("--criterion", check.criterion,
                   "local-univalence|hs|koepf|taylor|css|dilatation-equal|symmetry|injectivity|"
                   "hs-normalization")
      ->required();
  cmd_check->add_option("--beta", check.beta, "direction angle (default pi/2)");
  cmd_check->add_option("--alpha", check.alpha, "Koepf/Taylor angle (default: search / 0)");
  cmd_check->add_option("--k", check.k, "rotational symmetry order (default 4)");
  cmd_check->add_option("--nr", check.n_r, "radial grid count (default 100)");
  cmd_check->add_option("--ntheta", check.n_theta, "angular grid count (default 256)");
  cmd_check->add_option("--rmax", check.grid_rmax, "grid radius (default 0.95; 0.94 four-fold)");
  cmd_check->add_option("--tol", check.tol, "criterion tolerance (default 1e-10)");
  cmd_check->add_option("--r", check.boundary_r, "boundary radius (default 0.9 r_max)");
  cmd_check->add_option("--n", check.boundary_n, "boundary samples (default 2000)");
  cmd_check->add_option("--phi-convention", check.phi_convention,
                        "css (h - e^{2ib}g) or paper (h - g); default css");
  cmd_check->add_option("--json", check.json_path, "report path (default minlift_report.json)");

  SweepOpts sweep;
  auto* cmd_sweep = app.add_subcommand("sweep", "lift a deformation family and export meshes");
  cmd_sweep->add_option("--from", sweep.from, "first endpoint")->required();
  cmd_sweep->add_option("--to", sweep.to, "second endpoint")->required();
  cmd_sweep->add_option("--steps", sweep.steps, "number of family members (default 6)");
  cmd_sweep->add_option("--rmax", sweep.grid_rmax, "grid radius (default 0.95; 0.94 four-fold)");
  cmd_sweep->add_option("--nr", sweep.n_r, "radial grid count (default 100)");
  cmd_sweep->add_option("--ntheta", sweep.n_theta, "angular grid count (default 256)");
  cmd_sweep->add_option("--nodes", sweep.nodes, "quadrature nodes (default 64)");
  cmd_sweep->add_option("--format", sweep.format, "obj|ply|csv|json (default obj)");
  cmd_sweep->add_option("--out", sweep.out_dir, "output directory (default out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*cmd_catalog) return run_catalog(catalog_json);
    if (*cmd_check) return run_check(check);
    if (*cmd_sweep) return run_sweep(sweep);
  } catch (const minlift::UnknownName& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const minlift::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
