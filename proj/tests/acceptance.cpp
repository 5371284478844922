// Acceptance suite: one pass/fail line per criterion, exit 1 if any fail.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "minlift/minlift.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using minlift::catalog;
using minlift::Complex;
using minlift::DiskGrid;
using minlift::HarmonicMap;

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;

int g_failures = 0;

void record(int number, const std::string& label, bool ok, const std::string& detail) {
  std::printf("%s  criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", number, label.c_str(),
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

Complex expected_omega(const std::string& name, Complex z) {
  if (name == "enneper" || name == "scherk-singly") return z * z;
  if (name == "scherk-doubly" || name == "catenoid") return -z * z;
  return -z * z * z * z * z * z;
}

DiskGrid default_grid(const HarmonicMap& f) {
  return DiskGrid(100, 256, f.r_max > 0.98 ? 0.95 : 0.94);
}

struct FamilyDef {
  std::string from;
  std::string to;
  std::vector<double> schedule;
};

const std::vector<FamilyDef> kFamilies = {
    {"enneper", "scherk-singly", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}},
    {"scherk-doubly", "catenoid", {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}},
    {"enneper4", "noid4", {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0}},
};

// 1. max |omega - stated dilatation| <= 1e-12 on the full default grids.
void criterion_1() {
  double worst = 0.0;
  std::string worst_name;
  for (const auto& name : minlift::catalog_names()) {
    const HarmonicMap f = catalog(name);
    const DiskGrid grid = default_grid(f);
    for (const Complex z : grid.points) {
      const double err = std::abs(minlift::dilatation(f, z) - expected_omega(name, z));
      if (err > worst) {
        worst = err;
        worst_name = name;
      }
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail), "max |omega - omega_paper| = %.3e at %s, tol 1e-12",
                worst, worst_name.c_str());
  record(1, "dilatation identities", worst <= 1e-12, detail);
}

// 2. |omega_combine - omega_a| <= 1e-12 for all pairs and s in {0, 0.2, ..., 1}.
void criterion_2() {
  double worst = 0.0;
  for (const auto& fam : kFamilies) {
    const HarmonicMap a = catalog(fam.from);
    const HarmonicMap b = catalog(fam.to);
    const DiskGrid grid = default_grid(a.r_max < b.r_max ? a : b);
    for (const double s : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
      const HarmonicMap f3 = minlift::combine(a, b, s);
      for (const Complex z : grid.points)
        worst = std::max(worst,
                         std::abs(minlift::dilatation(f3, z) - minlift::dilatation(a, z)));
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "max |omega_3 - omega_a| = %.3e, tol 1e-12", worst);
  record(2, "combination dilatation invariance", worst <= 1e-12, detail);
}

// 3. Local univalence + HS on the CSS shear pass with min > 0 along both
//    convex sweeps.
void criterion_3() {
  bool ok = true;
  double weakest = 1e300;
  for (std::size_t fi = 0; fi < 2; ++fi) {
    const auto& fam = kFamilies[fi];
    const HarmonicMap a = catalog(fam.from);
    const HarmonicMap b = catalog(fam.to);
    const DiskGrid grid = default_grid(a);
    for (const double s : fam.schedule) {
      const HarmonicMap f = minlift::combine(a, b, s);
      const auto local = minlift::check_local_univalence(f, grid);
      const auto hs = minlift::check_hs(minlift::shear(f, kHalfPi), grid);
      ok = ok && local.passed && local.min_value > 0.0 && hs.passed && hs.min_value > 0.0;
      weakest = std::min({weakest, local.min_value, hs.min_value});
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "weakest sub-minimum = %.3e, required > 0", weakest);
  record(3, "convexity certificate along sweeps", ok, detail);
}

// 4. 64-node lift vs closed forms: 1e-9 (enneper), 1e-8 (other three oracles).
void criterion_4() {
  const auto points = minlift_test::random_disk_points(100, 0.9, 2024u);
  double worst_e = 0.0, worst_rest = 0.0;
  for (const std::string name : {"enneper", "scherk-singly", "scherk-doubly", "catenoid"}) {
    const minlift::Lifter lifter(catalog(name), 64);
    for (const Complex z : points) {
      const auto got = lifter.lift(z);
      const auto want = minlift::closed_form_oracle(name, z);
      const double err = std::max({std::abs(got.x1 - want.x1), std::abs(got.x2 - want.x2),
                                   std::abs(got.x3 - want.x3)});
      (name == "enneper" ? worst_e : worst_rest) =
          std::max(name == "enneper" ? worst_e : worst_rest, err);
    }
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "enneper err %.3e (tol 1e-9); scherk/catenoid err %.3e (tol 1e-8)", worst_e,
                worst_rest);
  record(4, "oracle agreement", worst_e <= 1e-9 && worst_rest <= 1e-8, detail);
}

// 5. Every family member: iso_dev/lambda <= 1e-9 (r <= 0.9 grid radius), and
//    |H| <= 1e-6 plus Laplacian residual <= 1e-5 at 50 random interior points.
void criterion_5() {
  double worst_iso = 0.0, worst_h = 0.0, worst_lap = 0.0;
  int meshes = 0;
  for (const auto& fam : kFamilies) {
    const HarmonicMap a = catalog(fam.from);
    const HarmonicMap b = catalog(fam.to);
    const DiskGrid grid = default_grid(a.r_max < b.r_max ? a : b);
    const auto family =
        minlift::lift_family(minlift::FamilySpec(a, b, fam.schedule), grid, 64);
    for (std::size_t mi = 0; mi < family.size(); ++mi) {
      ++meshes;
      const auto& mesh = family[mi].second;
      const double rim = 0.9 * grid.r_max;
      for (std::size_t i = 0; i < mesh.vertices.size(); ++i)
        if (std::abs(mesh.params[i]) <= rim)
          worst_iso = std::max(worst_iso, mesh.iso_dev[i] / mesh.lambda[i]);

      const HarmonicMap member = minlift::combine(a, b, family[mi].first);
      const auto pts =
          minlift_test::random_disk_points(50, 0.7 * member.r_max, 555u + (unsigned)mi);
      for (const Complex z : pts) {
        worst_h = std::max(worst_h, minlift::mean_curvature_estimate(member, z));
        worst_lap = std::max(worst_lap, minlift::laplacian_residual(member, z));
      }
    }
  }
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "%d meshes: iso/lambda %.3e (tol 1e-9), |H| %.3e (tol 1e-6), lap %.3e (tol 1e-5)",
                meshes, worst_iso, worst_h, worst_lap);
  record(5, "minimality of exported members", meshes == 16 && worst_iso <= 1e-9 &&
                                                  worst_h <= 1e-6 && worst_lap <= 1e-5,
         detail);
}

// 6. Simple boundary polyline (n = 2000, r = 0.9 r_max) and strictly positive
//    Jacobian on the interior grid for every family member.
void criterion_6() {
  bool ok = true;
  int members = 0;
  for (const auto& fam : kFamilies) {
    const HarmonicMap a = catalog(fam.from);
    const HarmonicMap b = catalog(fam.to);
    const DiskGrid grid = default_grid(a.r_max < b.r_max ? a : b);
    for (const double s : fam.schedule) {
      ++members;
      const HarmonicMap f = minlift::combine(a, b, s);
      const auto boundary = minlift::check_injectivity_boundary(f, 0.9 * f.r_max, 2000);
      const auto jacobian = minlift::check_local_univalence(f, grid);
      ok = ok && boundary.passed && jacobian.passed && jacobian.min_value > 0.0;
    }
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "%d members, boundary n=2000 at 0.9 r_max", members);
  record(6, "injectivity evidence", ok && members == 16, detail);
}

// 7. Four-fold symmetry identity error <= 1e-12 on rotation-compatible grids.
void criterion_7() {
  double worst = 0.0;
  for (const std::string name : {"enneper4", "noid4"}) {
    const HarmonicMap f = catalog(name);
    const auto rep = minlift::check_rotational_symmetry(f, 4, default_grid(f));
    worst = std::max(worst, -rep.min_value);
  }
  char detail[96];
  std::snprintf(detail, sizeof(detail), "max identity error = %.3e, tol 1e-12", worst);
  record(7, "four-fold symmetry", worst <= 1e-12, detail);
}

// 8. The documented negative results stay negative.
void criterion_8() {
  const HarmonicMap enneper = catalog("enneper");
  const DiskGrid grid = default_grid(enneper);
  const auto hs_minus = minlift::check_hs(enneper.h - enneper.g, grid);
  const auto hs_plus = minlift::check_hs(enneper.h + enneper.g, grid);
  const auto koepf_bad =
      minlift::check_koepf(minlift::AnalyticExpr::variable(), kHalfPi, 0.0, grid);
  const auto koepf_good =
      minlift::check_koepf(minlift::AnalyticExpr::variable(), kHalfPi, kHalfPi, grid);
  const bool ok = !hs_minus.passed && hs_minus.min_value < 0.0 && hs_plus.passed &&
                  !koepf_bad.passed && koepf_bad.min_value < 0.0 && koepf_good.passed;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "hs(h-g) min %.3g, hs(h+g) min %.3g, koepf(a=0) min %.3g, koepf(a=pi/2) min %.3g",
                hs_minus.min_value, hs_plus.min_value, koepf_bad.min_value,
                koepf_good.min_value);
  record(8, "documented negatives reproduce", ok, detail);
}

// 9. The CLI reproduces the three figure families deterministically in budget.
void criterion_9() {
  const std::string bin = MINLIFT_BIN_PATH;
  const fs::path base = fs::temp_directory_path() / "minlift_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);

  struct Sweep {
    std::string flags;
    std::string family;
    int files;
  };
  const std::vector<Sweep> sweeps = {
      {"--from enneper --to scherk-singly --steps 6", "enneper-to-scherk-singly", 6},
      {"--from scherk-doubly --to catenoid --steps 6", "scherk-doubly-to-catenoid", 6},
      {"--from enneper4 --to noid4 --steps 4 --rmax 0.94", "enneper4-to-noid4", 4},
  };

  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  int total_files = 0;
  for (const auto& run : {1, 2}) {
    for (const auto& sw : sweeps) {
      const fs::path out = base / ("run" + std::to_string(run)) / sw.family;
      const std::string cmd = bin + " sweep " + sw.flags + " --out " + out.string() + " > " +
                              (base / "sweep.log").string() + " 2>&1";
      const int rc = std::system(cmd.c_str());
      ok = ok && rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 2.0;

  // Count the run-1 OBJ files and compare both runs byte for byte.
  for (const auto& sw : sweeps) {
    const fs::path d1 = base / "run1" / sw.family;
    const fs::path d2 = base / "run2" / sw.family;
    int objs = 0;
    for (const auto& entry : fs::directory_iterator(d1)) {
      if (entry.path().extension() == ".obj") ++objs;
      std::ifstream f1(entry.path(), std::ios::binary);
      std::ifstream f2(d2 / entry.path().filename(), std::ios::binary);
      std::ostringstream s1, s2;
      s1 << f1.rdbuf();
      s2 << f2.rdbuf();
      ok = ok && f2.good() && s1.str() == s2.str();
    }
    ok = ok && objs == sw.files;
    total_files += objs;
  }
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "%d OBJ files (6+6+4), byte-identical re-run, %.1f s per pass (budget 60 s)",
                total_files, seconds);
  record(9, "figure reproduction via CLI", ok && total_files == 16 && seconds <= 60.0, detail);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures == 0) {
    std::printf("all 9 acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria FAILED\n", g_failures);
  return 1;
}
