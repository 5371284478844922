#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minlift/mappings.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kBin = MINLIFT_BIN_PATH;

fs::path work_dir() {
  const auto dir = fs::temp_directory_path() / "minlift_cli_tests";
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& stdout_file) {
  const std::string cmd = kBin + " " + args + " > " + stdout_file.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("catalog lists the six mappings") {
  const auto out = work_dir() / "catalog.txt";
  REQUIRE(run_cli("catalog", out) == 0);
  const std::string text = slurp(out);

  int rows = 0;
  std::istringstream is(text);
  std::string line;
  std::string enneper_row, noid_row;
  while (std::getline(is, line)) {
    if (line.rfind("name", 0) == 0) continue;
    if (!line.empty()) ++rows;
    if (line.rfind("enneper ", 0) == 0) enneper_row = line;
    if (line.rfind("noid4", 0) == 0) noid_row = line;
  }
  REQUIRE(rows == 6);
  REQUIRE(enneper_row.find(" z^2 ") != std::string::npos);
  REQUIRE(noid_row.find("0.95") != std::string::npos);
}

TEST_CASE("catalog --json round-trips through the expression schema") {
  const auto dir = work_dir();
  const auto json = dir / "catalog.json";
  REQUIRE(run_cli("catalog --json " + json.string(), dir / "catalog2.txt") == 0);

  nlohmann::json doc;
  std::ifstream(json) >> doc;
  REQUIRE(doc.at("maps").size() == 6);
  // Every serialized map parses back and evaluates.
  for (const auto& mj : doc["maps"]) {
    const auto f = minlift::map_from_json(mj);
    REQUIRE(std::abs(minlift::eval_map(f, {0.25, 0.1})) > 0.0);
  }
}

TEST_CASE("check writes machine-readable reports and exit codes") {
  const auto dir = work_dir();
  const auto json = dir / "hs.json";

  SECTION("hs on the enneper shear passes") {
    REQUIRE(run_cli("check --map enneper --criterion hs --beta 1.5708 --json " + json.string(),
                    dir / "hs.txt") == 0);
    nlohmann::json rep;
    std::ifstream(json) >> rep;
    REQUIRE(rep.at("reports").size() == 1);
    REQUIRE(rep["reports"][0].at("passed").get<bool>());
    // beta is only given to 4 decimals, which perturbs the ideal 1 - r^4 bound.
    REQUIRE(rep["reports"][0].at("min_value").get<double>() >=
            1.0 - std::pow(0.95, 4) - 1e-5);
  }

  SECTION("unequal dilatations exit 1") {
    REQUIRE(run_cli("check --pair enneper,scherk-doubly --criterion dilatation-equal --json " +
                        (dir / "pair.json").string(),
                    dir / "pair.txt") == 1);
  }

  SECTION("four-fold symmetry passes") {
    REQUIRE(run_cli("check --map enneper4 --criterion symmetry --k 4 --json " +
                        (dir / "sym.json").string(),
                    dir / "sym.txt") == 0);
  }

  SECTION("paper phi-convention reproduces the documented failure") {
    REQUIRE(run_cli("check --map enneper --criterion hs --phi-convention paper --json " +
                        (dir / "paper.json").string(),
                    dir / "paper.txt") == 1);
  }
}

TEST_CASE("usage and numeric error exit codes") {
  const auto dir = work_dir();
  REQUIRE(run_cli("check --map enneper --criterion no-such-thing", dir / "e1.txt") == 2);
  REQUIRE(run_cli("check --map helicoid --criterion hs", dir / "e2.txt") == 2);
  REQUIRE(run_cli("frobnicate", dir / "e3.txt") == 2);
  REQUIRE(run_cli("check --criterion hs", dir / "e4.txt") == 2);
  // Boundary radius at r_max is a domain error.
  REQUIRE(run_cli("check --map enneper --criterion injectivity --r 0.99", dir / "e5.txt") == 3);
  REQUIRE(run_cli("sweep --from enneper --to catenoid --steps 2 --nr 4 --ntheta 8 --out " +
                      (dir / "bad_sweep").string(),
                  dir / "e6.txt") == 3);
}

TEST_CASE("sweep exports deterministic families") {
  const auto dir = work_dir();
  const auto out1 = dir / "sweep1";
  const auto out2 = dir / "sweep2";
  fs::remove_all(out1);
  fs::remove_all(out2);

  const std::string flags =
      "sweep --from scherk-doubly --to catenoid --steps 3 --nr 24 --ntheta 48 --out ";
  REQUIRE(run_cli(flags + out1.string(), dir / "s1.txt") == 0);
  REQUIRE(run_cli(flags + out2.string(), dir / "s2.txt") == 0);

  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(out1)) names.push_back(entry.path().filename());
  std::sort(names.begin(), names.end());
  REQUIRE(names.size() == 4);  // 3 meshes + report
  REQUIRE(names[0] == "family_scherk-doubly-to-catenoid_report.json");
  REQUIRE(names[1] == "family_scherk-doubly-to-catenoid_s000.obj");
  REQUIRE(names[2] == "family_scherk-doubly-to-catenoid_s050.obj");
  REQUIRE(names[3] == "family_scherk-doubly-to-catenoid_s100.obj");

  for (const auto& name : names) {
    REQUIRE(slurp(out1 / name) == slurp(out2 / name));
  }

  nlohmann::json report;
  std::ifstream(out1 / names[0]) >> report;
  REQUIRE(report.at("all_passed").get<bool>());
  REQUIRE(report.at("members").size() == 3);
  for (const auto& m : report["members"]) {
    REQUIRE(m.at("passed").get<bool>());
    REQUIRE(m.at("max_iso_ratio").get<double>() <= 1e-9);
  }
}

TEST_CASE("thread count does not change the output bytes") {
  const auto dir = work_dir();
  const auto out1 = dir / "threads1";
  const auto out4 = dir / "threads4";
  fs::remove_all(out1);
  fs::remove_all(out4);

  const std::string flags =
      " sweep --from enneper --to scherk-singly --steps 2 --nr 32 --ntheta 64 --out ";
  const std::string log = " > /dev/null 2>&1";
  REQUIRE(std::system(("MINLIFT_THREADS=1 " + kBin + flags + out1.string() + log).c_str()) == 0);
  REQUIRE(std::system(("MINLIFT_THREADS=4 " + kBin + flags + out4.string() + log).c_str()) == 0);

  int compared = 0;
  for (const auto& entry : fs::directory_iterator(out1)) {
    REQUIRE(slurp(entry.path()) == slurp(out4 / entry.path().filename()));
    ++compared;
  }
  REQUIRE(compared == 3);
}
