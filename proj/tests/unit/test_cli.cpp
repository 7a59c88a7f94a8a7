#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsa/cli.hpp"
#include "dsa/diagnostics.hpp"

using namespace dsa;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dsa_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "cfg.json";
  std::ofstream(p) << text;
  return p;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "dsa");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  set_warning_handler([](const std::string&) {});
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data());
  set_warning_handler({});
  reset_warnings();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kSingle = R"({"name": "single", "geometry": {"kind": "single"},
  "usecase": {"kind": "beamsteer", "steer_deg": [0]}, "pattern": {"step_deg": 5}})";

const char* kSmallDisk = R"({"name": "small",
  "geometry": {"kind": "cylinder", "rings": 1},
  "usecase": {"kind": "beamsteer", "steer_deg": [30], "test_points": 36},
  "optimizer": {"ni": 20}, "pattern": {"step_deg": 2}})";

}  // namespace

TEST_CASE("pattern verb on a single dipole") {
  const fs::path d = scratch("single");
  const fs::path cfg = write_config(d, kSingle);
  REQUIRE(run({"pattern", "--config", cfg.string(), "--out", (d / "o").string()}) == kExitOk);
  const std::string csv = slurp(d / "o" / "pattern_steer0.csv");
  CHECK(csv.rfind("angle_deg,gain_db\n", 0) == 0);
  CHECK(csv.find("\n5,1.76091") != std::string::npos);
  const auto m = nlohmann::json::parse(slurp(d / "o" / "manifest.json"));
  CHECK(m["command"] == "pattern");
  CHECK(m["config"]["name"] == "single");
  CHECK(m["config_hash"].get<std::string>().size() == 16);
  CHECK(fs::exists(d / "o" / "summary.json"));
  CHECK(fs::exists(d / "o" / "solution_steer0.json"));
}

TEST_CASE("json output format") {
  const fs::path d = scratch("json");
  const fs::path cfg = write_config(d, kSingle);
  REQUIRE(run({"pattern", "--config", cfg.string(), "--out", d.string(), "--format", "json"}) ==
          kExitOk);
  const auto j = nlohmann::json::parse(slurp(d / "pattern_steer0.json"));
  CHECK(j.dump().find("angle_deg") != std::string::npos);
}

TEST_CASE("outputs are identical across thread counts") {
  const fs::path d = scratch("threads");
  const fs::path cfg = write_config(d, kSmallDisk);
  REQUIRE(run({"pattern", "--config", cfg.string(), "--out", (d / "t1").string(),
               "--threads", "1"}) == kExitOk);
  REQUIRE(run({"pattern", "--config", cfg.string(), "--out", (d / "t3").string(),
               "--threads", "3"}) == kExitOk);
  CHECK(slurp(d / "t1" / "pattern_steer30.csv") == slurp(d / "t3" / "pattern_steer30.csv"));
  const auto a = nlohmann::json::parse(slurp(d / "t1" / "solution_steer30.json"));
  const auto b = nlohmann::json::parse(slurp(d / "t3" / "solution_steer30.json"));
  CHECK(a["theta_hat"] == b["theta_hat"]);
}

TEST_CASE("seed override lands in the manifest") {
  const fs::path d = scratch("seed");
  const fs::path cfg = write_config(d, kSingle);
  REQUIRE(run({"pattern", "--config", cfg.string(), "--out", d.string(), "--seed", "42"}) ==
          kExitOk);
  const auto m = nlohmann::json::parse(slurp(d / "manifest.json"));
  CHECK(m["seed"] == 42);
}

TEST_CASE("configuration errors exit with code 2") {
  const fs::path d = scratch("bad");
  const fs::path cfg = write_config(d, R"({"geometry": {"kind": "ula", "bogus": 1}})");
  CHECK(run({"pattern", "--config", cfg.string(), "--out", d.string()}) == kExitConfig);
  CHECK(run({"pattern", "--config", (d / "missing.json").string()}) == kExitConfig);
  CHECK(run({"pattern"}) == kExitConfig);
  CHECK(run({"frobnicate", "--config", cfg.string()}) == kExitConfig);
  CHECK(run({"pattern", "--config", cfg.string(), "--format", "xml"}) == kExitConfig);
}

TEST_CASE("optimizer budget exhaustion exits with code 3") {
  const fs::path d = scratch("budget");
  const fs::path cfg = write_config(d, R"({"geometry": {"kind": "cylinder", "rings": 1},
    "usecase": {"steer_deg": [0], "test_points": 36},
    "optimizer": {"ni": 1, "nalt": 1, "digital_precoding": true},
    "pattern": {"step_deg": 10}})");
  CHECK(run({"pattern", "--config", cfg.string(), "--out", d.string()}) == kExitConvergence);
  const auto s = nlohmann::json::parse(slurp(d / "summary.json"));
  CHECK(s["converged"] == false);
}

TEST_CASE("rank deficiency exits with code 4") {
  const fs::path d = scratch("rank");
  const fs::path cfg = write_config(d, R"({"geometry": {"kind": "ula", "na": 4},
    "usecase": {"kind": "svd-mimo", "layers": 4,
                "scene": {"scatter_angles_deg": [10, 40], "align": [0, 1]}}})");
  CHECK(run({"mimo", "--config", cfg.string(), "--out", d.string()}) == kExitModel);
}

TEST_CASE("validate verb") {
  const fs::path d = scratch("validate");
  const fs::path cfg = write_config(d, R"({"geometry": {"kind": "random_disk", "ns": 8,
    "diameter_m": 0.02, "na": 2, "active_placement": "center_ring"}})");
  REQUIRE(run({"validate", "--config", cfg.string(), "--out", d.string()}) == kExitOk);
  const auto v = nlohmann::json::parse(slurp(d / "validate.json"));
  CHECK(v["pass"] == true);
  CHECK(v["checks"].size() == 6);
  CHECK(fs::exists(d / "Z.txt"));
  CHECK(fs::exists(d / "Wem.txt"));
}
