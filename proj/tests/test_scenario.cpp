#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "mcflab/error.hpp"
#include "mcflab/scenario.hpp"

using namespace mcflab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mcflab_test_scenario_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json small_sphere(const fs::path& out) {
  return json{{"name", "small-sphere"},
              {"seed", 9},
              {"surface", {{"kind", "sphere"}, {"n", 3}, {"radius", 1.5}, {"samples", 201}}},
              {"diagnostics",
               json::array({{{"type", "models"}},
                            {{"type", "decompose"}, {"epsilon0", 0.1}, {"epsilon1", 0.05}, {"L", 5}},
                            {{"type", "noncollapse"}},
                            {{"type", "oracle"}, {"instances", 20}, {"dims", {3, 4}}, {"candidates", 2000}}})},
              {"out", out.string()}};
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("MCFLAB_CLI");
  REQUIRE(cli != nullptr);
  std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("parsing fills defaults and rejects bad input") {
  Scenario sc = parse_scenario(json{{"name", "c"}, {"surface", {{"kind", "cylinder"}, {"n", 4}}}, {"diagnostics", {{{"type", "decompose"}}}}});
  CHECK(sc.surface["radius"] == 1.0);
  CHECK(sc.surface["samples"] == 4001);
  CHECK(sc.diagnostics[0]["epsilon0"] == 0.1);
  CHECK(sc.diagnostics[0]["epsilon1"] == 0.05);

  auto bad = [](json j) {
    j["name"] = "bad";
    CHECK_THROWS_AS(parse_scenario(j), PreconditionError);
  };
  CHECK_THROWS_AS(parse_scenario(json{{"surface", {{"kind", "sphere"}, {"n", 3}}}, {"diagnostics", json::array()}}), PreconditionError);
  bad(json{{"surface", {{"kind", "torus"}, {"n", 3}}}, {"diagnostics", json::array()}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", 3}, {"radius", -1}}}, {"diagnostics", json::array()}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", 3}, {"colour", 1}}}, {"diagnostics", json::array()}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", 1}}}, {"diagnostics", json::array()}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", 3}}}, {"diagnostics", {{{"type", "decompose"}, {"epsilon0", 0.05}, {"epsilon1", 0.1}}}}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", 3}}}, {"diagnostics", {{{"type", "simulate"}}}}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", 3}}}, {"diagnostics", {{{"type", "nonsense"}}}}});
  bad(json{{"surface", {{"kind", "bowl"}, {"n", 3}, {"r_max", 10}, {"step", 0.1}}}, {"diagnostics", json::array()}});
  bad(json{{"surface", {{"kind", "sphere"}, {"n", "three"}}}, {"diagnostics", json::array()}});
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), PreconditionError);
}

TEST_CASE("scenario runs are reproducible") {
  fs::path a = scratch("a"), b = scratch("b");
  Scenario sa = parse_scenario(small_sphere(a)), sb = parse_scenario(small_sphere(b));
  RunResult ra = run_scenario(sa), rb = run_scenario(sb);
  CHECK(ra.exit_code == kExitOk);
  CHECK(ra.manifest["schema_version"] == kSchemaVersion);
  CHECK(ra.manifest["seed"] == 9);
  CHECK(ra.manifest["status"] == "ok");
  REQUIRE(ra.files == rb.files);
  CHECK(fs::exists(a / "manifest.json"));
  for (const auto& f : ra.files) {
    if (f == "manifest.json") continue;
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  json m = json::parse(slurp(a / "manifest.json"));
  CHECK(m["exit_code"] == 0);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("samples table") {
  fs::path d = scratch("csv");
  fs::create_directories(d);
  write_samples_csv(sphere_surface(3, 1.0, 11), (d / "s.csv").string());
  std::ifstream f(d / "s.csv");
  std::string header, row;
  std::getline(f, header);
  CHECK(header == "sample,arclength,z,r,lambda1,lambda2,lambda3,H");
  size_t rows = 0;
  while (std::getline(f, row)) ++rows;
  CHECK(rows == 11);
  fs::remove_all(d);
}

TEST_CASE("command line exit codes") {
  const char* src = std::getenv("MCFLAB_SOURCE");
  REQUIRE(src != nullptr);
  fs::path out = scratch("cli_malformed");
  CHECK(run_cli("run --config " + std::string(src) + "/scenarios/malformed-eps.json --out " + out.string()) == kExitPrecondition);
  CHECK_FALSE(fs::exists(out));
  fs::path ok = scratch("cli_models");
  CHECK(run_cli("models --model sphere --n 4 --out " + ok.string()) == kExitOk);
  CHECK(fs::exists(ok / "manifest.json"));
  CHECK(run_cli("decompose --model sphere --eps0 0.05 --eps1 0.1 --out " + scratch("cli_eps").string()) == kExitPrecondition);
  CHECK(run_cli("no-such-command") == kExitPrecondition);
  fs::remove_all(ok);
}
