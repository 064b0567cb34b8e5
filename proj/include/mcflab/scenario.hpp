#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcflab/neck.hpp"
#include "mcflab/profile.hpp"
#include "mcflab/surface.hpp"

namespace mcflab {

constexpr int kSchemaVersion = 1;

// Exit codes shared by the CLI and scenario runs.
enum ExitCode { kExitOk = 0, kExitPrecondition = 2, kExitCheckFailed = 3, kExitCoverage = 4 };

struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json surface;                   // validated surface spec
  std::vector<nlohmann::json> diagnostics;  // validated, defaults filled in
  std::string out_dir;
};

// Validates every parameter up front and fills defaults; throws
// PreconditionError before anything is computed.
Scenario parse_scenario(const nlohmann::json& config);
Scenario load_scenario(const std::string& path);

// Built surface plus the trajectory when the surface comes from a flow.
struct BuiltSurface {
  SampledSurface surface;
  std::optional<FlowTrajectory> trajectory;
  std::optional<BowlProfile> bowl;
};
BuiltSurface build_surface(const nlohmann::json& spec);
RotSymProfile initial_profile(const nlohmann::json& spec);

struct RunResult {
  int exit_code = kExitOk;
  std::vector<std::string> files;  // relative to out_dir
  nlohmann::json manifest;
};

// Writes CSV tables, JSON reports and manifest.json into out_dir.
RunResult run_scenario(const Scenario& sc);

// Model tables: arclength, position, lambda_1..lambda_n, H.
void write_samples_csv(const SampledSurface& s, const std::string& path);

nlohmann::json to_json(const DecompositionReport& r, const SampledSurface& s);
nlohmann::json to_json(const NeckCertificate& c);

}  // namespace mcflab
