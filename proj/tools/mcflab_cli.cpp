#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "mcflab/scenario.hpp"

using nlohmann::json;
using namespace mcflab;

namespace {

struct Common {
  std::string config, out, model;
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<double> L, eps0, eps1;
  std::optional<double> gamma1, gamma2, eta0, eta2;
  std::optional<long> instances, candidates, centers;
  std::optional<std::string> c0_source;
};

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cli_reporting", "load_scenario", "cannot read " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw PreconditionError("cli_reporting", "load_scenario", std::string("malformed JSON: ") + e.what());
  }
}

json default_surface(const std::string& cmd, const std::string& model) {
  std::string m = model;
  if (m.empty()) {
    if (cmd == "simulate" || cmd == "gamma-estimate" || cmd == "parabolic-check") m = "dumbbell";
    else if (cmd == "detect-necks" || cmd == "decompose" || cmd == "noncollapse") m = "bowl";
    else m = "sphere";
  }
  if (m == "sphere" || m == "cylinder" || m == "bowl") return {{"kind", m}};
  if (m == "dumbbell")
    return {{"kind", "flow"},
            {"initial", {{"type", "dumbbell"}, {"N", 600}}},
            {"flow", {{"t_end", 0.02}, {"dt_accuracy", 0.002}, {"snapshot_interval", 0.002}}}};
  throw PreconditionError("cli_reporting", "parse_scenario", "--model must be sphere, cylinder, bowl or dumbbell");
}

json find_diag(const json& cfg, const std::string& type) {
  if (cfg.contains("diagnostics") && cfg["diagnostics"].is_array())
    for (const auto& d : cfg["diagnostics"])
      if (d.is_object() && d.value("type", "") == type) return d;
  return {{"type", type}};
}

void apply_flags(json& d, const Common& c) {
  const std::string t = d["type"];
  if (t == "detect-necks") {
    if (c.eps0) d["epsilon"] = *c.eps0;
    if (c.L) d["L"] = *c.L;
  } else if (t == "decompose") {
    if (c.eps0) d["epsilon0"] = *c.eps0;
    if (c.eps1) d["epsilon1"] = *c.eps1;
    if (c.L) d["L"] = *c.L;
    if (c.c0_source) d["C0_source"] = *c.c0_source;
  } else if (t == "constants") {
    if (c.gamma1) d["gamma1"] = *c.gamma1;
    if (c.gamma2) d["gamma2"] = *c.gamma2;
    if (c.eta0) d["eta0"] = *c.eta0;
    if (c.eta2) d["eta2"] = *c.eta2;
    if (c.L) d["L"] = *c.L;
    if (c.eps0) d["epsilon0"] = *c.eps0;
  } else if (t == "oracle") {
    if (c.instances) d["instances"] = *c.instances;
    if (c.candidates) d["candidates"] = *c.candidates;
  } else if (t == "parabolic-check") {
    if (c.centers) d["centers"] = *c.centers;
  }
}

// Scenario JSON for one subcommand: the surface and matching diagnostic from
// --config when given, then flag overrides.
json scenario_for(const std::string& cmd, const Common& c) {
  json cfg = c.config.empty() ? json::object() : read_json(c.config);
  if (!cfg.is_object()) throw PreconditionError("cli_reporting", "parse_scenario", "config must be a JSON object");
  json sc;
  sc["name"] = cfg.value("name", cmd);
  if (cfg.contains("seed")) sc["seed"] = cfg["seed"];
  if (cfg.contains("out")) sc["out"] = cfg["out"];
  if (cmd == "run") {
    if (c.config.empty()) throw PreconditionError("cli_reporting", "parse_scenario", "run needs --config");
    sc = cfg;
    if (sc.contains("diagnostics") && sc["diagnostics"].is_array())
      for (auto& d : sc["diagnostics"])
        if (d.is_object() && d.contains("type")) apply_flags(d, c);
  } else {
    sc["surface"] = cfg.contains("surface") && c.model.empty() ? cfg["surface"] : default_surface(cmd, c.model);
    json diags = json::array();
    if (cmd == "models") {
      diags.push_back({{"type", "models"}});
    } else if (cmd == "simulate") {
      diags.push_back(find_diag(cfg, "simulate"));
    } else if (cmd == "noncollapse") {
      diags.push_back(find_diag(cfg, "decompose"));
      diags.push_back({{"type", "noncollapse"}});
    } else {
      json d = find_diag(cfg, cmd);
      if (cmd == "decompose" && (c.c0_source ? *c.c0_source : d.value("C0_source", "")) == "bundle")
        diags.push_back(find_diag(cfg, "constants"));
      diags.push_back(d);
    }
    sc["diagnostics"] = diags;
  }
  if (c.n) sc["surface"]["n"] = *c.n;
  if (c.seed) sc["seed"] = *c.seed;
  if (!c.out.empty()) sc["out"] = c.out;
  if (sc.contains("diagnostics") && cmd != "run")
    for (auto& d : sc["diagnostics"]) apply_flags(d, c);
  return sc;
}

void print_error(const Error& e) {
  json j = {{"status", "failed"},
            {"error", {{"module", e.module()}, {"operation", e.op()}, {"reason", e.reason()}, {"kind", e.kind()}}}};
  std::cerr << j.dump(2) << '\n';
}

void print_outputs(const std::string& cmd, const Scenario& sc, const RunResult& r) {
  auto slurp = [&](const std::string& f) {
    std::ifstream in(sc.out_dir + "/" + f);
    std::cout << in.rdbuf();
  };
  auto has = [&](const std::string& f) { return std::find(r.files.begin(), r.files.end(), f) != r.files.end(); };
  if (cmd == "constants" && has("constants.json")) return slurp("constants.json");
  if (cmd == "oracle" && has("oracle.csv")) return slurp("oracle.csv");
  json j = {{"status", r.manifest.value("status", "")},
            {"exit_code", r.exit_code},
            {"out", sc.out_dir},
            {"results", r.manifest.value("results", json::array())}};
  if (r.manifest.contains("error")) j["error"] = r.manifest["error"];
  std::cout << j.dump(2) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for mean-convex mean curvature flow"};
  app.require_subcommand(1);
  Common c;
  const std::vector<std::pair<std::string, std::string>> cmds = {
      {"run", "Run every diagnostic of a scenario file"},
      {"simulate", "Evolve a rotationally symmetric profile"},
      {"models", "Sample model solutions (sphere, cylinder, bowl)"},
      {"detect-necks", "Pointwise neck detection"},
      {"decompose", "Neck/cap decomposition"},
      {"noncollapse", "Inscribed radii and noncollapsing bounds"},
      {"constants", "Constant bundle from gamma1, gamma2, eta0, eta2, L"},
      {"oracle", "Batch validation of the two-frame claim"},
      {"gamma-estimate", "Measure gamma1 and gamma2 along a trajectory"},
      {"parabolic-check", "Curvature control in parabolic neighbourhoods"}};
  for (const auto& [name, help] : cmds) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("--config", c.config, "Scenario JSON file")->check(CLI::ExistingFile);
    s->add_option("--seed", c.seed, "Random seed");
    s->add_option("--out", c.out, "Output directory");
    s->add_option("--n", c.n, "Dimension n");
    s->add_option("--L", c.L, "Neck length / structure L");
    s->add_option("--eps0", c.eps0, "Neck accuracy epsilon0");
    s->add_option("--eps1", c.eps1, "Transition accuracy epsilon1");
    if (name != "run" && name != "oracle" && name != "constants")
      s->add_option("--model", c.model, "sphere | cylinder | bowl | dumbbell (ignores the config surface)");
    if (name == "constants" || name == "run" || name == "decompose") {
      s->add_option("--gamma1", c.gamma1);
      s->add_option("--gamma2", c.gamma2);
      s->add_option("--eta0", c.eta0);
      s->add_option("--eta2", c.eta2);
    }
    if (name == "decompose" || name == "run") s->add_option("--C0-source", c.c0_source, "measured | bundle");
    if (name == "oracle" || name == "run") {
      s->add_option("--instances", c.instances, "Instances per dimension");
      s->add_option("--candidates", c.candidates, "Brute-force candidates per search");
    }
    if (name == "parabolic-check" || name == "run") s->add_option("--centers", c.centers, "Spacetime centres");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitPrecondition;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    Scenario sc = parse_scenario(scenario_for(cmd, c));
    RunResult r = run_scenario(sc);
    print_outputs(cmd, sc, r);
    return r.exit_code;
  } catch (const Error& e) {
    print_error(e);
    return e.exit_code();
  } catch (const json::exception& e) {
    print_error(PreconditionError("cli_reporting", "parse_scenario", e.what()));
    return kExitPrecondition;
  }
}
