#include "mcflab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "mcflab/constants.hpp"
#include "mcflab/flow_diagnostics.hpp"
#include "mcflab/frame_oracle.hpp"
#include "mcflab/models.hpp"
#include "mcflab/noncollapsing.hpp"

namespace mcflab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void bad(const std::string& what) { throw PreconditionError("cli_reporting", "parse_scenario", what); }

// JSON has no infinity or NaN.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) bad(where + ": unknown key '" + it.key() + "'");
}

double get_num(json& j, const char* key, double def, const std::string& where) {
  if (!j.contains(key)) j[key] = def;
  if (!j[key].is_number()) bad(where + "." + key + " must be a number");
  return j[key].get<double>();
}

double positive(json& j, const char* key, double def, const std::string& where) {
  double v = get_num(j, key, def, where);
  if (!(v > 0) || !std::isfinite(v)) bad(where + "." + key + " must be positive");
  return v;
}

long integer(json& j, const char* key, long def, long lo, const std::string& where) {
  if (!j.contains(key)) j[key] = def;
  if (!j[key].is_number_integer()) bad(where + "." + key + " must be an integer");
  long v = j[key].get<long>();
  if (v < lo) bad(where + "." + key + " must be >= " + std::to_string(lo));
  return v;
}

void validate_flow_surface(json& s) {
  only_keys(s, "surface", {"kind", "n", "initial", "flow", "snapshot", "periods", "jets"});
  int n = int(integer(s, "n", 3, 2, "surface"));
  if (!s.contains("initial")) bad("surface.initial is required for kind flow");
  json& in = s["initial"];
  only_keys(in, "surface.initial",
            {"type", "N", "radius", "length", "boundary", "a_axial", "b_radial", "half_length", "tube", "bulb",
             "junction", "width"});
  std::string type = in.value("type", "");
  integer(in, "N", 400, 16, "surface.initial");
  if (type == "cylinder") {
    positive(in, "radius", 1.0, "surface.initial");
    positive(in, "length", 10.0, "surface.initial");
    if (!in.contains("boundary")) in["boundary"] = "periodic";
    std::string b = in["boundary"].get<std::string>();
    if (b != "periodic" && b != "clamped") bad("surface.initial.boundary must be periodic or clamped");
  } else if (type == "sphere") {
    positive(in, "radius", 1.0, "surface.initial");
  } else if (type == "spheroid") {
    positive(in, "a_axial", 1.5, "surface.initial");
    positive(in, "b_radial", 1.0, "surface.initial");
  } else if (type == "dumbbell") {
    DumbbellParams d;
    double X = positive(in, "half_length", d.half_length, "surface.initial");
    double a = positive(in, "tube", d.tube, "surface.initial");
    double R = positive(in, "bulb", d.bulb, "surface.initial");
    double xj = positive(in, "junction", d.junction, "surface.initial");
    positive(in, "width", d.width, "surface.initial");
    if (!(a < R) || !(xj < X)) bad("surface.initial: dumbbell needs tube < bulb and junction < half_length");
  } else {
    bad("surface.initial.type must be cylinder, sphere, spheroid or dumbbell");
  }
  if (!s.contains("flow")) s["flow"] = json::object();
  json& f = s["flow"];
  only_keys(f, "surface.flow",
            {"t_end", "dt_max", "dt_accuracy", "snapshot_interval", "min_radius_threshold", "neck_ratio",
             "stop_on_event", "scheme"});
  positive(f, "t_end", 0.1, "surface.flow");
  positive(f, "dt_max", 1e-3, "surface.flow");
  positive(f, "dt_accuracy", 0.01, "surface.flow");
  if (get_num(f, "snapshot_interval", 0.0, "surface.flow") < 0) bad("surface.flow.snapshot_interval must be >= 0");
  if (get_num(f, "min_radius_threshold", 0.0, "surface.flow") < 0) bad("surface.flow.min_radius_threshold must be >= 0");
  double nr = get_num(f, "neck_ratio", 0.0, "surface.flow");
  if (nr < 0 || nr >= 1) bad("surface.flow.neck_ratio must be in [0, 1)");
  if (!f.contains("stop_on_event")) f["stop_on_event"] = true;
  if (!f.contains("scheme")) f["scheme"] = "semi_implicit";
  std::string sch = f["scheme"].get<std::string>();
  if (sch != "semi_implicit" && sch != "explicit_euler") bad("surface.flow.scheme must be semi_implicit or explicit_euler");
  if (!s.contains("snapshot")) s["snapshot"] = "last";
  if (!(s["snapshot"] == "last") && !s["snapshot"].is_number_integer()) bad("surface.snapshot must be \"last\" or an index");
  long periods = integer(s, "periods", 1, 1, "surface");
  if (periods > 1 && type != "cylinder") bad("surface.periods > 1 needs a periodic cylinder");
  if (!s.contains("jets")) s["jets"] = json::object();
  json& jt = s["jets"];
  only_keys(jt, "surface.jets", {"stencil_scale", "pole_exclusion"});
  positive(jt, "stencil_scale", 0.15, "surface.jets");
  positive(jt, "pole_exclusion", 0.5, "surface.jets");
  (void)n;
}

void validate_surface(json& s) {
  if (!s.is_object() || !s.contains("kind")) bad("surface.kind is required");
  std::string kind = s["kind"].get<std::string>();
  if (kind == "sphere") {
    only_keys(s, "surface", {"kind", "n", "radius", "samples"});
    integer(s, "n", 3, 2, "surface");
    positive(s, "radius", 1.0, "surface");
    integer(s, "samples", 2001, 3, "surface");
  } else if (kind == "cylinder") {
    only_keys(s, "surface", {"kind", "n", "radius", "half_length", "samples"});
    integer(s, "n", 3, 2, "surface");
    positive(s, "radius", 1.0, "surface");
    positive(s, "half_length", 40.0, "surface");
    integer(s, "samples", 4001, 3, "surface");
  } else if (kind == "bowl") {
    only_keys(s, "surface", {"kind", "n", "r_max", "step", "stride"});
    integer(s, "n", 3, 2, "surface");
    double rmax = positive(s, "r_max", 400.0, "surface");
    double step = positive(s, "step", 0.1, "surface");
    if (step > rmax / 1000.0) bad("surface.step must be <= r_max/1000");
    integer(s, "stride", 1, 1, "surface");
  } else if (kind == "flow") {
    validate_flow_surface(s);
  } else {
    bad("surface.kind must be sphere, cylinder, bowl or flow");
  }
}

void validate_diagnostic(json& d, const json& surface) {
  if (!d.is_object() || !d.contains("type")) bad("diagnostic.type is required");
  const std::string t = d["type"].get<std::string>();
  const std::string w = "diagnostic " + t;
  const bool flow = surface["kind"] == "flow";
  if (t == "detect-necks") {
    only_keys(d, w, {"type", "epsilon", "L", "stride"});
    positive(d, "epsilon", 0.1, w);
    positive(d, "L", 5.0, w);
    integer(d, "stride", 1, 1, w);
  } else if (t == "decompose") {
    only_keys(d, w, {"type", "epsilon0", "epsilon1", "L", "C0_source"});
    double e0 = positive(d, "epsilon0", 0.1, w);
    double e1 = positive(d, "epsilon1", 0.05, w);
    if (!(e1 < e0)) bad(w + ": epsilon1 must be smaller than epsilon0");
    positive(d, "L", 5.0, w);
    if (!d.contains("C0_source")) d["C0_source"] = "measured";
    if (d["C0_source"] != "measured" && d["C0_source"] != "bundle") bad(w + ".C0_source must be measured or bundle");
  } else if (t == "noncollapse") {
    only_keys(d, w, {"type"});
  } else if (t == "constants") {
    only_keys(d, w, {"type", "gamma1", "gamma2", "eta0", "eta2", "L", "epsilon0", "L_detect"});
    for (const char* k : {"gamma1", "gamma2"}) {
      if (!d.contains(k)) d[k] = "measured";
      if (!(d[k] == "measured")) {
        if (!d[k].is_number() || d[k].get<double>() < 0) bad(w + "." + k + " must be \"measured\" or >= 0");
      }
    }
    if (!d.contains("eta0")) d["eta0"] = "calibrated";
    if (!(d["eta0"] == "calibrated")) positive(d, "eta0", 0.01, w);
    positive(d, "eta2", 0.01, w);
    positive(d, "L", 100.0, w);
    positive(d, "epsilon0", 0.1, w);
    positive(d, "L_detect", 5.0, w);
  } else if (t == "oracle") {
    only_keys(d, w, {"type", "instances", "dims", "candidates", "tol"});
    integer(d, "instances", 1000, 1, w);
    if (!d.contains("dims")) d["dims"] = {3, 4, 5, 6};
    for (auto& x : d["dims"])
      if (!x.is_number_integer() || x.get<int>() < 3 || x.get<int>() > 16) bad(w + ".dims entries must be in 3..16");
    integer(d, "candidates", 50000, 100, w);
    positive(d, "tol", 1e-6, w);
  } else if (t == "gamma-estimate") {
    only_keys(d, w, {"type", "snapshot_stride"});
    integer(d, "snapshot_stride", 1, 1, w);
  } else if (t == "parabolic-check") {
    only_keys(d, w, {"type", "centers", "snapshot_stride"});
    if (!flow) bad(w + " needs a flow surface");
    integer(d, "centers", 20, 1, w);
    integer(d, "snapshot_stride", 1, 1, w);
  } else if (t == "simulate") {
    only_keys(d, w, {"type", "every"});
    if (!flow) bad(w + " needs a flow surface");
    integer(d, "every", 10, 1, w);
  } else if (t == "models") {
    only_keys(d, w, {"type"});
  } else {
    bad("unknown diagnostic type '" + t + "'");
  }
}

Scenario parse_impl(const json& config) {
  json c = config;
  only_keys(c, "scenario", {"name", "seed", "surface", "diagnostics", "out", "schema_version"});
  if (c.contains("schema_version") && c["schema_version"] != kSchemaVersion) bad("unsupported schema_version");
  Scenario sc;
  if (!c.contains("name") || !c["name"].is_string() || c["name"].get<std::string>().empty()) bad("name is required");
  sc.name = c["name"].get<std::string>();
  if (c.contains("seed")) {
    if (!c["seed"].is_number_unsigned() && !(c["seed"].is_number_integer() && c["seed"].get<long>() >= 0))
      bad("seed must be a non-negative integer");
    sc.seed = c["seed"].get<std::uint64_t>();
  }
  if (!c.contains("surface")) bad("surface is required");
  sc.surface = c["surface"];
  validate_surface(sc.surface);
  if (c.contains("diagnostics")) {
    if (!c["diagnostics"].is_array()) bad("diagnostics must be an array");
    for (auto d : c["diagnostics"]) {
      validate_diagnostic(d, sc.surface);
      sc.diagnostics.push_back(d);
    }
  }
  sc.out_dir = c.value("out", std::string("out/") + sc.name);
  return sc;
}

}  // namespace

Scenario parse_scenario(const json& config) {
  try {
    return parse_impl(config);
  } catch (const json::exception& e) {
    bad(std::string("wrong value type: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cli_reporting", "load_scenario", "cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw PreconditionError("cli_reporting", "load_scenario", std::string("malformed JSON: ") + e.what());
  }
  return parse_scenario(j);
}

RotSymProfile initial_profile(const json& s) {
  const json& in = s.at("initial");
  const int n = s.at("n").get<int>();
  const size_t N = in.at("N").get<size_t>();
  const std::string type = in.at("type").get<std::string>();
  if (type == "cylinder")
    return cylinder_profile(n, in.at("radius").get<double>(), in.at("length").get<double>(), N,
                            in.at("boundary") == "periodic" ? Boundary::periodic : Boundary::clamped);
  if (type == "sphere") return sphere_profile(n, in.at("radius").get<double>(), N);
  if (type == "spheroid") return spheroid_profile(n, in.at("a_axial").get<double>(), in.at("b_radial").get<double>(), N);
  DumbbellParams d;
  d.half_length = in.at("half_length").get<double>();
  d.tube = in.at("tube").get<double>();
  d.bulb = in.at("bulb").get<double>();
  d.junction = in.at("junction").get<double>();
  d.width = in.at("width").get<double>();
  return dumbbell_profile(n, d, N);
}

BuiltSurface build_surface(const json& s) {
  const std::string kind = s.at("kind").get<std::string>();
  const int n = s.at("n").get<int>();
  if (kind == "sphere") return {sphere_surface(n, s.at("radius").get<double>(), s.at("samples").get<size_t>()), {}, {}};
  if (kind == "cylinder")
    return {cylinder_surface(n, s.at("radius").get<double>(), s.at("half_length").get<double>(), s.at("samples").get<size_t>()),
            {},
            {}};
  if (kind == "bowl") {
    BowlProfile b = bowl_profile(n, s.at("r_max").get<double>(), s.at("step").get<double>());
    SampledSurface S = bowl_surface(b, kMaxDerivativeOrder, s.at("stride").get<size_t>());
    return {std::move(S), {}, std::move(b)};
  }
  const json& f = s.at("flow");
  FlowSettings fs;
  fs.t_end = f.at("t_end").get<double>();
  fs.dt_max = f.at("dt_max").get<double>();
  fs.dt_accuracy = f.at("dt_accuracy").get<double>();
  fs.snapshot_interval = f.at("snapshot_interval").get<double>();
  fs.min_radius_threshold = f.at("min_radius_threshold").get<double>();
  fs.neck_ratio = f.at("neck_ratio").get<double>();
  fs.stop_on_event = f.at("stop_on_event").get<bool>();
  fs.options.scheme = f.at("scheme") == "explicit_euler" ? Scheme::explicit_euler : Scheme::semi_implicit;
  FlowTrajectory traj = simulate(initial_profile(s), fs);
  size_t k = traj.snapshots.size() - 1;
  if (s.at("snapshot").is_number_integer()) {
    long want = s.at("snapshot").get<long>();
    if (want < 0 || size_t(want) >= traj.snapshots.size())
      throw PreconditionError("cli_reporting", "build_surface", "snapshot index beyond the trajectory");
    k = size_t(want);
  }
  JetOptions jo;
  jo.stencil_scale = s.at("jets").at("stencil_scale").get<double>();
  jo.pole_exclusion = s.at("jets").at("pole_exclusion").get<double>();
  SampledSurface S = profile_surface(traj.snapshots[k], jo, s.at("periods").get<int>());
  return {std::move(S), std::move(traj), {}};
}

void write_samples_csv(const SampledSurface& S, const std::string& path) {
  std::ofstream o(path);
  o << "sample,arclength,z,r";
  for (int i = 1; i <= S.n; ++i) o << ",lambda" << i;
  o << ",H\n";
  for (size_t i = 0; i < S.size(); ++i) {
    CurvatureSpectrum sp = S.spectrum(i);
    o << i << ',' << fmt(S.s[i]) << ',' << fmt(S.z[i]) << ',' << fmt(S.r[i]);
    for (double l : sp.lambdas) o << ',' << fmt(l);
    o << ',' << fmt(sp.H) << '\n';
  }
}

json to_json(const NeckCertificate& c) {
  std::vector<double> ax(c.axis.data(), c.axis.data() + c.axis.size());
  const NeckCriteria& k = c.criteria;
  return {{"center", c.center},
          {"epsilon_achieved", num(c.epsilon_achieved)},
          {"L", c.L},
          {"axis", ax},
          {"radius_scale", num(c.radius_scale)},
          {"criteria",
           {{"ratio_lambda1", num(k.ratio_lambda1)},
            {"ratio_gap", num(k.ratio_gap)},
            {"derivative_sum", num(k.derivative_sum)},
            {"graph_c0", num(k.graph_c0)},
            {"graph_c1", num(k.graph_c1)},
            {"graph_c2", num(k.graph_c2)},
            {"skipped", k.skipped}}}};
}

json to_json(const DecompositionReport& r, const SampledSurface& S) {
  json caps = json::array();
  for (const auto& c : r.caps)
    caps.push_back({{"first", c.samples.front()},
                    {"last", c.samples.back()},
                    {"size", c.samples.size()},
                    {"contains_pole", c.contains_pole},
                    {"touches_boundary", c.touches_boundary},
                    {"diameter", c.diameter},
                    {"H_min", c.H_min},
                    {"H_max", c.H_max},
                    {"min_lambda1_over_H", c.min_lambda1_over_H}});
  json doms = json::array();
  for (const auto& d : r.domains) {
    json j = {{"pole", d.pole}, {"transition_found", d.transition_found}};
    if (d.transition_found) {
      j["transition"] = d.transition;
      j["transition_H"] = S.H(d.transition);
      j["first"] = d.lo;
      j["last"] = d.hi;
      j["diameter"] = d.diameter;
      j["C0"] = num(d.C0);
    }
    doms.push_back(j);
  }
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"status", c.status}, {"margin", num(c.margin)}, {"detail", c.detail}});
  return {{"schema_version", kSchemaVersion},
          {"topology", r.topology},
          {"samples", S.size()},
          {"neck_count", r.neck_points.size()},
          {"uncovered_count", r.uncovered.size()},
          {"neck_fraction", r.neck_fraction},
          {"strictly_convex", r.strictly_convex},
          {"caps", caps},
          {"transition_points", r.transition_points},
          {"cap_domains", doms},
          {"C0_measured", num(r.C0_measured)},
          {"checks", checks}};
}

namespace {

struct Runner {
  const Scenario& sc;
  fs::path dir;
  RunResult res;
  BuiltSurface built;
  std::optional<GammaEstimate> gammas;
  std::optional<DecompositionReport> decomposition;
  std::optional<ConstantBundle> bundle;
  bool check_failed = false;
  json diag_summaries = json::array();

  std::string path(const std::string& name) {
    res.files.push_back(name);
    return (dir / name).string();
  }
  void write_json(const std::string& name, const json& j) {
    std::ofstream o(path(name));
    o << j.dump(2) << '\n';
  }
  const SampledSurface& S() const { return built.surface; }

  GammaEstimate& need_gammas(size_t stride) {
    if (!gammas) gammas = built.trajectory ? estimate_gammas(*built.trajectory, stride) : estimate_gammas(S());
    return *gammas;
  }

  json run_detect(const json& d) {
    const double eps = d["epsilon"].get<double>(), L = d["L"].get<double>();
    const size_t stride = d["stride"].get<size_t>();
    std::ofstream o(path("necks.csv"));
    o << "sample,arclength,z,r,H,epsilon_achieved,status,reason,ratio_lambda1,ratio_gap,derivative_sum,graph_c0,graph_c1,graph_c2\n";
    std::vector<NeckCertificate> accepted;
    size_t n_acc = 0, n_rej = 0, n_unc = 0;
    for (size_t i = 0; i < S().size(); i += stride) {
      o << i << ',' << fmt(S().s[i]) << ',' << fmt(S().z[i]) << ',' << fmt(S().r[i]) << ',' << fmt(S().H(i)) << ',';
      try {
        NeckDecision dec = detect_neck(S(), i, eps, L);
        const NeckCriteria& k = dec.certificate.criteria;
        o << fmt(dec.certificate.epsilon_achieved) << ',' << (dec.accepted ? "accepted" : "rejected") << ','
          << dec.reason << ',' << fmt(k.ratio_lambda1) << ',' << fmt(k.ratio_gap) << ',' << fmt(k.derivative_sum)
          << ',' << fmt(k.graph_c0) << ',' << fmt(k.graph_c1) << ',' << fmt(k.graph_c2) << '\n';
        if (dec.accepted) {
          ++n_acc;
          accepted.push_back(dec.certificate);
        } else {
          ++n_rej;
        }
      } catch (const CoverageError& e) {
        ++n_unc;
        o << ",uncovered,coverage,,,,,,\n";
      }
    }
    json j = {{"schema_version", kSchemaVersion}, {"epsilon", eps}, {"L", L}, {"accepted", n_acc},
              {"rejected", n_rej}, {"uncovered", n_unc}};
    if (accepted.size() >= 2) {
      AlignmentResult a = axis_alignment_check(accepted);
      double limit = std::max(5.0 * a.max_epsilon, 2.0 * M_PI / 180.0);
      bool ok = a.max_angle <= limit;
      check_failed = check_failed || !ok;
      j["alignment"] = {{"max_angle_deg", a.max_angle * 180.0 / M_PI}, {"max_epsilon", a.max_epsilon},
                        {"C", num(a.C)}, {"pairs", a.pairs}, {"limit_deg", limit * 180.0 / M_PI},
                        {"status", ok ? "pass" : "fail"}};
    }
    write_json("necks.json", j);
    return j;
  }

  json run_decompose(const json& d) {
    double C0b = 0.0;
    if (d["C0_source"] == "bundle") {
      if (!bundle) throw PreconditionError("cli_reporting", "decompose", "C0_source bundle needs an earlier constants diagnostic");
      C0b = bundle->C0;
    }
    DecompositionReport r = decompose(S(), d["epsilon0"].get<double>(), d["epsilon1"].get<double>(), d["L"].get<double>(), C0b);
    std::ofstream o(path("classification.csv"));
    o << "sample,arclength,z,r,H,lambda1_over_H,quality,class\n";
    for (size_t i = 0; i < S().size(); ++i)
      o << i << ',' << fmt(S().s[i]) << ',' << fmt(S().z[i]) << ',' << fmt(S().r[i]) << ',' << fmt(S().H(i)) << ','
        << fmt(S().lambda1(i) / S().H(i)) << ',' << fmt(r.quality[i]) << ',' << to_string(r.classes[i]) << '\n';
    json j = to_json(r, S());
    j["epsilon0"] = d["epsilon0"];
    j["epsilon1"] = d["epsilon1"];
    j["L"] = d["L"];
    for (const auto& c : r.checks) check_failed = check_failed || c.status == "fail";
    write_json("decomposition.json", j);
    decomposition = std::move(r);
    return {{"topology", j["topology"]}, {"caps", j["caps"].size()}, {"C0_measured", j["C0_measured"]}};
  }

  json run_noncollapse() {
    AlphaProfile a = alpha_profile(S());
    std::ofstream o(path("noncollapse.csv"));
    o << "sample,H,r_in,alpha\n";
    for (size_t i = 0; i < S().size(); ++i)
      o << i << ',' << fmt(S().H(i)) << ',' << (a.valid[i] ? fmt(a.r_in[i]) : "") << ','
        << (a.valid[i] ? fmt(a.alpha[i]) : "") << '\n';
    json j = {{"schema_version", kSchemaVersion}, {"min_alpha", num(a.min_alpha)}, {"argmin", a.argmin},
              {"excluded", a.excluded}, {"bounds", json::array()}};
    auto bound = [&](const std::string& name, double alpha, const std::vector<size_t>& samples) {
      NoncollapsingResult v = verify_noncollapsing(S(), a, alpha, samples);
      check_failed = check_failed || !v.pass;
      j["bounds"].push_back({{"name", name}, {"alpha", alpha}, {"checked", v.checked}, {"excluded", v.excluded},
                             {"worst_sample", v.worst}, {"worst_margin", num(v.worst_margin)},
                             {"status", v.pass ? "pass" : "fail"}});
    };
    if (decomposition) {
      const int n = S().n;
      if (!decomposition->neck_points.empty()) bound("neck_inscribed", (n - 1) / 8.0, decomposition->neck_points);
      std::vector<size_t> cap;
      for (const auto& D : decomposition->domains)
        if (D.transition_found)
          for (size_t i = D.lo; i <= D.hi; ++i) cap.push_back(i);
      if (!cap.empty() && std::isfinite(decomposition->C0_measured))
        bound("cap_alpha_tilde", cap_alpha_bound(decomposition->C0_measured).alpha_tilde, cap);
    }
    write_json("noncollapse.json", j);
    return {{"min_alpha", j["min_alpha"]}};
  }

  json run_constants(const json& d) {
    auto gam = [&](const char* k, bool first) {
      if (d[k] == "measured") {
        GammaEstimate& g = need_gammas(1);
        return first ? g.gamma1 : g.gamma2;
      }
      return d[k].get<double>();
    };
    double g1 = gam("gamma1", true), g2 = gam("gamma2", false);
    json extra = json::object();
    double eta0;
    if (d["eta0"] == "calibrated") {
      std::vector<double> etas;
      for (int e = -60; e <= -5; ++e) etas.push_back(std::pow(10.0, e / 10.0));
      EtaCalibration cal = calibrate_eta({&S()}, d["epsilon0"].get<double>(), d["L_detect"].get<double>(), etas);
      if (!(cal.eta0 > 0))
        throw PreconditionError("constants_ledger", "calibrate_eta", "no eta in 1e-6..0.3 makes every candidate a neck");
      eta0 = cal.eta0;
      extra["eta0_calibration"] = {{"epsilon0", d["epsilon0"]}, {"L", d["L_detect"]}, {"eta0", eta0}};
    } else {
      eta0 = d["eta0"].get<double>();
    }
    ConstantBundle b = make_bundle(S().n, g1, g2, eta0, d["eta2"].get<double>(), d["L"].get<double>());
    json j = to_json(b);
    j["schema_version"] = kSchemaVersion;
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    // Curvature lower bound along random meridian pairs.
    std::mt19937_64 rng(sc.seed);
    std::uniform_int_distribution<size_t> U(0, S().size() - 1);
    size_t pairs = 0, viol = 0;
    for (int t = 0; t < 1000; ++t) {
      size_t p = U(rng), q = U(rng);
      if (!(S().H(p) > 0)) continue;
      double dist = std::abs(S().s[p] - S().s[q]);
      if (S().start == EndKind::pole) dist = std::min(dist, S().s[p] + S().s[q] - 2 * S().s[0]);
      if (S().end == EndKind::pole) dist = std::min(dist, 2 * S().s.back() - S().s[p] - S().s[q]);
      ++pairs;
      if (S().H(q) < curvature_lower_bound(S().H(p), dist, S().n, b.gamma1) * (1 - 1e-9)) ++viol;
    }
    j["curvature_lower_bound"] = {{"pairs", pairs}, {"violations", viol}, {"status", viol == 0 ? "pass" : "fail"}};
    check_failed = check_failed || viol > 0;
    write_json("constants.json", j);
    bundle = b;
    return {{"C0", j["C0"]}, {"C0_attained_by", b.C0_attained_by}};
  }

  json run_oracle(const json& d) {
    std::ofstream o(path("oracle.csv"));
    o << "n,instances,members,analytic_disagreements,brute_disagreements,candidates,status\n";
    json rows = json::array();
    bool ok = true;
    for (const auto& x : d["dims"]) {
      int n = x.get<int>();
      ClaimValidation c = validate_claim(n, d["instances"].get<long>(), sc.seed + std::uint64_t(n),
                                         d["candidates"].get<long>(), d["tol"].get<double>());
      bool pass = c.analytic_disagreements == 0 && c.brute_disagreements == 0;
      ok = ok && pass;
      o << n << ',' << c.instances << ',' << c.members << ',' << c.analytic_disagreements << ','
        << c.brute_disagreements << ',' << c.candidates << ',' << (pass ? "pass" : "fail") << '\n';
      rows.push_back({{"n", n}, {"instances", c.instances}, {"members", c.members},
                      {"analytic_disagreements", c.analytic_disagreements},
                      {"brute_disagreements", c.brute_disagreements}, {"candidates", c.candidates},
                      {"status", pass ? "pass" : "fail"}});
    }
    check_failed = check_failed || !ok;
    json j = {{"schema_version", kSchemaVersion}, {"tol", d["tol"]}, {"results", rows}};
    write_json("oracle.json", j);
    return {{"status", ok ? "pass" : "fail"}};
  }

  json run_gammas(const json& d) {
    GammaEstimate& g = need_gammas(d["snapshot_stride"].get<size_t>());
    json j = {{"schema_version", kSchemaVersion}, {"gamma1", g.gamma1}, {"gamma2", g.gamma2},
              {"samples", g.samples}, {"excluded", g.excluded}};
    write_json("gammas.json", j);
    return {{"gamma1", g.gamma1}, {"gamma2", g.gamma2}};
  }

  json run_parabolic(const json& d) {
    GammaEstimate& g = need_gammas(d["snapshot_stride"].get<size_t>());
    ParabolicSweep sw = parabolic_sweep(*built.trajectory, g, d["centers"].get<size_t>(), sc.seed);
    json centers = json::array();
    for (size_t i = 0; i < sw.checks.size(); ++i)
      centers.push_back({{"snapshot", sw.snapshot[i]}, {"node", sw.node[i]},
                         {"time", built.trajectory->snapshots[sw.snapshot[i]].time},
                         {"min_ratio", sw.checks[i].min_ratio}, {"max_ratio", sw.checks[i].max_ratio},
                         {"points", sw.checks[i].points}, {"snapshots", sw.checks[i].snapshots},
                         {"pass", sw.checks[i].pass}});
    check_failed = check_failed || !sw.pass;
    json j = {{"schema_version", kSchemaVersion}, {"gamma1", g.gamma1}, {"gamma2", g.gamma2},
              {"r_hat", sw.rhat.r_hat}, {"r1", num(sw.rhat.r1)}, {"r2", sw.rhat.r2},
              {"violations", sw.violations}, {"min_ratio", sw.min_ratio}, {"max_ratio", sw.max_ratio},
              {"status", sw.pass ? "pass" : "fail"}, {"centers", centers}};
    write_json("parabolic.json", j);
    return {{"violations", sw.violations}};
  }

  json run_simulate(const json& d) {
    const FlowTrajectory& tr = *built.trajectory;
    const size_t every = d["every"].get<size_t>();
    std::ofstream o(path("snapshots.csv"));
    o << "snapshot,time,node,x,rho\n";
    for (size_t k = 0; k < tr.snapshots.size(); ++k) {
      if (k % every != 0 && k + 1 != tr.snapshots.size()) continue;
      const RotSymProfile& p = tr.snapshots[k];
      for (size_t i = 0; i < p.size(); ++i)
        o << k << ',' << fmt(p.time) << ',' << i << ',' << fmt(p.x[i]) << ',' << fmt(p.rho[i]) << '\n';
    }
    json ev = json::array();
    for (const auto& e : tr.events) ev.push_back({{"time", e.time}, {"kind", e.kind}, {"location", e.location}});
    json j = {{"schema_version", kSchemaVersion}, {"snapshots", tr.snapshots.size()},
              {"t_final", tr.snapshots.back().time}, {"events", ev}};
    write_json("events.json", j);
    return {{"events", ev.size()}};
  }
};

json error_record(const Error& e) {
  return {{"module", e.module()}, {"operation", e.op()}, {"reason", e.reason()}, {"kind", e.kind()}};
}

}  // namespace

RunResult run_scenario(const Scenario& sc) {
  Runner R{sc, fs::path(sc.out_dir), {}, {}, {}, {}, {}, false, json::array()};
  fs::create_directories(R.dir);
  json manifest = {{"schema_version", kSchemaVersion},
                   {"scenario", sc.name},
                   {"seed", sc.seed},
                   {"surface", sc.surface},
                   {"diagnostics", sc.diagnostics},
                   {"tolerances",
                    {{"weak_convexity", "1e-9 max(1,|H|)"},
                     {"symmetry", 1e-10},
                     {"neck_quality", "direct maximum of criteria"},
                     {"inscribed_radius", "1e-9 r_in"},
                     {"pinching_precondition", 1e-9}}}};
  json results = json::array();
  try {
    R.built = build_surface(sc.surface);
    const SampledSurface& S = R.built.surface;
    if (R.built.bowl) manifest["bowl_max_residual"] = R.built.bowl->max_residual;
    manifest["samples"] = S.size();
    manifest["source"] = S.source;
    if (R.built.trajectory) {
      manifest["snapshots"] = R.built.trajectory->snapshots.size();
      manifest["time"] = R.built.trajectory->snapshots.back().time;
    }
    for (const auto& d : sc.diagnostics) {
      const std::string t = d["type"].get<std::string>();
      json out;
      if (t == "detect-necks") out = R.run_detect(d);
      else if (t == "decompose") out = R.run_decompose(d);
      else if (t == "noncollapse") out = R.run_noncollapse();
      else if (t == "constants") out = R.run_constants(d);
      else if (t == "oracle") out = R.run_oracle(d);
      else if (t == "gamma-estimate") out = R.run_gammas(d);
      else if (t == "parabolic-check") out = R.run_parabolic(d);
      else if (t == "simulate") out = R.run_simulate(d);
      else if (t == "models") write_samples_csv(S, R.path("samples.csv"));
      results.push_back({{"type", t}, {"summary", out}});
    }
    R.res.exit_code = R.check_failed ? kExitCheckFailed : kExitOk;
    manifest["status"] = R.check_failed ? "check-failed" : "ok";
  } catch (const Error& e) {
    manifest["status"] = "failed";
    manifest["error"] = error_record(e);
    R.res.exit_code = e.exit_code();
  }
  manifest["results"] = results;
  manifest["exit_code"] = R.res.exit_code;
  manifest["outputs"] = R.res.files;
  {
    std::ofstream o((R.dir / "manifest.json").string());
    o << manifest.dump(2) << '\n';
  }
  R.res.files.push_back("manifest.json");
  R.res.manifest = manifest;
  return R.res;
}

}  // namespace mcflab
