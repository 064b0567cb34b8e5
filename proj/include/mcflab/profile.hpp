#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mcflab/curvature.hpp"
#include "mcflab/error.hpp"

namespace mcflab {

enum class Boundary { periodic, closed_caps, clamped };

const char* to_string(Boundary b);

// O(n)-symmetric hypersurface in R^{n+1}.
// periodic / clamped: graph rho(x) over a uniform axial grid x_i = x0 + i dx.
// closed_caps: parametric meridian, node i at axial position x[i] and radius
// rho[i], rho = 0 at both ends, nodes kept near-uniform in arclength.
struct RotSymProfile {
  int n = 3;
  Boundary boundary = Boundary::periodic;
  double time = 0.0;
  std::vector<double> x, rho;
  double dx = 0.0;  // grid spacing (closed caps: mean node spacing)

  size_t size() const { return rho.size(); }
  double period() const { return dx * double(rho.size()); }  // periodic only
  double max_rho() const;
  void validate() const;
};

// Local meridian geometry at a node.
struct MeridianPoint {
  double z = 0, r = 0;
  double nz = 0, nr = 0;  // outward unit normal in the (axis, radial) plane
  double k_axial = 0, k_rot = 0;
};

MeridianPoint meridian_point(const RotSymProfile& p, size_t i);
CurvatureSpectrum curvature_at(const RotSymProfile& p, size_t i);

// Meridian arclength of every node, from node 0. Periodic profiles get one
// extra entry: the length of a full period.
std::vector<double> arclength(const RotSymProfile& p);

enum class Scheme { semi_implicit, explicit_euler };

struct FlowOptions {
  Scheme scheme = Scheme::semi_implicit;
  double cfl = 0.25;            // explicit scheme: dt <= cfl * dx^2 (graph) or cfl * dx^2 / n (caps)
  double rho_min = -1.0;        // <= 0: 1e-6 * max rho of the first profile seen
  double redistribution = 0.05;  // closed caps: tangential relaxation per step
};

// A singular step: radius fell to rho_min.
class SingularityError : public Error {
 public:
  SingularityError(std::string op, std::string reason, double location)
      : Error("rotsym_flow", std::move(op), std::move(reason)), location_(location) {}
  double location() const { return location_; }
  const char* kind() const override { return "singularity"; }

 private:
  double location_;
};

// Time stepper; keeps the factorized implicit operator between steps.
class FlowStepper {
 public:
  explicit FlowStepper(FlowOptions opt = {});
  ~FlowStepper();
  FlowStepper(FlowStepper&&) noexcept;
  FlowStepper& operator=(FlowStepper&&) noexcept;

  RotSymProfile step(const RotSymProfile& p, double dt);
  const FlowOptions& options() const { return opt_; }

 private:
  struct Cache;
  FlowOptions opt_;
  std::unique_ptr<Cache> cache_;
  double rho_min_ = -1.0;
};

RotSymProfile step_mcf(const RotSymProfile& p, double dt, const FlowOptions& opt = {});

// Smallest radius among interior local minima of rho (global min for graphs)
// and its axial location.
struct NeckMin {
  double rho = 0.0, x = 0.0;
  size_t index = 0;
  bool found = false;
};
NeckMin neck_minimum(const RotSymProfile& p);

struct FlowEvent {
  double time = 0.0;
  std::string kind;  // min-radius-threshold | convexity-lost | neck-formed
  double location = 0.0;
};

struct FlowSettings {
  double t_end = 0.0;
  double dt_max = 1e-3;
  double dt_accuracy = 0.01;        // dt <= dt_accuracy * (min curvature radius)^2
  double snapshot_interval = 0.0;   // 0: every step
  double min_radius_threshold = 0.0;  // absolute; 0 disables
  double neck_ratio = 0.0;          // neck min / initial neck min; 0 disables
  bool stop_on_event = true;
  FlowOptions options;
};

struct FlowTrajectory {
  std::vector<RotSymProfile> snapshots;
  std::vector<double> dts;
  std::vector<FlowEvent> events;
  void validate() const;
};

FlowTrajectory simulate(const RotSymProfile& initial, const FlowSettings& s);

// Initial data.
RotSymProfile cylinder_profile(int n, double r0, double length, size_t N, Boundary b);
RotSymProfile periodic_profile(int n, double length, size_t N, const std::function<double(double)>& rho);
// Closed meridian phi -> (z, r), phi in [0, pi], r = 0 exactly at both ends.
RotSymProfile closed_profile(int n, size_t N, const std::function<void(double, double&, double&)>& curve);
RotSymProfile sphere_profile(int n, double r0, size_t N);
RotSymProfile spheroid_profile(int n, double a_axial, double b_radial, size_t N);

struct DumbbellParams {
  double half_length = 7.0;  // X
  double tube = 0.3;         // a
  double bulb = 1.0;         // R
  double junction = 4.5;     // x_j
  double width = 0.5;        // w
};
RotSymProfile dumbbell_profile(int n, const DumbbellParams& d, size_t N);

}  // namespace mcflab
