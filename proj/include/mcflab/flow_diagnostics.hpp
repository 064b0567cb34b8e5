#pragma once

#include <cstdint>
#include <vector>

#include "mcflab/profile.hpp"
#include "mcflab/surface.hpp"

namespace mcflab {

// |nabla^k h| at node i, measured twice with stencils 1x and 1.5x wide.
// flagged: the two disagree, i.e. the data are too noisy for order k.
struct DerivativeNormEstimate {
  bool available = false;
  double value = 0.0;
  double refined = 0.0;
  bool flagged = false;
};

DerivativeNormEstimate derivative_norms(const RotSymProfile& p, size_t i, int k, const JetOptions& opt = {});

struct GammaEstimate {
  double gamma1 = 0.0, gamma2 = 0.0;
  size_t samples = 0;
  size_t excluded = 0;  // nodes without certified jets or with H <= 0
  double time_of_gamma1 = 0.0, time_of_gamma2 = 0.0;
};

GammaEstimate estimate_gammas(const SampledSurface& s);
// Every snapshot_stride-th snapshot (the last one always included).
GammaEstimate estimate_gammas(const FlowTrajectory& traj, size_t snapshot_stride = 1, const JetOptions& opt = {});

// Radius of the parabolic neighbourhood in units of (n-1)/H(p0): the smaller
// of the spatial radius r1 and sqrt of the time span r2.
struct RHat {
  double c1 = 0.0, c2 = 0.0;
  double r1 = 0.0, r2 = 0.0;
  double r_hat = 0.0;
};
RHat r_hat(int n, double gamma1, double gamma2);

struct ParabolicCheck {
  bool pass = true;
  bool covered = true;
  double min_ratio = 1.0, max_ratio = 1.0;  // H(p,t) / H(p0,t0)
  size_t points = 0;
  size_t snapshots = 0;
  double radius = 0.0;    // meridian radius of the ball at t0
  double duration = 0.0;  // time span of the neighbourhood
};

// Snapshot index k0 and node i0 as the centre; points are followed back in
// time along normal lines.
ParabolicCheck parabolic_neighborhood_check(const FlowTrajectory& traj, size_t k0, size_t i0, double rhat);

struct ParabolicSweep {
  bool pass = true;
  RHat rhat;
  std::vector<size_t> snapshot, node;
  std::vector<ParabolicCheck> checks;
  size_t violations = 0;
  double min_ratio = 1.0, max_ratio = 1.0;
};

// count random spacetime centres, all with full backward coverage.
ParabolicSweep parabolic_sweep(const FlowTrajectory& traj, const GammaEstimate& g, size_t count, std::uint64_t seed);

}  // namespace mcflab
