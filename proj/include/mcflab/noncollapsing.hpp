#pragma once

#include <vector>

#include "mcflab/surface.hpp"

namespace mcflab {

struct InscribedRadius {
  double r_in = 0.0;
  size_t witness = 0;     // sample whose orbit obstructs the ball
  bool curvature = false;  // bound attained by a principal curvature radius at p
};

// Largest r with B(F(p) - r nu(p), r) inside the enclosed region, over the
// sampled surface. Throws CoverageError when the samples cannot decide.
InscribedRadius inscribed_radius(const SampledSurface& s, size_t p);

struct AlphaProfile {
  std::vector<double> r_in, alpha;  // NaN where excluded
  std::vector<bool> valid;
  double min_alpha = 0.0;
  size_t argmin = 0;
  size_t excluded = 0;
};

AlphaProfile alpha_profile(const SampledSurface& s);

struct GeodesicProbe {
  std::vector<double> s, f, k, k_bound;  // k_bound = s^2 / (4 C0^2)
  double s_max = 0.0;       // requested alpha C0
  double s_reached = 0.0;
  bool truncated = false;
  size_t k_violations = 0;
  bool f_check_applies = false;  // alpha <= C0^-2 / 2
  size_t f_violations = 0;       // f <= 0 at some s > 0
  double min_k_margin = 0.0;     // min (k - k_bound) / k_bound
};

// Meridian geodesic from p; direction +1 follows increasing arclength, -1
// decreasing, continuing through poles onto the opposite meridian.
GeodesicProbe geodesic_functions(const SampledSurface& s, size_t p, int direction, double alpha, double C0,
                                 size_t probes = 100);

struct NoncollapsingResult {
  bool pass = true;
  size_t worst = 0;
  double worst_margin = 0.0;  // min over samples of H r_in / alpha - 1
  size_t checked = 0, excluded = 0;
};

NoncollapsingResult verify_noncollapsing(const SampledSurface& s, double alpha);
NoncollapsingResult verify_noncollapsing(const SampledSurface& s, const AlphaProfile& a, double alpha,
                                         const std::vector<size_t>& samples);

}  // namespace mcflab
