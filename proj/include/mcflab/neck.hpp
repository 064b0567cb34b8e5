#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "mcflab/surface.hpp"

namespace mcflab {

// Each entry is a scale-free deviation from the round cylinder; the neck
// quality is their maximum.
struct NeckCriteria {
  double ratio_lambda1 = 0.0;   // lambda1/H at the centre
  double ratio_gap = 0.0;       // (lambda_n - lambda2)/H at the centre
  double derivative_sum = 0.0;  // max over the ball of sum_k H(p)^{-k-1} |nabla^k h|
  double graph_c0 = 0.0;        // max |rho/R - 1| over the axial window
  double graph_c1 = 0.0;        // max |d rho/dz|
  double graph_c2 = 0.0;        // max R |d^2 rho/dz^2|
  size_t skipped = 0;           // ball samples without derivative norms
  double max() const;
};

struct NeckCertificate {
  size_t center = 0;
  double epsilon_achieved = 0.0;
  double L = 0.0;
  Eigen::VectorXd axis;
  double radius_scale = 0.0;  // (n-1)/H(center)
  NeckCriteria criteria;
};

struct NeckDecision {
  bool accepted = false;
  NeckCertificate certificate;
  std::string reason;  // first failing criterion when rejected
};

// Throws CoverageError when the ball or the axial window leaves the samples.
NeckCertificate measure_neck(const SampledSurface& s, size_t p, double L);
NeckDecision detect_neck(const SampledSurface& s, size_t p, double epsilon, double L);
// Smallest accepting epsilon; +inf when above 1.
double neck_quality(const SampledSurface& s, size_t p, double L);

struct AxisEstimate {
  Eigen::VectorXd omega;
  double min_normal_component = 0.0;  // min_q <nu(q), omega>
  bool zero_in_hull = false;
};

// Direction maximizing min_q <nu(q), omega> over the normal cloud (every
// sample in the +-e_j directions).
AxisEstimate estimate_axis(const SampledSurface& s);
// sup |<nu, omega>| over the given samples.
double sup_normal_component(const SampledSurface& s, const Eigen::VectorXd& omega, const std::vector<size_t>& samples);

struct HeightPoint {
  size_t sample = 0;
  double y = 0.0;          // <F, omega>
  double nu_omega = 0.0;   // <nu, omega>
  double H = 0.0;
  double radius = 0.0;     // radius of the level set through the point
  double lambda1 = 0.0;
};

struct HeightCurves {
  std::vector<HeightPoint> curve;  // one meridian; the family is its rotations
  size_t copies = 0;
  std::string terminal;  // critical-point | pole | domain-edge | not-graph
  double y_max = 0.0;
  bool y_unbounded = false;
  size_t nu_omega_violations = 0;  // <nu, omega> decreased by more than 1e-8
  size_t shrinking_violations = 0;
  size_t theta_violations = 0;     // H < theta * H(seed)
  size_t slope_violations = 0;     // d<nu,omega>/dy below lambda1
  bool shrinking_applies = false;  // <nu, omega> > 0 on the seed level
  double min_H_ratio = 0.0;        // min H / H(seed)
};

// omega must be the symmetry axis (up to sign) to within 1e-3; y0 selects the
// seed level set {<F, omega> = y0}.
HeightCurves trace_height_curves(const SampledSurface& s, double y0, const Eigen::VectorXd& omega, double theta);

enum class SampleClass { neck, cap, uncovered };
const char* to_string(SampleClass c);

struct CapRegion {
  std::vector<size_t> samples;
  bool contains_pole = false;
  bool touches_boundary = false;  // adjacent to an open end or uncovered samples
  double diameter = 0.0;
  double H_min = 0.0, H_max = 0.0;
  double min_lambda1_over_H = 0.0;
};

struct Check {
  std::string name;
  std::string status;  // pass | fail | indeterminate
  double margin = 0.0;
  std::string detail;
};

// D: the pole side of the neck window around a transition point.
struct CapDomain {
  size_t pole = 0;
  bool transition_found = false;
  size_t transition = 0;
  size_t lo = 0, hi = 0;  // inclusive sample range of D
  double diameter = 0.0;
  double C0 = 1.0;
};

struct DecompositionReport {
  std::string topology;  // compact | noncompact | truncated
  std::vector<SampleClass> classes;
  std::vector<double> quality;
  std::vector<size_t> neck_points;
  std::vector<size_t> uncovered;
  std::vector<CapRegion> caps;
  std::vector<size_t> transition_points;
  std::vector<CapDomain> domains;
  double C0_measured = 1.0;
  double neck_fraction = 0.0;
  bool strictly_convex = true;
  std::vector<Check> checks;
  bool all_pass() const;
};

// C0_bundle > 0 adds the same bounds evaluated with a supplied constant.
DecompositionReport decompose(const SampledSurface& s, double epsilon0, double epsilon1, double L,
                              double C0_bundle = 0.0);

struct AlignmentResult {
  double max_angle = 0.0;  // radians
  double max_epsilon = 0.0;
  double C = 0.0;          // max_angle / max_epsilon
  size_t pairs = 0;
};
AlignmentResult axis_alignment_check(const std::vector<NeckCertificate>& certs);

struct EtaCalibration {
  std::vector<double> eta;
  std::vector<size_t> candidates, accepted;
  double eta0 = 0.0;  // largest eta whose candidates all accept (0 if none)
};
// For each eta: every covered sample with lambda1 <= eta H must be an
// (epsilon0, L)-neck.
EtaCalibration calibrate_eta(const std::vector<const SampledSurface*>& surfaces, double epsilon0, double L,
                             const std::vector<double>& etas);

}  // namespace mcflab
