#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mcflab/covariant_norms.hpp"
#include "mcflab/curvature.hpp"
#include "mcflab/models.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

// pole: the meridian reaches the axis. open: sampling stops, the surface goes
// on unseen. extends: sampling stops but the surface continues identically
// (exact cylinder), so balls past the end are covered.
enum class EndKind { pole, open, extends };

const char* to_string(EndKind e);

// Samples along one meridian of an O(n)-symmetric hypersurface in R^{n+1}.
// Every ambient quantity is built from meridian data and a rigid frame, so a
// rigid motion only changes frame/origin.
struct SampledSurface {
  int n = 3;
  std::string source;
  std::vector<double> s, z, r, nz, nr, k1, k2;
  EndKind start = EndKind::open, end = EndKind::open;
  std::vector<DerivativeNorms> dnorms;  // NaN where not available
  int kmax = 0;
  Eigen::MatrixXd frame;  // columns: axis e0, meridian plane e1, then e2..en
  Eigen::VectorXd origin;

  size_t size() const { return s.size(); }
  double H(size_t i) const { return k1[i] + (n - 1) * k2[i]; }
  double lambda1(size_t i) const { return std::min(k1[i], k2[i]); }
  CurvatureSpectrum spectrum(size_t i) const { return rotational_spectrum(n, k1[i], k2[i]); }
  // Point on the meridian in direction +-e_j, j = 1..n.
  Eigen::VectorXd position(size_t i, int j = 1, double sign = 1.0) const;
  Eigen::VectorXd normal(size_t i, int j = 1, double sign = 1.0) const;
  Eigen::VectorXd axis() const { return frame.col(0); }
  double spacing(size_t i) const;
  double max_spacing() const;
  void validate() const;

  // Samples on parallels within meridian distance rad of sample i, clipped
  // at poles. covered is false when the ball passes an open end.
  struct Range {
    size_t lo = 0, hi = 0;  // inclusive
    bool covered = true;
  };
  Range ball(size_t i, double rad) const;

  SampledSurface transformed(const Eigen::MatrixXd& rotation, const Eigen::VectorXd& shift) const;
  SampledSurface scaled(double factor) const;
};

SampledSurface sphere_surface(int n, double radius, size_t samples);
SampledSurface cylinder_surface(int n, double radius, double half_length, size_t samples);
// Samples at every stride-th grid point of the bowl; derivative norms from
// Taylor-mode jets of the translator ODE.
SampledSurface bowl_surface(const BowlProfile& b, int kmax = kMaxDerivativeOrder, size_t stride = 1);

struct JetOptions {
  int kmax = kMaxDerivativeOrder;
  double stencil_scale = 0.15;  // stencil spacing / local curvature radius
  double pole_exclusion = 0.5;  // skip nodes with r < pole_exclusion * curvature radius
};

// Arclength jets at node i from finite-difference derivatives of the raw
// profile data. Returns false when the node cannot be certified.
bool profile_meridian_jets(const RotSymProfile& p, size_t i, const JetOptions& opt, MeridianJets& out,
                           double stride_factor = 1.0);

// periods: copies of one period laid end to end (periodic profiles only).
SampledSurface profile_surface(const RotSymProfile& p, const JetOptions& opt = {}, int periods = 1);

}  // namespace mcflab
