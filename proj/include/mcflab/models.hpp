#pragma once

#include <vector>

#include "mcflab/covariant_norms.hpp"
#include "mcflab/curvature.hpp"
#include "mcflab/profile.hpp"

namespace mcflab {

enum class ModelKind { sphere, cylinder, bowl };

struct ModelSurface {
  ModelKind kind = ModelKind::sphere;
  int n = 3;
  double r0 = 1.0;  // sphere/cylinder radius at t = 0; bowl speed is 1
  double t = 0.0;
  double radius() const;  // sphere/cylinder at time t
};

CurvatureSpectrum sphere_spectrum(int n, double r0, double t);
CurvatureSpectrum cylinder_spectrum(int n, double r0, double t);
double sphere_radius(int n, double r0, double t);
double cylinder_radius(int n, double r0, double t);

// Unit-speed translator u(r), opening upward, tip at the origin.
struct BowlProfile {
  int n = 3;
  double step = 0.0;
  std::vector<double> r, u, p, upp;  // p = u', upp = u''
  std::vector<double> s;             // meridian arclength from the tip
  double max_residual = 0.0;         // |p' - rhs| on the grid
  double k_axial(size_t i) const;
  double k_rot(size_t i) const;
  CurvatureSpectrum spectrum(size_t i) const;
};

// Tip series p = a r + b r^3 + c r^5 + d r^7.
std::vector<double> bowl_series_coefficients(int n);

BowlProfile bowl_profile(int n, double r_max, double step);

// The same translator as radius over axis, rho(x) = r(u^{-1}(x)) on a uniform
// x-grid spanning u(r_lo)..u(r_hi); clamped ends.
RotSymProfile bowl_axial_profile(const BowlProfile& b, double r_lo, double r_hi, size_t N);

// Arclength jets of (k_axial, k_rot, psi) at a meridian state (r, theta),
// theta the tangent angle (p = tan theta). Taylor-mode ODE expansion.
MeridianJets bowl_meridian_jets(int n, double r, double theta, int kmax);

}  // namespace mcflab
