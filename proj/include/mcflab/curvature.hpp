#pragma once

#include <Eigen/Dense>
#include <vector>

namespace mcflab {

struct CurvatureSpectrum {
  int n = 0;
  std::vector<double> lambdas;  // ascending
  double H = 0.0;
  double A2 = 0.0;

  double weak_convexity_tol() const;
  bool weakly_convex() const;
  double spectral_radius() const;
  // Sizes of eigenvalue clusters, gap threshold 1e-8 * spectral radius.
  std::vector<int> multiplicities() const;
};

struct PinchingReport {
  double ratio_lambda1 = 0.0;
  double ratio_two_convex = 0.0;
  double ratio_cyl = 0.0;
  double ratio_gap = 0.0;
  double two_convexity_margin = 0.0;
};

CurvatureSpectrum spectrum_from_values(std::vector<double> lambdas);

// Surface of revolution: one axial curvature and a rotational one of
// multiplicity n-1.
CurvatureSpectrum rotational_spectrum(int n, double k_axial, double k_rot);

CurvatureSpectrum principal_curvatures(const Eigen::MatrixXd& shape_operator);

double pinching_constant(int n);

PinchingReport pinching_report(const CurvatureSpectrum& s);

}  // namespace mcflab
