#include "mcflab/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mcflab/error.hpp"

namespace mcflab {

double CurvatureSpectrum::weak_convexity_tol() const { return 1e-9 * std::max(1.0, std::abs(H)); }

bool CurvatureSpectrum::weakly_convex() const {
  return !lambdas.empty() && lambdas.front() >= -weak_convexity_tol();
}

double CurvatureSpectrum::spectral_radius() const {
  double r = 0.0;
  for (double l : lambdas) r = std::max(r, std::abs(l));
  return r;
}

std::vector<int> CurvatureSpectrum::multiplicities() const {
  std::vector<int> out;
  double gap = 1e-8 * spectral_radius();
  for (size_t i = 0; i < lambdas.size(); ++i) {
    if (i > 0 && lambdas[i] - lambdas[i - 1] <= gap)
      ++out.back();
    else
      out.push_back(1);
  }
  return out;
}

CurvatureSpectrum spectrum_from_values(std::vector<double> lambdas) {
  std::stable_sort(lambdas.begin(), lambdas.end());
  CurvatureSpectrum s;
  s.n = static_cast<int>(lambdas.size());
  for (double l : lambdas) {
    s.H += l;
    s.A2 += l * l;
  }
  s.lambdas = std::move(lambdas);
  return s;
}

CurvatureSpectrum rotational_spectrum(int n, double k_axial, double k_rot) {
  std::vector<double> l(n, k_rot);
  l[0] = k_axial;
  return spectrum_from_values(std::move(l));
}

CurvatureSpectrum principal_curvatures(const Eigen::MatrixXd& S) {
  if (S.rows() != S.cols() || S.rows() < 1)
    throw PreconditionError("curvature_core", "principal_curvatures", "shape operator must be square");
  double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
  double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale)
    throw PreconditionError("curvature_core", "principal_curvatures",
                            "matrix not symmetric (max asymmetry " + std::to_string(asym) + ")");
  Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success)
    throw PreconditionError("curvature_core", "principal_curvatures", "eigensolver failed");
  const Eigen::VectorXd& ev = es.eigenvalues();
  Eigen::MatrixXd rec = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  if ((rec - sym).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw PreconditionError("curvature_core", "principal_curvatures", "eigen reconstruction failed");
  return spectrum_from_values(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

double pinching_constant(int n) {
  if (n < 5) throw PreconditionError("curvature_core", "pinching_constant", "n must be >= 5");
  if (n >= 8) return 1.0 / (n - 2);
  return 3.0 * (n + 1) / (2.0 * n * (n + 2));
}

PinchingReport pinching_report(const CurvatureSpectrum& s) {
  if (s.n < 2 || static_cast<int>(s.lambdas.size()) != s.n)
    throw PreconditionError("curvature_core", "pinching_report", "malformed spectrum");
  if (!(s.H >= 1e-12))
    throw PreconditionError("curvature_core", "pinching_report", "requires H > 0 (got " + std::to_string(s.H) + ")");
  PinchingReport r;
  const auto& l = s.lambdas;
  r.ratio_lambda1 = l[0] / s.H;
  r.ratio_two_convex = (l[0] + l[1]) / s.H;
  r.ratio_cyl = s.A2 / (s.H * s.H);
  r.ratio_gap = (l[s.n - 1] - l[1]) / s.H;
  r.two_convexity_margin = r.ratio_two_convex - 1.0 / (s.n - 1);
  return r;
}

}  // namespace mcflab
