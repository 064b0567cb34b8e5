#include <doctest.h>

#include <cmath>
#include <random>

#include "mcflab/curvature.hpp"
#include "mcflab/error.hpp"

using namespace mcflab;

namespace {

// Independent eigenvalue oracle: Householder tridiagonalization, then
// bisection on Sturm sequence counts.
struct Tridiagonal {
  std::vector<double> d, e;  // diagonal, off-diagonal (e[0] unused)
};

Tridiagonal householder(std::vector<std::vector<double>> a) {
  const int n = int(a.size());
  for (int k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (int i = k + 1; i < n; ++i) alpha += a[i][k] * a[i][k];
    alpha = std::sqrt(alpha);
    if (alpha == 0.0) continue;
    if (a[k + 1][k] > 0) alpha = -alpha;
    std::vector<double> v(n, 0.0);
    v[k + 1] = a[k + 1][k] - alpha;
    for (int i = k + 2; i < n; ++i) v[i] = a[i][k];
    double vv = 0.0;
    for (double x : v) vv += x * x;
    if (vv == 0.0) continue;
    // a <- (I - 2vv^T/vv) a (I - 2vv^T/vv)
    std::vector<double> p(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) p[i] += a[i][j] * v[j];
    for (double& x : p) x *= 2.0 / vv;
    double K = 0.0;
    for (int i = 0; i < n; ++i) K += v[i] * p[i];
    K /= vv;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = p[i] - K * v[i];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a[i][j] -= v[i] * q[j] + q[i] * v[j];
  }
  Tridiagonal t;
  t.d.resize(n);
  t.e.assign(n, 0.0);
  for (int i = 0; i < n; ++i) t.d[i] = a[i][i];
  for (int i = 1; i < n; ++i) t.e[i] = a[i][i - 1];
  return t;
}

int count_below(const Tridiagonal& t, double x) {
  int c = 0;
  double q = 1.0;
  for (size_t i = 0; i < t.d.size(); ++i) {
    q = t.d[i] - x - (i ? t.e[i] * t.e[i] / q : 0.0);
    if (q == 0.0) q = 1e-300;
    if (q < 0) ++c;
  }
  return c;
}

std::vector<double> sturm_eigenvalues(const std::vector<std::vector<double>>& a) {
  Tridiagonal t = householder(a);
  const int n = int(a.size());
  double bound = 0.0;
  for (int i = 0; i < n; ++i) bound = std::max(bound, std::abs(t.d[i]) + std::abs(t.e[i]) + (i + 1 < n ? std::abs(t.e[i + 1]) : 0.0));
  std::vector<double> out;
  for (int k = 0; k < n; ++k) {
    double lo = -bound - 1, hi = bound + 1;
    for (int it = 0; it < 200; ++it) {
      double mid = 0.5 * (lo + hi);
      (count_below(t, mid) > k ? hi : lo) = mid;
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace

TEST_CASE("principal curvatures of identity and cylinder") {
  CurvatureSpectrum s = principal_curvatures(Eigen::MatrixXd::Identity(3, 3));
  CHECK(s.H == doctest::Approx(3.0).epsilon(1e-15));
  for (double l : s.lambdas) CHECK(l == doctest::Approx(1.0).epsilon(1e-15));
  CurvatureSpectrum c = principal_curvatures(Eigen::Vector3d(0, 1, 1).asDiagonal().toDenseMatrix());
  CHECK(std::abs(c.lambdas[0]) < 1e-15);
  CHECK(c.lambdas[1] == doctest::Approx(1.0));
  CHECK(c.H == doctest::Approx(2.0));
  CHECK(c.multiplicities() == std::vector<int>{1, 2});
}

TEST_CASE("principal curvatures match a Sturm bisection oracle") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> N(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd A(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j <= i; ++j) A(i, j) = A(j, i) = N(rng);
    std::vector<std::vector<double>> a(5, std::vector<double>(5));
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) a[i][j] = A(i, j);
    std::vector<double> ref = sturm_eigenvalues(a);
    CurvatureSpectrum s = principal_curvatures(A);
    for (int i = 0; i < 5; ++i) CHECK(std::abs(s.lambdas[i] - ref[i]) < 1e-9);
  }
}

TEST_CASE("non-symmetric input is rejected") {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  A(0, 1) = 1e-6;
  CHECK_THROWS_AS(principal_curvatures(A), PreconditionError);
}

TEST_CASE("pinching constant") {
  CHECK(pinching_constant(5) == doctest::Approx(9.0 / 35.0).epsilon(1e-15));
  CHECK(pinching_constant(8) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
  CHECK(pinching_constant(10) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
  CHECK(pinching_constant(6) == doctest::Approx(21.0 / 96.0).epsilon(1e-15));
  CHECK_THROWS_AS(pinching_constant(4), PreconditionError);
}

TEST_CASE("pinching report on model spectra") {
  PinchingReport s = pinching_report(spectrum_from_values({1, 1, 1}));
  CHECK(s.ratio_two_convex == doctest::Approx(2.0 / 3.0));
  CHECK(s.ratio_cyl == doctest::Approx(1.0 / 3.0));
  PinchingReport c = pinching_report(spectrum_from_values({0, 1, 1}));
  CHECK(c.ratio_two_convex == doctest::Approx(0.5));
  CHECK(c.ratio_cyl == doctest::Approx(0.5));
  CHECK(std::abs(c.two_convexity_margin) < 1e-15);
  PinchingReport b = pinching_report(spectrum_from_values({1.0 / 3, 1.0 / 3, 1.0 / 3}));
  CHECK(b.ratio_two_convex == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(pinching_report(spectrum_from_values({-1, 0, 0})), PreconditionError);
}

TEST_CASE("ratio ordering, rigidity and scale invariance on random convex spectra") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0, 1);
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + int(U(rng) * 6);
    std::vector<double> l(n);
    for (double& x : l) x = U(rng);
    CurvatureSpectrum s = spectrum_from_values(l);
    PinchingReport r = pinching_report(s);
    CHECK(r.ratio_lambda1 >= 0);
    CHECK(r.ratio_lambda1 <= 1.0 / n + 1e-15);
    CHECK(s.lambdas.back() / s.H >= 1.0 / n - 1e-15);
    CHECK(r.ratio_cyl >= 1.0 / n - 1e-15);
    CHECK(r.ratio_cyl <= 1.0 + 1e-15);
    double k = 0.01 + 100 * U(rng);
    for (double& x : l) x *= k;
    PinchingReport r2 = pinching_report(spectrum_from_values(l));
    CHECK(std::abs(r2.ratio_lambda1 - r.ratio_lambda1) < 1e-12);
    CHECK(std::abs(r2.ratio_two_convex - r.ratio_two_convex) < 1e-12);
    CHECK(std::abs(r2.ratio_cyl - r.ratio_cyl) < 1e-12);
    CHECK(std::abs(r2.ratio_gap - r.ratio_gap) < 1e-12);
  }
  // lambda1 = 0 and |A|^2/H^2 = 1/(n-1) force a round cylinder.
  for (int n = 3; n <= 7; ++n) {
    std::vector<double> l(n, 2.5);
    l[0] = 0.0;
    CurvatureSpectrum s = spectrum_from_values(l);
    PinchingReport r = pinching_report(s);
    CHECK(std::abs(r.ratio_cyl - 1.0 / (n - 1)) < 1e-12);
    for (int i = 1; i < n; ++i) CHECK(std::abs(s.lambdas[i] - s.H / (n - 1)) < 1e-9);
  }
}
