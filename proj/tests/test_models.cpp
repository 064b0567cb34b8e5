#include <doctest.h>

#include <array>
#include <cmath>

#include "mcflab/curvature.hpp"
#include "mcflab/error.hpp"
#include "mcflab/models.hpp"

using namespace mcflab;

namespace {

// Independent translator integration: classic RK4 on (p, u) with p' =
// (1 + p^2)(1 - (n-1) p / r), seeded by the two-term tip series.
double rk4_bowl_u(int n, double r_end) {
  const double a = 1.0 / n, b = a * a * a / (n + 2);
  double r = 1e-3, p = a * r + b * r * r * r, u = a * r * r / 2 + b * r * r * r * r / 4;
  const long steps = std::lround((r_end - r) / 1e-4);
  const double h = (r_end - r) / double(steps);
  auto f = [&](double rr, double pp) { return (1 + pp * pp) * (1 - (n - 1) * pp / rr); };
  for (long k = 0; k < steps; ++k) {
    double k1 = f(r, p), l1 = p;
    double k2 = f(r + h / 2, p + h / 2 * k1), l2 = p + h / 2 * k1;
    double k3 = f(r + h / 2, p + h / 2 * k2), l3 = p + h / 2 * k2;
    double k4 = f(r + h, p + h * k3), l4 = p + h * k3;
    p += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    u += h / 6 * (l1 + 2 * l2 + 2 * l3 + l4);
    r = 1e-3 + double(k + 1) * h;
  }
  return u;
}

}  // namespace

TEST_CASE("sphere and cylinder spectra") {
  CurvatureSpectrum s = sphere_spectrum(3, 1.0, 0.0);
  for (double l : s.lambdas) CHECK(l == doctest::Approx(1.0));
  CHECK(s.H == doctest::Approx(3.0));
  CHECK(sphere_radius(3, 1.0, -1.0) == doctest::Approx(std::sqrt(7.0)).epsilon(1e-15));
  CHECK(sphere_spectrum(3, 1.0, -1.0).H == doctest::Approx(3.0 / std::sqrt(7.0)).epsilon(1e-15));
  CurvatureSpectrum c = cylinder_spectrum(3, 1.0, 0.0);
  CHECK(c.lambdas[0] == 0.0);
  CHECK(c.lambdas[1] == doctest::Approx(1.0));
  CHECK(c.H == doctest::Approx(2.0));
  CHECK(cylinder_radius(5, 2.0, -1.0) == doctest::Approx(std::sqrt(12.0)).epsilon(1e-15));
  for (int n = 2; n <= 7; ++n)
    CHECK(pinching_report(cylinder_spectrum(n, 1.3, -0.2)).ratio_two_convex == doctest::Approx(1.0 / (n - 1)).epsilon(1e-15));
  // H increases towards extinction at t = 1/6.
  double prev = 0.0;
  for (double t = -1.0; t < 1.0 / 6.0 - 1e-9; t += 1e-3) {
    double H = sphere_spectrum(3, 1.0, t).H;
    CHECK(H > prev);
    prev = H;
  }
  CHECK_THROWS_AS(sphere_spectrum(3, 1.0, 1.0 / 6.0), PreconditionError);
  CHECK_THROWS_AS(cylinder_spectrum(3, 1.0, 0.25), PreconditionError);
  ModelSurface m{ModelKind::cylinder, 3, 1.0, -1.0};
  CHECK(m.radius() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("bowl tip series") {
  auto c3 = bowl_series_coefficients(3);
  CHECK(c3[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(c3[1] == doctest::Approx(1.0 / 135.0).epsilon(1e-15));
  CHECK(std::abs(c3[2]) < 1e-18);
  CHECK(c3[3] == doctest::Approx(-1.0 / 164025.0).epsilon(1e-14));
  auto c4 = bowl_series_coefficients(4);
  CHECK(c4[1] == doctest::Approx(1.0 / 384.0).epsilon(1e-15));
  CHECK(c4[2] == doctest::Approx(-1.0 / 49152.0).epsilon(1e-14));
  CHECK(c4[3] == doctest::Approx(-17.0 / 23592960.0).epsilon(1e-14));
  auto c5 = bowl_series_coefficients(5);
  CHECK(c5[1] == doctest::Approx(1.0 / 875.0).epsilon(1e-15));
  CHECK(c5[2] == doctest::Approx(-2.0 / 196875.0).epsilon(1e-14));
  CHECK(c5[3] == doctest::Approx(-1.0 / 10828125.0).epsilon(1e-14));
}

TEST_CASE("bowl profile") {
  for (int n = 3; n <= 5; ++n) {
    BowlProfile b = bowl_profile(n, 40.0, 0.02);
    CurvatureSpectrum tip = b.spectrum(0);
    for (double l : tip.lambdas) CHECK(l == doctest::Approx(1.0 / n).epsilon(1e-14));
    CHECK(tip.H == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.max_residual < 1e-8);
    double prevH = 2.0;
    for (size_t i = 0; i < b.r.size(); ++i) {
      CurvatureSpectrum s = b.spectrum(i);
      CHECK(s.lambdas[0] > 0);
      if (i > 0) CHECK(s.H < prevH);
      prevH = s.H;
      // Translator: H = <nu, e0> = 1/sqrt(1 + u'^2).
      CHECK(std::abs(s.H - 1.0 / std::sqrt(1 + b.p[i] * b.p[i])) < 1e-9);
      CHECK(pinching_report(s).two_convexity_margin >= -1e-6);
    }
    // Far field approaches the cylinder from above.
    double m_mid = pinching_report(b.spectrum(b.r.size() / 2)).two_convexity_margin;
    double m_end = pinching_report(b.spectrum(b.r.size() - 1)).two_convexity_margin;
    CHECK(m_end < m_mid);
    CHECK(m_end < 0.05);
  }
}

TEST_CASE("bowl agrees with an independent integrator and under step halving") {
  BowlProfile b = bowl_profile(3, 20.0, 0.02);
  BowlProfile h = bowl_profile(3, 20.0, 0.01);
  for (double r : {1.0, 5.0, 20.0}) {
    size_t i = size_t(std::lround(r / 0.02)), j = size_t(std::lround(r / 0.01));
    CHECK(std::abs(b.u[i] - h.u[j]) <= 1e-8 * std::abs(h.u[j]));
    CHECK(std::abs(b.p[i] - h.p[j]) <= 1e-8 * std::abs(h.p[j]));
    CHECK(std::abs(b.u[i] - rk4_bowl_u(3, r)) <= 1e-8 * std::abs(b.u[i]));
  }
}

TEST_CASE("bowl preconditions") {
  CHECK_THROWS_AS(bowl_profile(3, 10.0, 0.1), PreconditionError);
  CHECK_THROWS_AS(bowl_profile(1, 10.0, 0.001), PreconditionError);
}
