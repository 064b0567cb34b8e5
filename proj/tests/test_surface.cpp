#include <doctest.h>

#include <cmath>

#include "mcflab/error.hpp"
#include "mcflab/surface.hpp"

using namespace mcflab;

namespace {

Eigen::MatrixXd rotation(int dim, double angle) {
  Eigen::MatrixXd R = Eigen::MatrixXd::Identity(dim, dim);
  R(0, 0) = R(1, 1) = std::cos(angle);
  R(0, 1) = -std::sin(angle);
  R(1, 0) = std::sin(angle);
  return R;
}

}  // namespace

TEST_CASE("sampled sphere") {
  SampledSurface s = sphere_surface(3, 2.0, 401);
  CHECK_NOTHROW(s.validate());
  CHECK(s.start == EndKind::pole);
  CHECK(s.end == EndKind::pole);
  for (size_t i = 0; i < s.size(); i += 7) {
    CHECK(s.H(i) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(s.lambda1(i) == doctest::Approx(0.5).epsilon(1e-12));
    for (int j = 1; j <= 3; ++j) {
      Eigen::VectorXd x = s.position(i, j, -1.0);
      CHECK(x.norm() == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(s.normal(i, j, -1.0).dot(x) == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
  CHECK(s.max_spacing() == doctest::Approx(2.0 * M_PI / 400).epsilon(1e-9));
  SampledSurface::Range b = s.ball(200, 100.0);
  CHECK(b.covered);
  CHECK(b.lo == 0);
  CHECK(b.hi == 400);
  CHECK_THROWS_AS(sphere_surface(3, -1.0, 100), PreconditionError);
}

TEST_CASE("sampled cylinder") {
  SampledSurface c = cylinder_surface(4, 0.5, 10.0, 201);
  CHECK(c.end == EndKind::extends);
  for (size_t i = 0; i < c.size(); i += 10) {
    CHECK(c.k1[i] == 0.0);
    CHECK(c.k2[i] == doctest::Approx(2.0));
    CHECK(c.H(i) == doctest::Approx(6.0));
  }
  SampledSurface::Range b = c.ball(100, 50.0);
  CHECK(b.covered);
  CHECK(b.lo == 0);
  CHECK(b.hi == 200);
}

TEST_CASE("sampled bowl and open ends") {
  SampledSurface b = bowl_surface(bowl_profile(3, 20.0, 0.02), 4, 5);
  CHECK(b.start == EndKind::pole);
  CHECK(b.end == EndKind::open);
  CHECK(b.kmax == 4);
  CHECK(b.H(0) == doctest::Approx(1.0).epsilon(1e-12));
  for (size_t i = 0; i < b.size(); i += 17) {
    CHECK(std::abs(b.H(i) - std::abs(b.nz[i])) < 1e-9);
    if (i > 0) CHECK(std::isfinite(b.dnorms[i][2]));
  }
  // The pole sample carries no derivative norms.
  CHECK(std::isnan(b.dnorms[0][1]));
  CHECK(b.ball(0, 5.0).covered);
  SampledSurface::Range e = b.ball(b.size() - 2, 20.0);
  CHECK_FALSE(e.covered);
  CHECK(e.hi == b.size() - 1);
}

TEST_CASE("rigid motions and scaling") {
  SampledSurface b = bowl_surface(bowl_profile(3, 10.0, 0.01), 3, 10);
  Eigen::MatrixXd R = rotation(4, 0.3);
  Eigen::VectorXd shift = Eigen::VectorXd::Constant(4, 1.5);
  SampledSurface t = b.transformed(R, shift);
  for (size_t i = 0; i < b.size(); i += 9) {
    CHECK(t.H(i) == b.H(i));
    CHECK((t.position(i, 2) - (R * b.position(i, 2) + shift)).norm() < 1e-12);
    CHECK((t.normal(i, 1) - R * b.normal(i, 1)).norm() < 1e-12);
  }
  CHECK((t.axis() - R.col(0)).norm() < 1e-12);
  SampledSurface sc = b.scaled(2.0);
  for (size_t i = 9; i < b.size(); i += 9) {
    CHECK(sc.H(i) == doctest::Approx(b.H(i) / 2.0));
    CHECK(sc.dnorms[i][1] == doctest::Approx(b.dnorms[i][1] / 4.0));
    CHECK(sc.dnorms[i][2] == doctest::Approx(b.dnorms[i][2] / 8.0));
  }
  CHECK_THROWS_AS(b.scaled(0.0), PreconditionError);
}

TEST_CASE("surface from a flow profile") {
  RotSymProfile p = cylinder_profile(3, 1.0, 2 * M_PI, 128, Boundary::periodic);
  SampledSurface s = profile_surface(p, {}, 3);
  CHECK(s.size() >= 3 * 128);
  CHECK(s.end == EndKind::open);
  for (size_t i = 0; i < s.size(); i += 13) {
    CHECK(std::abs(s.k1[i]) < 1e-12);
    CHECK(s.k2[i] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SampledSurface sp = profile_surface(sphere_profile(3, 1.0, 200));
  CHECK(sp.start == EndKind::pole);
  for (size_t i = 0; i < sp.size(); i += 11) CHECK(sp.H(i) == doctest::Approx(3.0).epsilon(1e-3));
  CHECK_THROWS_AS(profile_surface(sphere_profile(3, 1.0, 200), {}, 2), PreconditionError);
}
