#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mcflab/constants.hpp"
#include "mcflab/error.hpp"

using namespace mcflab;

TEST_CASE("hat_ab closed-form inversion") {
  // Exponent 1.
  const double c1 = 0.7;
  HatAB r = hat_ab(2 * std::numbers::pi * c1, c1);
  CHECK(r.a_hat == doctest::Approx((100.0 / c1) * (std::exp(1.0) - 1.0) * (1 + 1e-6)).epsilon(1e-14));
  // 100 (e^{2 pi} - 1)(1 + 1e-6), 30-digit reference.
  HatAB u = hat_ab(1.0, 1.0);
  CHECK(u.a_hat == doctest::Approx(53449.2190016420261).epsilon(1e-13));
  CHECK(u.b_hat == 2.0 + 100.0 * u.a_hat);
  // eta0 = 0.01, c1 = 0.3: (100/c1)(e^{60 pi} - 1) = 2.42918156040267509e84 before the margin.
  HatAB big = hat_ab(0.01, 0.3);
  CHECK_FALSE(big.overflow);
  CHECK(big.a_hat == doctest::Approx(2.42918156040267509e84 * (1 + 1e-6)).epsilon(1e-11));
  CHECK(hat_ab(1e-4, 1.0).overflow);
  CHECK(std::isinf(hat_ab(1e-4, 1.0).a_hat));
  CHECK_THROWS_AS(hat_ab(0.0, 1.0), PreconditionError);
}

TEST_CASE("hat_ab satisfies its defining inequality strictly") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(-3, 1);
  for (int t = 0; t < 1000; ++t) {
    double eta0 = std::pow(10.0, U(rng)), c1 = std::pow(10.0, U(rng));
    HatAB r = hat_ab(eta0, c1);
    if (r.overflow) continue;
    CHECK(hat_ab_slack(eta0, c1, r.a_hat) > 0);
    CHECK(r.b_hat == 2.0 + 100.0 * c1 * r.a_hat);
  }
}

TEST_CASE("theta_hat") {
  CHECK(theta_hat(3, 0.0) == 0.5);
  CHECK(std::abs(theta_hat(3, 0.1) - 1.0 / (2.0 + 1.2 * (2.0 + std::numbers::pi))) < 1e-12);
  CHECK(theta_hat(3, 0.1) == doctest::Approx(0.122400351416394426).epsilon(1e-14));
  for (int n = 2; n < 8; ++n)
    for (double g = 0.01; g < 2; g *= 1.7) {
      CHECK(theta_hat(n, g * 1.7) < theta_hat(n, g));
      CHECK(theta_hat(n + 1, g) < theta_hat(n, g));
      CHECK(theta_hat(n, g) > 0);
      CHECK(theta_hat(n, g) <= 0.5);
    }
}

TEST_CASE("curvature lower bound") {
  CHECK(curvature_lower_bound(2.0, 0.0, 3, 0.5) == 2.0);
  CHECK(curvature_lower_bound(2.0, 17.0, 3, 0.0) == 2.0);
  CHECK(curvature_lower_bound(2.0, 1.0, 3, 0.5) == doctest::Approx(1.0 / (0.5 + 1.5)));
  CHECK_THROWS_AS(curvature_lower_bound(0.0, 1.0, 3, 0.5), PreconditionError);
}

TEST_CASE("structure C0 max structure") {
  C0Result a = structure_C0(1e-9, 0.1, 10, 10, 3, 1);
  CHECK(a.value == 1.0 / 1e-9);
  CHECK(a.attained_by == "inv_eta2");
  C0Result b = structure_C0(0.5, 0.1, 10, 10, 3, 1e6);
  CHECK(b.value == 2.0 * (10 * 0.1 + 100.0 * 3 * 1e6));
  CHECK(b.attained_by == "a_theta_L");
  C0Result c = structure_C0(0.5, 0.1, 1e9, 10, 3, 1);
  CHECK(c.attained_by == "two_b_hat");
}

TEST_CASE("cap alpha bound") {
  CHECK(cap_alpha_bound(1.0).alpha_tilde == 1.0 / 32.0);
  CHECK(cap_alpha_bound(1.0).alpha_case1 == 0.5);
  CHECK(cap_alpha_bound(2.0).alpha_tilde == 1.0 / 1024.0);
  double prev = 1.0;
  for (double C0 = 1.0; C0 < 1e6; C0 *= 1.3) {
    double a = cap_alpha_bound(C0).alpha_tilde;
    CHECK(a < prev);
    prev = a;
  }
  CHECK_THROWS_AS(cap_alpha_bound(0.5), PreconditionError);
}

TEST_CASE("constant bundle composition and JSON round trip") {
  ConstantBundle b = make_bundle(3, 0.1, 0.1, 0.01, 0.01, 100);
  CHECK(b.c1 == doctest::Approx(0.3));
  CHECK(b.b_hat == 2.0 + 100.0 * b.c1 * b.a_hat);
  CHECK(b.C0 == 2.0 * b.b_hat);
  CHECK(b.C0_attained_by == "two_b_hat");
  CHECK(b.alpha_tilde == std::pow(b.C0, -5.0) / 32.0);
  CHECK(b.alpha_case1 == 0.5 / (b.C0 * b.C0));
  ConstantBundle r = bundle_from_json(to_json(b));
  CHECK(r.C0 == b.C0);
  CHECK(r.a_hat == b.a_hat);
  CHECK(r.theta_hat == b.theta_hat);
  ConstantBundle o = make_bundle(3, 1.0, 1.0, 1e-3, 0.01, 100);
  CHECK(o.a_hat_overflow);
  CHECK(std::isinf(bundle_from_json(to_json(o)).C0));
}
