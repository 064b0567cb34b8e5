#include <doctest.h>

#include <cmath>
#include <random>

#include "mcflab/error.hpp"
#include "mcflab/frame_oracle.hpp"

using namespace mcflab;

namespace {

Eigen::MatrixXd diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(d.size());
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

Eigen::VectorXd unit(std::initializer_list<double> d) {
  Eigen::VectorXd v(d.size());
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.normalized();
}

Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0, 1);
  Eigen::MatrixXd G = Eigen::MatrixXd::NullaryExpr(n, n, [&] { return N(rng); });
  return Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
}

}  // namespace

TEST_CASE("min two-frame value") {
  CHECK(min_two_frame_value(diag({1, 2, 3})) == doctest::Approx(3.0));
  CHECK(min_two_frame_value(Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(2.0));
  // Against random-search frames.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N(0, 1);
  Eigen::MatrixXd h(5, 5);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = N(rng);
  FrameSearchResult b = brute_force_frame_search(h, Eigen::VectorXd::Unit(5, 0), 1e-6, 100000, 9);
  CHECK(std::abs(b.global_min - min_two_frame_value(h)) < 1e-6);
}

TEST_CASE("eigenspace sum membership examples") {
  CHECK(eigenspace_sum_membership(diag({1, 2, 3}), unit({1, 0, 0}), 1e-6));
  CHECK_FALSE(eigenspace_sum_membership(diag({1, 2, 3}), unit({0, 0, 1}), 1e-6));
  CHECK(eigenspace_sum_membership(diag({1, 1, 3}), unit({1, 1, 0}), 1e-6));
}

TEST_CASE("minimizing frame membership examples") {
  CHECK(minimizing_frame_membership(diag({1, 2, 3}), unit({1, 1, 0}), 1e-6));
  CHECK_FALSE(minimizing_frame_membership(diag({1, 2, 3}), unit({1, 0, 1}), 1e-6));
  FrameSearchResult b = brute_force_frame_search(diag({1, 2, 3}), unit({1, 0, 1}), 1e-6, 50000, 1);
  CHECK_FALSE(b.member);
  CHECK(b.constrained_min > b.global_min + 0.1);
  // Any lambda1 eigenvector.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd Q = random_orthogonal(4, rng);
    Eigen::MatrixXd h = Q * diag({-1, 0.5, 2, 3}) * Q.transpose();
    h = 0.5 * (h + h.transpose());
    CHECK(minimizing_frame_membership(h, Q.col(0), 1e-6));
  }
}

TEST_CASE("query validation") {
  Eigen::MatrixXd h = diag({1, 2, 3});
  CHECK_THROWS_AS(minimizing_frame_membership(h, Eigen::Vector3d(1, 1, 0), 1e-6), PreconditionError);
  h(0, 1) = 1e-3;
  CHECK_THROWS_AS(eigenspace_sum_membership(h, unit({1, 0, 0}), 1e-6), PreconditionError);
}

TEST_CASE("rotation equivariance and conjugation invariance") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> N(0, 1);
  for (int t = 0; t < 200; ++t) {
    int n = 3 + t % 4;
    Eigen::MatrixXd h(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = N(rng);
    if (t % 3 == 0) {
      // Tied lowest eigenvalue.
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      Eigen::VectorXd ev = es.eigenvalues();
      ev(1) = ev(0);
      h = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
      h = 0.5 * (h + h.transpose());
    }
    Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(n, [&] { return N(rng); }).normalized();
    if (t % 2 == 0) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
      v = (N(rng) * es.eigenvectors().col(0) + N(rng) * es.eigenvectors().col(1)).normalized();
    }
    Eigen::MatrixXd Q = random_orthogonal(n, rng);
    Eigen::MatrixXd hq = Q * h * Q.transpose();
    hq = 0.5 * (hq + hq.transpose());
    Eigen::VectorXd vq = (Q * v).normalized();
    CHECK(minimizing_frame_membership(h, v, 1e-6) == minimizing_frame_membership(hq, vq, 1e-6));
    CHECK(eigenspace_sum_membership(h, v, 1e-6) == eigenspace_sum_membership(hq, vq, 1e-6));
    CHECK(std::abs(min_two_frame_value(h) - min_two_frame_value(hq)) < 1e-10);
  }
}

TEST_CASE("claim validation on a small batch") {
  for (int n = 3; n <= 6; ++n) {
    ClaimValidation c = validate_claim(n, 40, 100 + n, 20000);
    CHECK(c.analytic_disagreements == 0);
    CHECK(c.brute_disagreements == 0);
    CHECK(c.members >= 20);
  }
  CHECK_THROWS_AS(validate_claim(2, 10, 1), PreconditionError);
}
