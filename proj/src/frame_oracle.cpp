#include "mcflab/frame_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "mcflab/error.hpp"

namespace mcflab {
namespace {

void check_query(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, const char* op) {
  if (h.rows() != h.cols() || h.rows() < 2)
    throw PreconditionError("frame_oracle", op, "h must be square with n >= 2");
  double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw PreconditionError("frame_oracle", op, "h not symmetric");
  if (v.size() != h.rows()) throw PreconditionError("frame_oracle", op, "dimension mismatch");
  if (std::abs(v.norm() - 1.0) > 1e-12) throw PreconditionError("frame_oracle", op, "v must be a unit vector");
}

struct Eigenspaces {
  Eigen::MatrixXd V1, V2;
  bool tied = false;
};

Eigenspaces low_eigenspaces(const Eigen::MatrixXd& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const int n = static_cast<int>(ev.size());
  double gap = 1e-8 * std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
  auto cluster_end = [&](int start) {
    int e = start + 1;
    while (e < n && ev(e) - ev(e - 1) <= gap) ++e;
    return e;
  };
  Eigenspaces out;
  int e1 = cluster_end(0);
  out.V1 = es.eigenvectors().leftCols(e1);
  if (e1 >= 2) {
    out.tied = true;
    out.V2 = out.V1;
  } else {
    int e2 = cluster_end(1);
    out.V2 = es.eigenvectors().middleCols(1, e2 - 1);
  }
  return out;
}

double distance_to_span(const Eigen::MatrixXd& B, const Eigen::VectorXd& x) {
  return (x - B * (B.transpose() * x)).norm();
}

}  // namespace

double min_two_frame_value(const Eigen::MatrixXd& h) {
  Eigen::VectorXd v = Eigen::VectorXd::Unit(h.rows(), 0);
  check_query(h, v, "min_two_frame_value");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (h + h.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0) + es.eigenvalues()(1);
}

double eigenspace_sum_distance(const Eigen::MatrixXd& h, const Eigen::VectorXd& v) {
  check_query(h, v, "eigenspace_sum_membership");
  Eigenspaces sp = low_eigenspaces(h);
  if (sp.tied) return distance_to_span(sp.V1, v);
  Eigen::MatrixXd E(h.rows(), sp.V1.cols() + sp.V2.cols());
  E << sp.V1, sp.V2;
  return distance_to_span(E, v);
}

bool eigenspace_sum_membership(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, double tol) {
  return eigenspace_sum_distance(h, v) < tol;
}

bool minimizing_frame_membership(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, double tol) {
  check_query(h, v, "minimizing_frame_membership");
  Eigenspaces sp = low_eigenspaces(h);
  if (sp.tied) {
    // Minimizing frames span 2-planes inside V1, so v must lie in V1.
    return distance_to_span(sp.V1, v) < tol;
  }
  // lambda1 simple: frames are {e1, e2} with e2 in V2. Split v = v1 e1 + rest.
  Eigen::VectorXd e1 = sp.V1.col(0);
  Eigen::VectorXd rest = v - v.dot(e1) * e1;
  return distance_to_span(sp.V2, rest) < tol;
}

namespace {

using Rng = std::mt19937_64;
// Stack-allocated vectors: the searches evaluate ~1e5 frames each.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 16, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 16, 16>;

Vec gaussian(Rng& rng, int n) {
  std::normal_distribution<double> N(0.0, 1.0);
  Vec g(n);
  for (int i = 0; i < n; ++i) g(i) = N(rng);
  return g;
}

// Orthonormalize b against a (a unit) and normalize; false if degenerate.
bool complete_frame(const Vec& a, Vec& b) {
  b -= b.dot(a) * a;
  double nb = b.norm();
  if (nb < 1e-12) return false;
  b /= nb;
  return true;
}

double constrained_search(const Mat& h, const Vec& v, long budget, Rng& rng) {
  const int n = static_cast<int>(h.rows());
  const double hv = v.dot(h * v);
  auto f = [&](const Vec& e2) { return hv + e2.dot(h * e2); };
  long random_phase = budget / 5;
  Vec best;
  double fbest = INFINITY;
  long used = 0;
  while (used < random_phase) {
    Vec e2 = gaussian(rng, n);
    ++used;
    if (!complete_frame(v, e2)) continue;
    double val = f(e2);
    if (val < fbest) {
      fbest = val;
      best = e2;
    }
  }
  double sigma = 0.3;
  while (used < budget) {
    Vec e2 = best + sigma * gaussian(rng, n);
    ++used;
    if (!complete_frame(v, e2)) continue;
    double val = f(e2);
    if (val < fbest) {
      fbest = val;
      best = e2;
      sigma = std::min(1.0, sigma * 1.5);
    } else {
      sigma = std::max(1e-12, sigma * 0.9);
    }
  }
  return fbest;
}

double global_search(const Mat& h, long budget, Rng& rng) {
  const int n = static_cast<int>(h.rows());
  auto f = [&](const Vec& a, const Vec& b) { return a.dot(h * a) + b.dot(h * b); };
  long random_phase = budget / 5;
  Vec ba, bb;
  double fbest = INFINITY;
  long used = 0;
  auto frame = [&](Vec a, Vec b, Vec& oa, Vec& ob) {
    double na = a.norm();
    if (na < 1e-12) return false;
    a /= na;
    if (!complete_frame(a, b)) return false;
    oa = std::move(a);
    ob = std::move(b);
    return true;
  };
  while (used < random_phase) {
    Vec a, b;
    ++used;
    if (!frame(gaussian(rng, n), gaussian(rng, n), a, b)) continue;
    double val = f(a, b);
    if (val < fbest) {
      fbest = val;
      ba = a;
      bb = b;
    }
  }
  double sigma = 0.3;
  while (used < budget) {
    Vec a, b;
    ++used;
    if (!frame(ba + sigma * gaussian(rng, n), bb + sigma * gaussian(rng, n), a, b)) continue;
    double val = f(a, b);
    if (val < fbest) {
      fbest = val;
      ba = a;
      bb = b;
      sigma = std::min(1.0, sigma * 1.5);
    } else {
      sigma = std::max(1e-12, sigma * 0.9);
    }
  }
  return fbest;
}

}  // namespace

FrameSearchResult brute_force_frame_search(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, double tol,
                                           long candidates_per_search, std::uint64_t seed) {
  check_query(h, v, "brute_force_frame_search");
  if (candidates_per_search < 100)
    throw PreconditionError("frame_oracle", "brute_force_frame_search", "candidate budget too small");
  Rng rng(seed);
  FrameSearchResult r;
  if (h.rows() > 16) throw PreconditionError("frame_oracle", "brute_force_frame_search", "n must be <= 16");
  Mat hm = h;
  Vec vm = v;
  r.constrained_min = constrained_search(hm, vm, candidates_per_search, rng);
  r.global_min = global_search(hm, candidates_per_search, rng);
  r.global_min = std::min(r.global_min, r.constrained_min);
  r.candidates = 2 * candidates_per_search;
  double scale = 0.0;
  for (int i = 0; i < h.rows(); ++i) scale = std::max(scale, h.row(i).cwiseAbs().sum());
  r.member = r.constrained_min - r.global_min <= tol * std::max(scale, 1e-300);
  return r;
}

ClaimValidation validate_claim(int n, long instances, std::uint64_t seed, long candidates, double tol) {
  if (n < 3 || instances < 1) throw PreconditionError("frame_oracle", "validate_claim", "requires n >= 3 and instances >= 1");
  Rng rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  ClaimValidation cv;
  cv.n = n;
  cv.instances = instances;
  for (long it = 0; it < instances; ++it) {
    Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::NullaryExpr(n, n, [&] {
                          return std::normal_distribution<double>(0.0, 1.0)(rng);
                        })).householderQ();
    Eigen::VectorXd ev(n);
    for (int i = 0; i < n; ++i) ev(i) = 2.0 * U(rng);
    std::sort(ev.data(), ev.data() + n);
    for (int i = 1; i < n; ++i) ev(i) = std::max(ev(i), ev(i - 1) + 0.05);
    if (it % 4 == 3) ev(1) = ev(0);
    Eigen::MatrixXd h = Q * ev.asDiagonal() * Q.transpose();
    h = 0.5 * (h + h.transpose());
    bool member = it % 2 == 0;
    Eigen::VectorXd v;
    if (member) {
      v = U(rng) * Q.col(0) + U(rng) * Q.col(1);
      if (v.norm() < 1e-3) v = Q.col(0);
    } else {
      do {
        v = gaussian(rng, n);
        v.normalize();
      } while (eigenspace_sum_distance(h, v) < 1e-2);
    }
    v.normalize();
    bool truth = eigenspace_sum_membership(h, v, tol);
    cv.members += truth;
    if (minimizing_frame_membership(h, v, tol) != truth) ++cv.analytic_disagreements;
    FrameSearchResult b = brute_force_frame_search(h, v, tol, candidates, seed * 1000003ULL + std::uint64_t(it));
    cv.candidates = b.candidates;
    if (b.member != truth) ++cv.brute_disagreements;
  }
  return cv;
}

}  // namespace mcflab
