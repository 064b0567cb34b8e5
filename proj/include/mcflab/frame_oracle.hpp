#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace mcflab {

struct TwoFrameQuery {
  Eigen::MatrixXd h;
  Eigen::VectorXd v;
  double tol = 1e-6;
};

double min_two_frame_value(const Eigen::MatrixXd& h);

// Distance from v to the sum of the eigenspaces of the two lowest eigenvalues.
double eigenspace_sum_distance(const Eigen::MatrixXd& h, const Eigen::VectorXd& v);
bool eigenspace_sum_membership(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, double tol);

// Case split on lambda1 == lambda2 vs lambda1 < lambda2.
bool minimizing_frame_membership(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, double tol);

struct FrameSearchResult {
  double constrained_min = 0.0;  // over orthonormal frames whose span contains v
  double global_min = 0.0;       // over all orthonormal two-frames
  long candidates = 0;
  bool member = false;
};

// Randomized search with local refinement; uses no eigensolver.
FrameSearchResult brute_force_frame_search(const Eigen::MatrixXd& h, const Eigen::VectorXd& v, double tol,
                                           long candidates_per_search, std::uint64_t seed);

// Random instances: half with v drawn from the sum of the two lowest
// eigenspaces, half at distance >= 1e-2 from it; a quarter of the matrices
// have a tied lowest eigenvalue.
struct ClaimValidation {
  int n = 0;
  long instances = 0;
  long members = 0;
  long analytic_disagreements = 0;  // analytic frame test vs eigenspace sum
  long brute_disagreements = 0;     // brute-force search vs eigenspace sum
  long candidates = 0;              // frames evaluated per instance
};

ClaimValidation validate_claim(int n, long instances, std::uint64_t seed, long candidates_per_search = 50000,
                               double tol = 1e-6);

}  // namespace mcflab
