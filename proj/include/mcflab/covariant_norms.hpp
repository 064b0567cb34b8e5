#pragma once

#include <array>
#include <vector>

#include "mcflab/jet.hpp"

namespace mcflab {

constexpr int kMaxDerivativeOrder = 8;

// Arclength jets along a meridian of a surface of revolution ds^2 + rho(s)^2 g_S.
// k_axial, k_rot: principal curvature functions; psi = rho'/rho.
struct MeridianJets {
  Jet k_axial, k_rot, psi;
};

using DerivativeNorms = std::array<double, kMaxDerivativeOrder + 1>;  // index k = 1..8, [0] unused

// Exact |nabla^k h| for k = 1..kmax on the n-dimensional surface, from jets of
// size >= kmax + 1. Entries past kmax are NaN.
std::vector<DerivativeNorms> covariant_derivative_norms(const std::vector<MeridianJets>& jets, int n, int kmax);

}  // namespace mcflab
