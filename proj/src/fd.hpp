#pragma once

#include <vector>

namespace mcflab::detail {

// Fornberg weights: w[k][j] approximates d^k/dx^k at z from samples at x[j].
std::vector<std::vector<double>> fornberg(double z, const std::vector<double>& x, int max_order);

}  // namespace mcflab::detail
