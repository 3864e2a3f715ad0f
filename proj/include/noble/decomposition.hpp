#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "noble/lattice.hpp"

namespace noble {

// Synthetic rewrite Phi = c_Phi + alpha_Phi D + R_Phi, F = c_F + alpha_F D + R_F with finite-support
// totally rotationally symmetric remainders given by canonical representative and value.
struct SyntheticRewrite {
  int d = 3;
  double c_phi = 1, alpha_phi = 0, c_F = 0, alpha_F = 1;
  std::vector<std::pair<Coords, double>> R_F, R_phi;
};

struct DecompositionTerms {
  double G = 0;
  double H[5] = {0, 0, 0, 0, 0};
  double minus_laplacian_fd = 0;  // -Delta G by finite differences
  double residual = 0;            // |sum H - (-Delta G)|
};

struct DecompositionResult {
  double max_residual = 0;
  double min_distance_to_pole = 0;  // min |1 - F(k)| over the stencil points
  std::vector<DecompositionTerms> samples;
};

// Random remainders supported on |x|_1 <= radius with amplitude <= amp, and
// constants with 1 - F(0) bounded away from 0.
SyntheticRewrite random_synthetic(int d, std::uint64_t seed, int radius = 2, double amp = 0.02);

// Terms at one k, with the 4th-order 5-point stencil for the Laplacian.
DecompositionTerms decomposition_terms(const SyntheticRewrite& s, const std::vector<double>& k, double h = 1e-3);

// Throws SyntheticPoleTooClose when |1 - F| < pole_tol at a stencil point.
DecompositionResult decomposition_check(const SyntheticRewrite& s, const std::vector<std::vector<double>>& ks,
                                        double h = 1e-3, double pole_tol = 1e-2);

}  // namespace noble
