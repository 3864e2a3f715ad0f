#pragma once

#include <vector>

#include "noble/bound.hpp"
#include "noble/lattice.hpp"

namespace noble {

class IntegralTable;

// D^sin(k) = (1/2d)(1 - D(2k))
Bound dsin(const std::vector<Bound>& k);

// C_z(k) = 1/(1 - 2dz D(k)); the dhat overloads take D(k) directly.
Bound srw_twopoint_dhat(int d, const Bound& z, const Bound& dhat);
Bound srw_twopoint_k(int d, const Bound& z, const std::vector<Bound>& k);

// B_z(k) = (1-z^2)/(1 + (2d-1)z^2 - 2dz D(k))
Bound nbw_twopoint_dhat(int d, const Bound& z, const Bound& dhat);
Bound nbw_twopoint_k(int d, const Bound& z, const std::vector<Bound>& k);

Bound chi_srw(int d, const Bound& z);
Bound chi_nbw(int d, const Bound& z);

// Partial sum of the SRW series to order N with its geometric remainder.
Bound srw_series_dhat(int d, const Bound& z, const Bound& dhat, int N);

// B_{1/(2d-1)}(x) = (2d-2)/(2d-1) C_{1/2d}(x) = (2d-2)/(2d-1) I_{1,0}(x)
Bound nbw_critical_x(IntegralTable& t, const Coords& x);

struct LambdaLink {
  Bound lambda;
  Bound mu_back;  // mu recovered from lambda
};

// lambda = (1+psi) mu / (1 + pi - mu psi), and the inverse map back to mu.
LambdaLink lambda_link(const Bound& mu, const Bound& psi, const Bound& pi_row);

// |B_lambda(0) Phi(0) - G(0)| where G(0) is built from the 2d x 2d matrix form
// with a symmetric Pi given by its same / opposite / orthogonal direction entries.
double lambda_link_residual(int d, double mu, double psi_val, double pi_same, double pi_opp, double pi_orth,
                            double phi0);

}  // namespace noble
