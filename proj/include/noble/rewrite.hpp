#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noble/aggregation.hpp"
#include "noble/bound.hpp"

namespace noble {

// A sequence beta^[N], N >= 0: listed entries with an optional geometric tail,
// or a matrix-product bound summed through the eigen split.
struct BetaSequence {
  std::vector<Bound> terms;
  std::optional<TailDescriptor> tail;
  std::optional<MatrixBoundSpec> matrix;
  bool weighted = false;  // matrix: use the (alpha N + beta) weighted form

  bool empty() const { return terms.empty() && !matrix; }
  // Sum over N >= from of the given parity.
  Bound sum(Parity p, int from = 0) const;
  bool nonnegative() const;
};

struct BetaLedger {
  int d = 0;

  // mu and mubar enclosures, beta_mu >= mubar/mu, beta_mu_lower <= mu
  Bound mu, mubar;
  Bound beta_mu = Bound(1);
  Bound beta_mu_lower = Bound(0);

  // per-N sequences
  BetaSequence xi, xi_iota, dxi, dxi_iota_0, dxi_iota_iota;

  // split constants
  Bound xi_alpha0_10 = 0, xi_alpha0_01 = 0;
  Bound xi_alphae1_10 = 0, xi_alphae1_01 = 0;
  Bound xi_iota_alpha_I = 0, sum_xi_iota_alpha_I = 0;
  Bound xi_iota_alpha_II = 0, sum_xi_iota_alpha_II = 0;
  Bound sum_psi_alpha_I_01 = 0, sum_psi_alpha_I_10 = 0;
  Bound sum_psi_alpha_II_01 = 0, sum_psi_alpha_II_10 = 0;
  Bound sum_pi_alpha_lower = 0, sum_pi_alpha_upper = 0;
  Bound psi0_lower = 0, sum_pi1_lower = 0;

  // remainder splits, index N in {0, 1}
  Bound xi_R[2] = {0, 0}, dxi_R[2] = {0, 0};
  Bound psi_R_I[2] = {0, 0}, dpsi_R_I[2] = {0, 0};
  Bound psi_R_II[2] = {0, 0}, dpsi_R_II[2] = {0, 0};
  // N = 0 only
  Bound xi_iota_R_I = 0, dxi_iota_R_I = 0;
  Bound xi_iota_R_II = 0, dxi_iota_R_II = 0;
  Bound pi_R = 0, dpi_R = 0;

  // initial-point value f1(z_I)
  Bound f1_initial = Bound(1);

  // Effective mu enclosure [max(mu.lo, beta_mu_lower), mu.hi].
  Bound mu_eff() const;
  // Nonnegativity and the contraction (2d-1) mubar/(1-mu) beta^abs_{Xi^iota} < 1.
  void validate() const;
  // Entries that are not an enclosure of a nonnegative number, by name.
  std::vector<std::string> negative_entries() const;
};

// Sums of the sequences used by every step.
struct SequenceSums {
  Bound abs_xi, abs_xi_iota, abs_dxi, abs_dxi_iota_0, abs_dxi_iota_iota;
  Bound odd_xi, odd_xi_iota, odd_dxi, odd_dxi_iota_0, odd_dxi_iota_iota;
  Bound even_xi, even_xi_iota, even_dxi, even_dxi_iota_0, even_dxi_iota_iota;
};
SequenceSums sequence_sums(const BetaLedger& L);

struct Step1Bounds {
  Bound c_phi;          // enclosure [lower, upper]
  Bound alpha_F;        // enclosure [lower, upper]
  Bound c_phi_lo, c_phi_hi, alpha_F_lo;  // enclosures of the endpoint expressions
  Bound abs_alpha_phi;  // upper bound (point)
  Bound beta_Pi;        // upper bound on sum_{x,kappa} Pi^{iota,kappa}
  Bound beta_Psi;       // sum_x Psi^kappa >= -beta_Psi
};

struct RewriteBounds {
  Bound c_phi, alpha_F, abs_alpha_phi;
  Bound c_phi_lo, c_phi_hi, alpha_F_lo;  // enclosures of the endpoint expressions
  Bound beta_RF, beta_RPhi;
  Bound beta_DRF, beta_DRPhi;
  Bound beta_DRF_lower;
  Bound beta_Pi, beta_Psi;
  Bound beta_mu;
  Bound geometric_factor;  // 2d mubar beta^abs_{Xi^iota}/(1-mu)
  Bound contraction;       // (2d-1) mubar beta^abs_{Xi^iota}/(1-mu)

  Bound gate_F() const;    // alpha_F.lo - lower beta_{Delta R,F}
  Bound gate_Phi() const;  // c_Phi.lo - |alpha_Phi| - beta_{R,Phi}
  // Throws GateViolation naming the failed inequality.
  void check_gates() const;
};

Step1Bounds step1_simple_bounds(const BetaLedger& L);
// (beta_{R,F}, beta_{R,Phi})
std::pair<Bound, Bound> step2_R_l1(const BetaLedger& L);
// (beta_{Delta R,Phi}, beta_{Delta R,F})
std::pair<Bound, Bound> step3_step4_weighted(const BetaLedger& L);
Bound step5_lower_RF(const BetaLedger& L);

// All steps plus the positivity gates.
RewriteBounds rewrite_bounds(const BetaLedger& L, bool check = true);

// The all-zero ledger at mu = mubar = m.
BetaLedger null_ledger(int d, const Bound& m);

}  // namespace noble
