#pragma once
// Direct long double evaluation of the rewrite bounds and the H-term bounds.
// Series are summed term by term instead of through closed forms.

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "noble/bootstrap.hpp"
#include "noble/rewrite.hpp"

namespace oracle {

using ld = long double;

struct Seq {
  std::vector<double> v;
  double ratio = -1;  // < 0: no tail

  ld at(int N) const {
    int n = static_cast<int>(v.size());
    if (N < n) return v[N];
    if (ratio < 0 || n == 0) return 0;
    return static_cast<ld>(v.back()) * std::pow(static_cast<ld>(ratio), N - n + 1);
  }
  // 0 all, 1 odd, 2 even; N >= from
  ld sum(int parity = 0, int from = 0) const {
    ld s = 0;
    int last = ratio < 0 ? static_cast<int>(v.size()) : static_cast<int>(v.size()) + 6000;
    for (int N = from; N < last; ++N) {
      if (parity == 1 && N % 2 == 0) continue;
      if (parity == 2 && N % 2 == 1) continue;
      s += at(N);
    }
    return s;
  }
};

struct Ledger {
  int d = 11;
  double mu = 0.04, mubar = 0.041;
  Seq xi, xi_iota, dxi, dxi_iota_0, dxi_iota_iota;
  std::map<std::string, double> s;  // split and remainder constants by ledger key
  double get(const std::string& k) const {
    auto it = s.find(k);
    return it == s.end() ? 0.0 : it->second;
  }
};

inline Ledger random_ledger(std::mt19937_64& rng, bool tails) {
  std::uniform_real_distribution<double> U(0, 1);
  Ledger L;
  L.d = 9 + static_cast<int>(U(rng) * 7);
  double m0 = 1.0 / (2 * L.d - 1);
  L.mu = m0 * (0.9 + 0.1 * U(rng));
  L.mubar = L.mu * (1 + 0.02 * U(rng));
  auto seq = [&](double scale) {
    Seq q;
    int n = 3 + static_cast<int>(U(rng) * 4);
    double a = scale;
    for (int i = 0; i < n; ++i) {
      q.v.push_back(a * U(rng));
      a *= 0.3;
    }
    if (tails && U(rng) < 0.5) q.ratio = 0.1 + 0.3 * U(rng);
    return q;
  };
  L.xi = seq(0.02);
  L.xi_iota = seq(0.05);
  L.dxi = seq(0.05);
  L.dxi_iota_0 = seq(0.05);
  L.dxi_iota_iota = seq(0.08);
  for (const char* k :
       {"xi_alpha0_10", "xi_alpha0_01", "xi_alphae1_10", "xi_alphae1_01", "xi_iota_alpha_I", "xi_iota_alpha_II",
        "sum_xi_iota_alpha_I", "sum_xi_iota_alpha_II", "sum_psi_alpha_I_01", "sum_psi_alpha_I_10",
        "sum_psi_alpha_II_01", "sum_psi_alpha_II_10", "sum_pi_alpha_lower", "sum_pi_alpha_upper", "psi0_lower",
        "sum_pi1_lower", "xi_R[0]", "xi_R[1]", "dxi_R[0]", "dxi_R[1]", "psi_R_I[0]", "psi_R_I[1]", "dpsi_R_I[0]",
        "dpsi_R_I[1]", "psi_R_II[0]", "psi_R_II[1]", "dpsi_R_II[0]", "dpsi_R_II[1]", "xi_iota_R_I", "xi_iota_R_II",
        "dxi_iota_R_I", "dxi_iota_R_II", "pi_R", "dpi_R"})
    L.s[k] = 0.01 * U(rng);
  if (L.s["sum_pi_alpha_lower"] > L.s["sum_pi_alpha_upper"]) std::swap(L.s["sum_pi_alpha_lower"], L.s["sum_pi_alpha_upper"]);
  return L;
}

inline noble::BetaSequence to_seq(const Seq& q) {
  noble::BetaSequence s;
  for (double x : q.v) s.terms.push_back(noble::Bound(x));
  if (q.ratio >= 0) {
    noble::TailDescriptor t;
    t.ratio = noble::Bound(q.ratio);
    s.tail = t;
  }
  return s;
}

// mu is a point; beta_mu = mubar/mu.
inline noble::BetaLedger to_engine(const Ledger& L) {
  using noble::Bound;
  noble::BetaLedger B;
  B.d = L.d;
  B.mu = Bound(L.mu);
  B.mubar = Bound(L.mubar);
  B.beta_mu = (Bound(L.mubar) / Bound(L.mu)).upper();
  B.beta_mu_lower = Bound(L.mu);
  B.xi = to_seq(L.xi);
  B.xi_iota = to_seq(L.xi_iota);
  B.dxi = to_seq(L.dxi);
  B.dxi_iota_0 = to_seq(L.dxi_iota_0);
  B.dxi_iota_iota = to_seq(L.dxi_iota_iota);
  auto g = [&](const char* k) { return Bound(L.get(k)); };
  B.xi_alpha0_10 = g("xi_alpha0_10");
  B.xi_alpha0_01 = g("xi_alpha0_01");
  B.xi_alphae1_10 = g("xi_alphae1_10");
  B.xi_alphae1_01 = g("xi_alphae1_01");
  B.xi_iota_alpha_I = g("xi_iota_alpha_I");
  B.xi_iota_alpha_II = g("xi_iota_alpha_II");
  B.sum_xi_iota_alpha_I = g("sum_xi_iota_alpha_I");
  B.sum_xi_iota_alpha_II = g("sum_xi_iota_alpha_II");
  B.sum_psi_alpha_I_01 = g("sum_psi_alpha_I_01");
  B.sum_psi_alpha_I_10 = g("sum_psi_alpha_I_10");
  B.sum_psi_alpha_II_01 = g("sum_psi_alpha_II_01");
  B.sum_psi_alpha_II_10 = g("sum_psi_alpha_II_10");
  B.sum_pi_alpha_lower = g("sum_pi_alpha_lower");
  B.sum_pi_alpha_upper = g("sum_pi_alpha_upper");
  B.psi0_lower = g("psi0_lower");
  B.sum_pi1_lower = g("sum_pi1_lower");
  for (int k = 0; k < 2; ++k) {
    std::string i = "[" + std::to_string(k) + "]";
    B.xi_R[k] = Bound(L.get("xi_R" + i));
    B.dxi_R[k] = Bound(L.get("dxi_R" + i));
    B.psi_R_I[k] = Bound(L.get("psi_R_I" + i));
    B.dpsi_R_I[k] = Bound(L.get("dpsi_R_I" + i));
    B.psi_R_II[k] = Bound(L.get("psi_R_II" + i));
    B.dpsi_R_II[k] = Bound(L.get("dpsi_R_II" + i));
  }
  B.xi_iota_R_I = g("xi_iota_R_I");
  B.xi_iota_R_II = g("xi_iota_R_II");
  B.dxi_iota_R_I = g("dxi_iota_R_I");
  B.dxi_iota_R_II = g("dxi_iota_R_II");
  B.pi_R = g("pi_R");
  B.dpi_R = g("dpi_R");
  return B;
}

struct Rewrite {
  ld c_phi_lo, c_phi_hi, alpha_lo, alpha_hi, abs_alpha_phi, beta_Pi, beta_Psi;
  ld beta_RF, beta_RPhi, beta_DRPhi, beta_DRF, beta_DRF_lower;
};

inline Rewrite rewrite(const Ledger& L) {
  Rewrite o{};
  const ld d2 = 2.0L * L.d, mu = L.mu, mb = L.mubar, bmu = static_cast<ld>(L.mubar) / L.mu;
  auto g = [&](const std::string& k) { return static_cast<ld>(L.get(k)); };
  const ld AX = L.xi.sum(), AXI = L.xi_iota.sum(), ADX = L.dxi.sum();
  const ld ADI0 = L.dxi_iota_0.sum(), ADII = L.dxi_iota_iota.sum();

  // Step 1
  o.c_phi_lo = 1 - g("xi_alpha0_10") - d2 * mu / (1 - mu * mu) * g("xi_iota_alpha_I");
  o.c_phi_hi = 1 + g("xi_alpha0_01") + d2 * mu * mu / (1 - mu * mu) * g("xi_iota_alpha_II");
  o.alpha_lo = d2 * mu / (1 - mu * mu) *
               (1 - g("sum_psi_alpha_I_10") - mu * g("sum_psi_alpha_II_01") - g("sum_pi_alpha_upper") / (1 - mu * mu));
  o.alpha_hi = d2 * mu / (1 - mu * mu) *
               (1 + g("sum_psi_alpha_I_01") + mu * g("sum_psi_alpha_II_10") - g("sum_pi_alpha_lower") / (1 - mu * mu));
  o.abs_alpha_phi = std::max(d2 * g("xi_alphae1_10") + d2 * mu / (1 - mu * mu) * g("sum_xi_iota_alpha_I"),
                             d2 * g("xi_alphae1_01") + d2 * mu * mu / (1 - mu * mu) * g("sum_xi_iota_alpha_II"));
  o.beta_Pi = d2 * mb * L.xi_iota.sum(2) - g("sum_pi1_lower");
  o.beta_Psi = bmu * L.xi.sum(1) - g("psi0_lower");

  // Step 2: sum_n |F_n| and |Phi_n| term by term
  const ld base = d2 * mu / (1 - mu) * (1 + bmu * AX);
  const ld q = d2 * mb * AXI / (1 - mu);
  ld sumF = 0, sumPhi = 0;
  for (int n = 1; n < 4000; ++n) {
    ld qn = std::pow(q, n);
    if (n >= 2) sumF += base * qn;
    sumPhi += base * qn * AXI;
  }
  o.beta_RF = sumF +
              d2 * mu / (1 - mu * mu) *
                  ((g("psi_R_I[0]") + mu * g("psi_R_II[0]")) + (g("psi_R_I[1]") + mu * g("psi_R_II[1]")) +
                   bmu * (1 + mu) * L.xi.sum(0, 2)) +
              d2 * mu / std::pow(1 - mu * mu, 2) * (g("pi_R") + d2 * mb * L.xi_iota.sum(0, 1)) +
              std::pow(d2 * mu, 2) * mb / std::pow(1 - mu * mu, 2) * (2 + mu) * AXI +
              d2 * d2 * mb * mb / std::pow(1 - mu, 2) * AX * AXI;
  o.beta_RPhi = g("xi_R[0]") + g("xi_R[1]") + L.xi.sum(0, 2) + sumPhi + d2 * mb / (1 - mu) * AX * AXI +
                d2 * mu / (1 - mu * mu) * (g("xi_iota_R_I") + mu * g("xi_iota_R_II") + (1 + mu) * L.xi_iota.sum(0, 1));

  // Step 3
  const ld rho = mu / mb;
  const ld Q = d2 * mb / (1 - mu);
  const ld bracket = ADII + mu * ADI0;
  ld phin = 0;
  for (int n = 1; n < 4000; ++n)
    phin += std::pow(Q, n + 1) * std::pow(AXI, n) * (ADX * AXI + (n + 1) / (1 + mu) * (rho + AX) * bracket);
  o.beta_DRPhi = g("dxi_R[0]") + g("dxi_R[1]") + L.dxi.sum(0, 2) + phin +
                 d2 * mb / (1 - mu * mu) * ((1 + mu) * ADX * AXI + AX * bracket) +
                 d2 * mu / (1 - mu * mu) *
                     (g("dxi_iota_R_I") + mu * g("dxi_iota_R_II") + L.dxi_iota_iota.sum(0, 1) +
                      mu * L.dxi_iota_0.sum(0, 1));

  // Steps 4 and 5 share the F_n series
  ld fn = 0;
  for (int n = 2; n < 4000; ++n) {
    ld Qn1 = std::pow(Q, n + 1);
    fn += Qn1 * ADX * std::pow(AXI, n);
    fn += (n - 1) * Qn1 * std::pow(AXI, n - 1) / (1 + mu) * (rho + AX) * bracket;
    fn += Qn1 * std::pow(AXI, n - 1) / (1 + mu) * (rho + AX) * (bracket + AXI);
  }
  o.beta_DRF = fn +
               d2 * mu / (1 - mu * mu) *
                   (g("dpsi_R_I[0]") + g("dpsi_R_II[0]") + g("dpsi_R_I[1]") + g("dpsi_R_II[1]") +
                    bmu * (L.dxi.sum(0, 2) + L.xi.sum(0, 2) + mu * L.dxi.sum(0, 2))) +
               mu / std::pow(1 - mu * mu, 2) *
                   (g("dpi_R") + d2 * d2 * mb * (L.dxi_iota_iota.sum(0, 1) + L.xi_iota.sum(0, 1))) +
               d2 * d2 * mu * mu * mb / std::pow(1 - mu * mu, 2) * (ADII + ADI0 + AXI + mu * ADI0) +
               d2 * d2 * mb * mb / std::pow(1 - mu, 2) * ADX * AXI +
               d2 * d2 * mb * mb / ((1 - mu * mu) * (1 - mu)) * AX * (bracket + AXI);

  const ld oX = L.xi.sum(1), eX = L.xi.sum(2);
  const ld oXI = L.xi_iota.sum(1), eXI = L.xi_iota.sum(2);
  const ld oDX = L.dxi.sum(1), eDX = L.dxi.sum(2);
  const ld oD0 = L.dxi_iota_0.sum(1), eD0 = L.dxi_iota_0.sum(2);
  const ld oDI = L.dxi_iota_iota.sum(1), eDI = L.dxi_iota_iota.sum(2);
  // odd N >= 3 and even N >= 2
  o.beta_DRF_lower = fn +
                     d2 * mu / (1 - mu * mu) *
                         (g("dpsi_R_I[1]") + mu * g("dpsi_R_II[0]") +
                          bmu * (L.dxi.sum(1, 3) + L.xi.sum(1, 3) + mu * L.dxi.sum(2, 2))) +
                     mu / std::pow(1 - mu * mu, 2) *
                         (g("dpi_R") + d2 * d2 * mb * (L.dxi_iota_iota.sum(2, 2) + L.xi_iota.sum(2, 2))) +
                     std::pow(d2 * mu, 2) * mb / std::pow(1 - mu * mu, 2) * (oDI + oD0 + oXI + mu * eD0) +
                     std::pow(d2 * mb, 2) / std::pow(1 - mu * mu, 2) * (oDX * oXI * (1 + mu * mu) + 2 * mu * eDX * eXI) +
                     std::pow(d2 * mb, 2) / std::pow(1 - mu * mu, 2) * oX *
                         (oDI + oXI + mu * eD0 + mu * eXI + mu * eDI + mu * mu * oD0) +
                     std::pow(d2 * mb, 2) / std::pow(1 - mu * mu, 2) * eX *
                         (eDI + eXI + mu * oD0 + mu * oXI + mu * oDI + mu * mu * eD0);
  return o;
}

// H-term constants as plain numbers.
struct HC {
  ld cb, aP, al, ah, bRP, bDRP, bDRF, Kb, G2;
  ld mx() const { return std::max(std::fabs(ah - 1), std::fabs(al - 1)); }
};

inline HC random_hc(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(0, 1);
  HC k;
  k.cb = 0.95 + 0.1 * U(rng);
  k.aP = 0.02 * U(rng);
  k.al = 1.0 + 0.05 * U(rng);
  k.ah = k.al + 0.02 * U(rng);
  k.bRP = 0.02 * U(rng);
  k.bDRP = 0.05 * U(rng);
  k.bDRF = 0.05 * U(rng);
  k.Kb = 1.0 / (k.al - 0.01 * U(rng));
  k.G2 = 1.0 + U(rng);
  return k;
}

inline noble::HConstants to_engine(const HC& k) {
  using noble::Bound;
  noble::HConstants e;
  e.cb = Bound(static_cast<double>(k.cb));
  e.aP = Bound(static_cast<double>(k.aP));
  e.al = Bound(static_cast<double>(k.al));
  e.ah = Bound(static_cast<double>(k.ah));
  e.mx = max(abs(e.ah - Bound(1)), abs(e.al - Bound(1)));
  e.bRP = Bound(static_cast<double>(k.bRP));
  e.bDRP = Bound(static_cast<double>(k.bDRP));
  e.bDRF = Bound(static_cast<double>(k.bDRF));
  e.Kb = Bound(static_cast<double>(k.Kb));
  e.G2 = Bound(static_cast<double>(k.G2));
  return e;
}

using Lookup = std::function<ld(const std::string&, int, int)>;

// Line, bubble and triangle bounds for H_1, then H_2 .. H_5.
inline std::vector<ld> h_terms(const HC& k, int d, int n, int l, const Lookup& v, ld shift2) {
  auto J = [&](int a, int b) { return v("J", a, b); };
  auto T = [&](int a, int b) { return v("T", a, b); };
  auto Ts = [&](int a, int b) { return v("T*", a, b); };
  auto U = [&](int a, int b) { return v("U", a, b); };
  auto K = [&](int a, int b) { return v("K", a, b); };
  const ld cb = k.cb, aP = k.aP, al = k.al, ah = k.ah, mx = k.mx();
  const ld bRP = k.bRP, bDRP = k.bDRP, bDRF = k.bDRF, Kb = k.Kb, G2 = k.G2;
  std::vector<ld> H(5, 0);
  if (n == 0) {
    H[0] = cb * J(0, l) + aP * J(0, l + 1) + aP / al * v("I", 1, l + 1) +
           1.0L / (2.0L * d * d) * aP / (al * al) * shift2;
  } else if (n == 1) {
    H[0] = cb * cb / al * J(1, l) + cb / al * aP * J(0, l) + 2 * cb / al * aP * J(1, l + 1) +
           aP * aP / al * J(0, l + 1) + aP * aP / al * J(1, l + 2) +
           (bRP + bDRF * G2) / (al * al) * (cb * T(3, l) + aP * T(3, l + 1) + aP * T(2, l));
  } else {
    ld t1 = cb * cb / (al * al) * (cb * J(2, l) + aP * J(1, l) + 3 * aP * J(2, l + 1)) +
            aP * aP * cb / (al * al) * (2 * J(1, l + 1) + 3 * J(2, l + 2)) +
            aP * aP * aP / (al * al) * (J(2, l + 3) + J(1, l + 2));
    ld w = bRP + bDRP * G2;
    ld t2 = w / (al * al) * (cb / al + G2) * (cb * T(4, l) + aP * T(4, l + 1) + aP * T(3, l)) +
            aP * w / (al * al * al) * (cb * T(4, l + 1) + aP * T(4, l + 2) + aP * T(3, l + 1));
    H[0] = t1 + t2;
  }
  ld G2n = std::pow(G2, n);
  H[1] = bDRF * Kb * G2n * ((cb * Ts(n + 2, l) + aP * Ts(n + 2, l + 1)) * (1 / al + Kb) + aP / al * Ts(n + 1, l)) +
         ah * bDRP * Kb * Kb * Ts(n + 2, l);
  H[2] = 2 * std::pow(G2, n + 1) * Kb * Kb * (bDRF + ah * mx) * U(n + 3, l) +
         2 * G2n * Kb * Kb * aP * (bDRF / al + mx) * U(n + 2, l);
  H[3] = Kb * (bDRP * K(n, l) + bDRF * G2 * K(n + 1, l));
  H[4] = 2 * Kb * Kb * std::pow(G2, n + 1) * (2 * ah * bDRF + bDRF * bDRF) * U(n + 3, l) +
         2 * Kb * Kb * G2n * (ah * bDRP + aP * bDRF + bDRF * bDRP) * U(n + 2, l);
  return H;
}

// Overlap of an interval with [v (1 - rel), v (1 + rel)] for v >= 0 (or absolute tolerance near 0).
inline bool overlaps(const noble::Bound& b, ld v, ld rel = 1e-13L, ld abs_tol = 1e-30L) {
  ld tol = std::fabs(v) * rel + abs_tol;
  return b.lo_d() <= static_cast<double>(v + tol) && b.hi_d() >= static_cast<double>(v - tol);
}

}  // namespace oracle
