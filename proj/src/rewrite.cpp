#include "noble/rewrite.hpp"

#include "noble/error.hpp"

namespace noble {

Bound BetaSequence::sum(Parity p, int from) const {
  if (from < 0) from = 0;
  if (matrix) {
    Bound total = geometric_sum(*matrix, p, weighted).value;
    if (from == 0) return total;
    Bound head = partial_sum(*matrix, p, weighted, from);
    return clamp_nonneg(total - head);
  }
  if (from == 0) return scalar_series_sum(terms, p, tail);
  std::vector<Bound> t = terms;
  const int len = static_cast<int>(t.size());
  for (int i = 0; i < from && i < len; ++i) t[i] = Bound(0);
  if (!tail) return scalar_series_sum(t, p, tail);
  // pin the anchor before the listed entries are zeroed, then move the tail start past from
  TailDescriptor shifted = *tail;
  int start = tail->start >= 0 ? tail->start : len;
  Bound anchor;
  if (tail->anchor)
    anchor = *tail->anchor;
  else if (len > 0 && start >= len)
    anchor = abs(terms.back()) * tail->ratio.pow(start - len + 1);
  else
    return scalar_series_sum(t, p, tail);
  if (from > start) {
    anchor = abs(anchor) * tail->ratio.pow(from - start);
    start = from;
  }
  shifted.start = start;
  shifted.anchor = anchor;
  return scalar_series_sum(t, p, shifted);
}

bool BetaSequence::nonnegative() const {
  for (const auto& b : terms)
    if (!b.certainly_nonneg()) return false;
  if (tail && tail->anchor && !tail->anchor->certainly_nonneg()) return false;
  return true;
}

Bound BetaLedger::mu_eff() const {
  Bound lo = max(mu.lower(), beta_mu_lower.lower());
  if (!lo.certainly_le(mu.upper())) fail("LedgerError", "beta_mu_lower exceeds the upper end of mu");
  return Bound(lo, mu.upper());
}

std::vector<std::string> BetaLedger::negative_entries() const {
  std::vector<std::string> bad;
  auto chk = [&](const char* name, const Bound& b) {
    if (!b.certainly_nonneg()) bad.push_back(name);
  };
  auto seq = [&](const char* name, const BetaSequence& s) {
    if (!s.nonnegative()) bad.push_back(name);
  };
  chk("mu", mu);
  chk("mubar", mubar);
  chk("beta_mu", beta_mu);
  seq("xi", xi);
  seq("xi_iota", xi_iota);
  seq("dxi", dxi);
  seq("dxi_iota_0", dxi_iota_0);
  seq("dxi_iota_iota", dxi_iota_iota);
  chk("xi_alpha0_10", xi_alpha0_10);
  chk("xi_alpha0_01", xi_alpha0_01);
  chk("xi_alphae1_10", xi_alphae1_10);
  chk("xi_alphae1_01", xi_alphae1_01);
  chk("xi_iota_alpha_I", xi_iota_alpha_I);
  chk("xi_iota_alpha_II", xi_iota_alpha_II);
  chk("sum_xi_iota_alpha_I", sum_xi_iota_alpha_I);
  chk("sum_xi_iota_alpha_II", sum_xi_iota_alpha_II);
  chk("sum_psi_alpha_I_01", sum_psi_alpha_I_01);
  chk("sum_psi_alpha_I_10", sum_psi_alpha_I_10);
  chk("sum_psi_alpha_II_01", sum_psi_alpha_II_01);
  chk("sum_psi_alpha_II_10", sum_psi_alpha_II_10);
  for (int k = 0; k < 2; ++k) {
    chk("xi_R", xi_R[k]);
    chk("dxi_R", dxi_R[k]);
    chk("psi_R_I", psi_R_I[k]);
    chk("dpsi_R_I", dpsi_R_I[k]);
    chk("psi_R_II", psi_R_II[k]);
    chk("dpsi_R_II", dpsi_R_II[k]);
  }
  chk("xi_iota_R_I", xi_iota_R_I);
  chk("xi_iota_R_II", xi_iota_R_II);
  chk("dxi_iota_R_I", dxi_iota_R_I);
  chk("dxi_iota_R_II", dxi_iota_R_II);
  chk("pi_R", pi_R);
  chk("dpi_R", dpi_R);
  return bad;
}

void BetaLedger::validate() const {
  if (d < 2) fail("LedgerError", "dimension must be at least 2");
  auto bad = negative_entries();
  if (!bad.empty()) {
    std::string s;
    for (const auto& b : bad) s += (s.empty() ? "" : ", ") + b;
    fail("NegativeEntry", "entries must be nonnegative: " + s);
  }
  if (sum_pi_alpha_upper.certainly_lt(sum_pi_alpha_lower))
    fail("LedgerError", "sum_pi_alpha_lower " + sum_pi_alpha_lower.str(8) + " exceeds sum_pi_alpha_upper " +
                            sum_pi_alpha_upper.str(8));
  if (!mu.certainly_positive() || !mu.certainly_lt(Bound::rational(1, 2)))
    fail("LedgerError", "mu must lie in (0, 1/2), got " + mu.str(8));
  Bound m = mu_eff();
  Bound c = Bound(2 * d - 1) * mubar / (Bound(1) - m) * xi_iota.sum(Parity::all);
  if (!c.certainly_lt(Bound(1)))
    fail("GateViolation", "(2d-1) mubar/(1-mu) beta^abs_{Xi^iota} < 1 fails: value " + c.str(10));
}

SequenceSums sequence_sums(const BetaLedger& L) {
  SequenceSums s;
  s.abs_xi = L.xi.sum(Parity::all);
  s.abs_xi_iota = L.xi_iota.sum(Parity::all);
  s.abs_dxi = L.dxi.sum(Parity::all);
  s.abs_dxi_iota_0 = L.dxi_iota_0.sum(Parity::all);
  s.abs_dxi_iota_iota = L.dxi_iota_iota.sum(Parity::all);
  s.odd_xi = L.xi.sum(Parity::odd);
  s.odd_xi_iota = L.xi_iota.sum(Parity::odd);
  s.odd_dxi = L.dxi.sum(Parity::odd);
  s.odd_dxi_iota_0 = L.dxi_iota_0.sum(Parity::odd);
  s.odd_dxi_iota_iota = L.dxi_iota_iota.sum(Parity::odd);
  s.even_xi = L.xi.sum(Parity::even);
  s.even_xi_iota = L.xi_iota.sum(Parity::even);
  s.even_dxi = L.dxi.sum(Parity::even);
  s.even_dxi_iota_0 = L.dxi_iota_0.sum(Parity::even);
  s.even_dxi_iota_iota = L.dxi_iota_iota.sum(Parity::even);
  return s;
}

namespace {

struct Common {
  Bound one = Bound(1);
  Bound dd;     // 2d
  Bound m;      // mu
  Bound mb;     // mubar
  Bound ratio;  // beta_mu
  Bound rho;    // sup mu/mubar
  Bound q;      // 2d mubar/(1-mu)
  Bound r;      // q beta^abs_{Xi^iota}
  Bound k1;     // 2d mu/(1-mu^2)
  Bound om2;    // 1-mu^2
  SequenceSums s;
};

Common common(const BetaLedger& L) {
  Common c;
  c.dd = Bound(2 * L.d);
  c.m = L.mu_eff();
  c.mb = L.mubar;
  c.ratio = L.beta_mu;
  c.rho = (L.mu / L.mubar).upper();
  c.om2 = c.one - c.m.square();
  c.k1 = c.dd * c.m / c.om2;
  c.s = sequence_sums(L);
  c.q = c.dd * c.mb / (c.one - c.m);
  c.r = c.q * c.s.abs_xi_iota;
  if (!c.r.certainly_lt(c.one))
    fail("GeometricFactorNotContractive",
         "2d mubar beta^abs_{Xi^iota}/(1-mu) < 1 fails: value " + c.r.str(10));
  return c;
}

}  // namespace

Step1Bounds step1_simple_bounds(const BetaLedger& L) {
  Common c = common(L);
  const Bound& m = c.m;
  Step1Bounds out;
  Bound lo = c.one - L.xi_alpha0_10 - c.k1 * L.xi_iota_alpha_I;
  Bound hi = c.one + L.xi_alpha0_01 + c.k1 * m * L.xi_iota_alpha_II;
  out.c_phi = Bound(lo.lower(), hi.upper());
  out.c_phi_lo = lo;
  out.c_phi_hi = hi;

  Bound a_lo = c.k1 * (c.one - L.sum_psi_alpha_I_10 - m * L.sum_psi_alpha_II_01 - L.sum_pi_alpha_upper / c.om2);
  Bound a_hi = c.k1 * (c.one + L.sum_psi_alpha_I_01 + m * L.sum_psi_alpha_II_10 - L.sum_pi_alpha_lower / c.om2);
  out.alpha_F = Bound(a_lo.lower(), a_hi.upper());
  out.alpha_F_lo = a_lo;

  Bound p1 = c.dd * L.xi_alphae1_10 + c.k1 * L.sum_xi_iota_alpha_I;
  Bound p2 = c.dd * L.xi_alphae1_01 + c.k1 * m * L.sum_xi_iota_alpha_II;
  out.abs_alpha_phi = max(p1, p2).upper();

  out.beta_Pi = (c.dd * c.mb * c.s.even_xi_iota - L.sum_pi1_lower).upper();
  out.beta_Psi = (c.ratio * c.s.odd_xi - L.psi0_lower).upper();
  return out;
}

std::pair<Bound, Bound> step2_R_l1(const BetaLedger& L) {
  Common c = common(L);
  const Bound& m = c.m;
  const Bound& mb = c.mb;
  const Bound& AX = c.s.abs_xi;
  const Bound& AXI = c.s.abs_xi_iota;
  Bound xi2 = L.xi.sum(Parity::all, 2);
  Bound xii1 = L.xi_iota.sum(Parity::all, 1);
  Bound om = c.one - m;

  Bound pre = c.dd * m / om * (c.one + c.ratio * AX) / (c.one - c.r);

  Bound rf = pre * c.r.square();
  rf += c.k1 * (L.psi_R_I[0] + L.psi_R_I[1] + m * (L.psi_R_II[0] + L.psi_R_II[1]) + c.ratio * (c.one + m) * xi2);
  rf += c.k1 / c.om2 * (L.pi_R + c.dd * mb * xii1);
  rf += (c.dd * m).square() * mb / c.om2.square() * (Bound(2) + m) * AXI;
  rf += c.dd.square() * mb.square() / om.square() * AX * AXI;

  Bound rp = L.xi_R[0] + L.xi_R[1] + xi2;
  rp += AXI * pre * c.r;
  rp += c.q * AX * AXI;
  rp += c.k1 * (L.xi_iota_R_I + m * L.xi_iota_R_II + (c.one + m) * xii1);
  return {rf.upper(), rp.upper()};
}

std::pair<Bound, Bound> step3_step4_weighted(const BetaLedger& L) {
  Common c = common(L);
  const Bound& m = c.m;
  const Bound& mb = c.mb;
  const Bound& r = c.r;
  const Bound& q = c.q;
  const auto& s = c.s;
  Bound om = c.one - m;
  Bound op = c.one + m;
  Bound g1 = r / (c.one - r);                 // sum_{n>=1} r^n
  Bound g2 = r / (c.one - r).square();        // sum_{n>=1} n r^n
  Bound mix = (c.rho + s.abs_xi) * (s.abs_dxi_iota_iota + m * s.abs_dxi_iota_0);

  Bound dxi2 = L.dxi.sum(Parity::all, 2);
  Bound xi2 = L.xi.sum(Parity::all, 2);
  Bound dii1 = L.dxi_iota_iota.sum(Parity::all, 1);
  Bound di01 = L.dxi_iota_0.sum(Parity::all, 1);
  Bound xii1 = L.xi_iota.sum(Parity::all, 1);

  Bound drp = L.dxi_R[0] + L.dxi_R[1] + dxi2;
  drp += q * g1 * s.abs_dxi * s.abs_xi_iota;
  drp += q * (g2 + g1) / op * mix;
  drp += c.dd * mb / c.om2 * (op * s.abs_dxi * s.abs_xi_iota + s.abs_xi * (s.abs_dxi_iota_iota + m * s.abs_dxi_iota_0));
  drp += c.k1 * (L.dxi_iota_R_I + m * L.dxi_iota_R_II + dii1 + m * di01);

  Bound drf = s.abs_dxi * q * r.square() / (c.one - r);
  drf += q.square() * r / (c.one - r).square() / op * mix;
  drf += q.square() * r / (c.one - r) / op * (c.rho + s.abs_xi) *
         (s.abs_dxi_iota_iota + m * s.abs_dxi_iota_0 + s.abs_xi_iota);
  drf += c.k1 * (L.dpsi_R_I[0] + L.dpsi_R_I[1] + L.dpsi_R_II[0] + L.dpsi_R_II[1] +
                 c.ratio * (dxi2 + xi2 + m * dxi2));
  drf += m / c.om2.square() * (L.dpi_R + c.dd.square() * mb * (dii1 + xii1));
  drf += c.dd.square() * m.square() * mb / c.om2.square() *
         (s.abs_dxi_iota_iota + s.abs_dxi_iota_0 + s.abs_xi_iota + m * s.abs_dxi_iota_0);
  drf += c.dd.square() * mb.square() / om.square() * s.abs_dxi * s.abs_xi_iota;
  drf += c.dd.square() * mb.square() / (c.om2 * om) * s.abs_xi *
         (s.abs_dxi_iota_iota + m * s.abs_dxi_iota_0 + s.abs_xi_iota);
  return {drp.upper(), drf.upper()};
}

Bound step5_lower_RF(const BetaLedger& L) {
  Common c = common(L);
  const Bound& m = c.m;
  const Bound& mb = c.mb;
  const Bound& r = c.r;
  const Bound& q = c.q;
  const auto& s = c.s;
  Bound op = c.one + m;
  Bound mix = (c.rho + s.abs_xi) * (s.abs_dxi_iota_iota + m * s.abs_dxi_iota_0);

  Bound v = s.abs_dxi * q * r.square() / (c.one - r);
  v += q.square() * r / (c.one - r).square() / op * mix;
  v += q.square() * r / (c.one - r) / op * (c.rho + s.abs_xi) *
       (s.abs_dxi_iota_iota + m * s.abs_dxi_iota_0 + s.abs_xi_iota);

  Bound dxi_odd3 = L.dxi.sum(Parity::odd, 3);
  Bound xi_odd3 = L.xi.sum(Parity::odd, 3);
  Bound dxi_even2 = L.dxi.sum(Parity::even, 2);
  Bound dii_even2 = L.dxi_iota_iota.sum(Parity::even, 2);
  Bound xii_even2 = L.xi_iota.sum(Parity::even, 2);
  v += c.k1 * (L.dpsi_R_I[1] + m * L.dpsi_R_II[0] + c.ratio * (dxi_odd3 + xi_odd3 + m * dxi_even2));
  v += m / c.om2.square() * (L.dpi_R + c.dd.square() * mb * (dii_even2 + xii_even2));

  Bound w = c.dd * mb / c.om2;  // 2d mubar/(1-mu^2)
  Bound w2 = w.square();
  v += (c.dd * m).square() * mb / c.om2.square() *
       (s.odd_dxi_iota_iota + s.odd_dxi_iota_0 + s.odd_xi_iota + m * s.even_dxi_iota_0);
  v += w2 * (s.odd_dxi * s.odd_xi_iota * (c.one + m.square()) + Bound(2) * m * s.even_dxi * s.even_xi_iota);
  v += w2 * s.odd_xi *
       (s.odd_dxi_iota_iota + s.odd_xi_iota + m * s.even_dxi_iota_0 + m * s.even_xi_iota +
        m * s.even_dxi_iota_iota + m.square() * s.odd_dxi_iota_0);
  v += w2 * s.even_xi *
       (s.even_dxi_iota_iota + s.even_xi_iota + m * s.odd_dxi_iota_0 + m * s.odd_xi_iota +
        m * s.odd_dxi_iota_iota + m.square() * s.even_dxi_iota_0);
  return v.upper();
}

Bound RewriteBounds::gate_F() const { return alpha_F_lo - beta_DRF_lower; }
Bound RewriteBounds::gate_Phi() const { return c_phi_lo - abs_alpha_phi - beta_RPhi; }

void RewriteBounds::check_gates() const {
  Bound gf = gate_F();
  if (!gf.certainly_positive())
    fail("GateViolation", "alpha_F.lo - lower beta_{Delta R,F} > 0 fails: value " + gf.str(10));
  Bound gp = gate_Phi();
  if (!gp.certainly_positive())
    fail("GateViolation", "c_Phi.lo - |alpha_Phi| - beta_{R,Phi} > 0 fails: value " + gp.str(10));
}

RewriteBounds rewrite_bounds(const BetaLedger& L, bool check) {
  L.validate();
  RewriteBounds rb;
  Step1Bounds s1 = step1_simple_bounds(L);
  rb.c_phi = s1.c_phi;
  rb.alpha_F = s1.alpha_F;
  rb.c_phi_lo = s1.c_phi_lo;
  rb.c_phi_hi = s1.c_phi_hi;
  rb.alpha_F_lo = s1.alpha_F_lo;
  rb.abs_alpha_phi = s1.abs_alpha_phi;
  rb.beta_Pi = s1.beta_Pi;
  rb.beta_Psi = s1.beta_Psi;
  std::tie(rb.beta_RF, rb.beta_RPhi) = step2_R_l1(L);
  std::tie(rb.beta_DRPhi, rb.beta_DRF) = step3_step4_weighted(L);
  rb.beta_DRF_lower = step5_lower_RF(L);
  rb.beta_mu = L.beta_mu;
  Bound m = L.mu_eff();
  Bound axi = L.xi_iota.sum(Parity::all);
  rb.geometric_factor = (Bound(2 * L.d) * L.mubar / (Bound(1) - m) * axi).upper();
  rb.contraction = (Bound(2 * L.d - 1) * L.mubar / (Bound(1) - m) * axi).upper();
  if (check) rb.check_gates();
  return rb;
}

BetaLedger null_ledger(int d, const Bound& m) {
  BetaLedger L;
  L.d = d;
  L.mu = m;
  L.mubar = m;
  L.beta_mu = Bound(1);
  L.beta_mu_lower = m.lower();
  L.f1_initial = Bound(1);
  return L;
}

}  // namespace noble
