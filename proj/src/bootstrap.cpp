#include "noble/bootstrap.hpp"

#include <functional>

#include "noble/error.hpp"

namespace noble {

void BootstrapConfig::validate() const {
  if (d < 2) fail("ConfigError", "dimension must be at least 2");
  const Bound* G[3] = {&Gamma1, &Gamma2, &Gamma3};
  for (int i = 0; i < 3; ++i)
    if (!G[i]->certainly_positive()) fail("ConfigError", "Gamma" + std::to_string(i + 1) + " must be positive");
  if (!Bound(1).certainly_lt(cmu)) fail("ConfigError", "cmu must be > 1");
  if (S.empty()) fail("ConfigError", "index set S is empty");
  for (const auto& e : S) {
    if (e.n < 0 || e.l < 0) fail("ConfigError", "negative index in S entry " + e.name);
    if (e.n > 2) fail("UnsupportedN", "n = " + std::to_string(e.n) + " in S entry " + e.name + " (n <= 2)");
    if (d < 2 * (e.n + 3) + 1)
      fail("DimensionTooLow", "S entry " + e.name + " with n = " + std::to_string(e.n) + " needs d >= " +
                                  std::to_string(2 * (e.n + 3) + 1));
    if (!e.c.certainly_positive()) fail("ConfigError", "weight of S entry " + e.name + " must be positive");
  }
  if (!(safety >= 0 && safety < 1)) fail("ConfigError", "safety must lie in [0, 1)");
}

DerivedConstants DerivedConstants::make(const RewriteBounds& rb, const BootstrapConfig& cfg) {
  DerivedConstants k;
  int d = cfg.d;
  k.Gamma2p = Bound::rational(2 * d - 2, 2 * d - 1) * cfg.Gamma2;
  k.alpha_lo = rb.alpha_F.lower();
  k.alpha_hi = rb.alpha_F.upper();
  Bound den = k.alpha_lo - rb.beta_DRF_lower;
  if (!den.certainly_positive())
    fail("GateViolation", "alpha_F.lo - lower beta_{Delta R,F} > 0 fails: value " + den.str(10));
  k.Kbar = Bound(1) / den;
  k.alpha_dev = max(abs(k.alpha_hi - Bound(1)), abs(k.alpha_lo - Bound(1))).upper();
  return k;
}

Bound improve_f1(const RewriteBounds& rb, const BootstrapConfig& cfg) {
  int d = cfg.d;
  Bound den = Bound(1) - Bound::rational(2 * d, 2 * d - 1) * rb.beta_Psi;
  if (!den.certainly_positive())
    fail("DenominatorGate", "1 - (2d/(2d-1)) lower beta_Psi > 0 fails: value " + den.str(10));
  Bound v = max(rb.beta_mu, cfg.cmu) * (Bound(1) + rb.beta_Pi) / den;
  return max(v, cfg.f1_initial);
}

Bound improve_f2(const RewriteBounds& rb, const BootstrapConfig& cfg) {
  int d = cfg.d;
  Bound den = rb.gate_F();
  if (!den.certainly_positive())
    fail("DenominatorGate", "alpha_F.lo - lower beta_{Delta R,F} > 0 fails: value " + den.str(10));
  Bound num = rb.c_phi_hi + rb.abs_alpha_phi + rb.beta_RPhi;
  return Bound::rational(2 * d - 1, 2 * d - 2) * num / den;
}

Bound a_of_d(const RewriteBounds& rb) {
  Bound g1 = rb.gate_Phi();
  Bound g2 = rb.gate_F();
  if (!g1.certainly_positive())
    fail("GateViolation", "c_Phi.lo - |alpha_Phi| - beta_{R,Phi} > 0 fails: value " + g1.str(10));
  if (!g2.certainly_positive())
    fail("GateViolation", "alpha_F.lo - lower beta_{Delta R,F} > 0 fails: value " + g2.str(10));
  Bound num = rb.c_phi_hi + rb.abs_alpha_phi + rb.beta_RPhi;
  return num / min(g1, g2);
}

HConstants h_constants(const RewriteBounds& rb, const BootstrapConfig& cfg) {
  DerivedConstants dc = DerivedConstants::make(rb, cfg);
  HConstants k;
  k.cb = rb.c_phi.upper();
  k.aP = rb.abs_alpha_phi;
  k.al = dc.alpha_lo;
  k.ah = dc.alpha_hi;
  k.mx = dc.alpha_dev;
  k.bRP = rb.beta_RPhi;
  k.bDRP = rb.beta_DRPhi;
  k.bDRF = rb.beta_DRF;
  k.Kb = dc.Kbar;
  k.G2 = dc.Gamma2p;
  return k;
}

using Val = IntegralLookup;

void h_terms(const HConstants& k, int d, int n, int l, const IntegralLookup& v, const std::function<Bound()>& shift2,
             Bound H[5]) {
  const Bound &cb = k.cb, &aP = k.aP, &al = k.al, &ah = k.ah, &mx = k.mx;
  const Bound &bRP = k.bRP, &bDRP = k.bDRP, &bDRF = k.bDRF, &Kb = k.Kb, &G2 = k.G2;
  Bound one(1), two(2);
  auto J = [&](int a, int b) { return v("J", a, b); };
  auto T = [&](int a, int b) { return v("T", a, b); };
  auto Ts = [&](int a, int b) { return v("T*", a, b); };
  auto U = [&](int a, int b) { return v("U", a, b); };
  auto K = [&](int a, int b) { return v("K", a, b); };
  Bound G2n = G2.pow(n);

  if (n == 0) {
    Bound dd2 = Bound(2) * Bound(d).square();
    H[0] = cb * J(0, l) + aP * J(0, l + 1) + aP / al * v("I", 1, l + 1) + aP / al.square() * shift2() / dd2;
  } else if (n == 1) {
    H[0] = cb.square() / al * J(1, l) + cb * aP / al * J(0, l) + two * cb * aP / al * J(1, l + 1) +
           aP.square() / al * J(0, l + 1) + aP.square() / al * J(1, l + 2) +
           (bRP + bDRF * G2) / al.square() * (cb * T(3, l) + aP * T(3, l + 1) + aP * T(2, l));
  } else {
    Bound al2 = al.square();
    Bound t1 = cb.square() / al2 * (cb * J(2, l) + aP * J(1, l) + Bound(3) * aP * J(2, l + 1)) +
               aP.square() * cb / al2 * (two * J(1, l + 1) + Bound(3) * J(2, l + 2)) +
               aP.pow(3) / al2 * (J(2, l + 3) + J(1, l + 2));
    Bound w = bRP + bDRP * G2;
    Bound t2 = w / al2 * (cb / al + G2) * (cb * T(4, l) + aP * T(4, l + 1) + aP * T(3, l)) +
               aP * w / al.pow(3) * (cb * T(4, l + 1) + aP * T(4, l + 2) + aP * T(3, l + 1));
    H[0] = t1 + t2;
  }
  H[1] = bDRF * Kb * G2n * ((cb * Ts(n + 2, l) + aP * Ts(n + 2, l + 1)) * (one / al + Kb) + aP / al * Ts(n + 1, l)) +
         ah * bDRP * Kb.square() * Ts(n + 2, l);
  H[2] = two * G2.pow(n + 1) * Kb.square() * (bDRF + ah * mx) * U(n + 3, l) +
         two * G2n * Kb.square() * aP * (bDRF / al + mx) * U(n + 2, l);
  H[3] = Kb * (bDRP * K(n, l) + bDRF * G2 * K(n + 1, l));
  H[4] = two * Kb.square() * G2.pow(n + 1) * (two * ah * bDRF + bDRF.square()) * U(n + 3, l) +
         two * Kb.square() * G2n * (ah * bDRP + aP * bDRF + bDRF * bDRP) * U(n + 2, l);
}

namespace {

Bound shift_sum_I2(IntegralTable& t, int l, const Coords& x) {
  // sum over the 2d neighbours x +- 2e_j
  Bound s(0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (int sg : {2, -2}) {
      Coords y = x;
      y[j] += sg;
      s += t.get("I", 2, l, y);
    }
  return s;
}

void check_entry(const SEntry& e, int d) {
  if (e.n > 2) fail("UnsupportedN", "n = " + std::to_string(e.n) + " in S entry " + e.name + " (n <= 2)");
  if (d < 2 * (e.n + 3) + 1)
    fail("DimensionTooLow", "S entry " + e.name + " needs d >= " + std::to_string(2 * (e.n + 3) + 1));
}

}  // namespace

void h_terms_at(IntegralTable& t, const HConstants& k, int n, int l, const Coords& x, Bound H[5]) {
  Val v = [&](const char* name, int a, int b) { return t.get(name, a, b, x); };
  h_terms(k, t.dim(), n, l, v, [&] { return shift_sum_I2(t, l, x); }, H);
}

F3Result f3_initial(IntegralTable& t, const BootstrapConfig& cfg) {
  F3Result r;
  bool first = true;
  Bound pre = Bound::rational(2 * cfg.d - 2, 2 * cfg.d - 1);
  for (const auto& e : cfg.S) {
    check_entry(e, cfg.d);
    SupResult s = t.sup("J", e.n, e.l, e.S);
    F3Term term;
    term.name = e.name;
    term.n = e.n;
    term.l = e.l;
    term.set = e.S.str();
    term.total = s.value;
    term.scaled = pre * s.value / e.c;
    term.argmax = s.argmax;
    r.value = first ? term.scaled : max(r.value, term.scaled);
    first = false;
    r.terms.push_back(term);
  }
  return r;
}

F3Result f3_improve(IntegralTable& t, const RewriteBounds& rb, const BootstrapConfig& cfg) {
  HConstants k = h_constants(rb, cfg);
  t.set_tstar_alpha(k.al);
  F3Result r;
  bool first = true;
  bool flagged = false;
  int d = cfg.d;
  for (const auto& e : cfg.S) {
    check_entry(e, d);
    F3Term term;
    term.name = e.name;
    term.n = e.n;
    term.l = e.l;
    term.set = e.S.str();
    if (e.S.finite()) {
      bool f = true;
      for (const Coords& x : e.S.points) {
        Bound H[5];
        h_terms_at(t, k, e.n, e.l, x, H);
        Bound tot = H[0] + H[1] + H[2] + H[3] + H[4];
        if (f || mpfr_cmp(tot.hi(), term.total.hi()) > 0) {
          for (int i = 0; i < 5; ++i) term.H[i] = H[i];
          term.argmax = canonicalize(x);
        }
        term.total = f ? tot : max(term.total, tot);
        f = false;
      }
    } else {
      Val v = [&](const char* name, int a, int b) { return t.sup(name, a, b, e.S).value; };
      Coords o = origin(d);
      h_terms(k, d, e.n, e.l, v, [&] { return Bound(2 * d) * t.get("K", 2, e.l, o); }, term.H);
      term.total = term.H[0] + term.H[1] + term.H[2] + term.H[3] + term.H[4];
      term.sum_of_sups = true;
    }
    term.scaled = term.total / e.c;
    r.value = first ? term.scaled : max(r.value, term.scaled);
    first = false;
    if (e.n == 2 && !flagged) {
      r.diagnostics.push_back(
          "n = 2 line-term remainder uses beta_{R,Phi} + beta_{Delta R,Phi} Gamma2' as printed, while the n = 1 "
          "term uses beta_{R,Phi} + beta_{Delta R,F} Gamma2'");
      flagged = true;
    }
    r.terms.push_back(term);
  }
  return r;
}

Verdict decide_P(const Bound initial[3], const Bound improved[3], const BootstrapConfig& cfg) {
  Verdict v;
  const Bound* G[3] = {&cfg.Gamma1, &cfg.Gamma2, &cfg.Gamma3};
  v.holds = true;
  for (int i = 0; i < 3; ++i) {
    v.computed[i] = max(initial[i], improved[i]);
    Bound c = v.computed[i].upper();
    v.margin[i] = c / *G[i];
    v.gamma[i] = c + Bound(cfg.safety) * (*G[i] - c);
    std::string gi = "Gamma" + std::to_string(i + 1) + " = " + G[i]->str(12);
    if (!c.certainly_lt(*G[i])) {
      v.holds = false;
      v.failing.push_back("f" + std::to_string(i + 1) + ": computed " + c.str(12) + " >= " + gi);
    } else if (!Bound(1).certainly_le(*G[i])) {
      v.holds = false;
      v.failing.push_back("f" + std::to_string(i + 1) + ": " + gi + " is below 1");
    }
  }
  return v;
}

}  // namespace noble
