#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "noble/bound.hpp"
#include "noble/rewrite.hpp"
#include "noble/srw_table.hpp"

namespace noble {

// One element (n, l, S) of the index set with its weight c_{n,l,S}.
struct SEntry {
  std::string name;
  int n = 0, l = 0;
  PointSetSpec S;
  Bound c = Bound(1);
};

struct BootstrapConfig {
  int d = 0;
  Bound Gamma1 = Bound(1), Gamma2 = Bound(1), Gamma3 = Bound(1);
  Bound cmu = Bound(1);
  std::vector<SEntry> S;
  Bound f1_initial = Bound(1);  // f1(z_I), from the ledger
  // gamma_i = computed + safety*(Gamma_i - computed); 0.5 is the midpoint rule
  double safety = 0.5;

  // Gamma_i > 0, c_mu > 1, c > 0, n in {0,1,2}, d >= 2(n+3)+1. Gamma_i < 1 fails in decide_P.
  void validate() const;
};

struct DerivedConstants {
  Bound Gamma2p;  // (2d-2)/(2d-1) Gamma2
  Bound Kbar;     // 1/(alpha_F.lo - lower beta_{Delta R,F})
  Bound alpha_lo, alpha_hi;
  Bound alpha_dev;  // max{|alpha_F.hi - 1|, |alpha_F.lo - 1|}

  static DerivedConstants make(const RewriteBounds& rb, const BootstrapConfig& cfg);
};

Bound improve_f1(const RewriteBounds& rb, const BootstrapConfig& cfg);
Bound improve_f2(const RewriteBounds& rb, const BootstrapConfig& cfg);
Bound a_of_d(const RewriteBounds& rb);

struct F3Term {
  std::string name;
  int n = 0, l = 0;
  std::string set;
  Bound H[5];        // per-term bounds (sup over S)
  Bound total;       // sup_{x in S} of the sum
  Bound scaled;      // total / c
  Coords argmax;     // finite sets: maximizing point
  bool sum_of_sups = false;
};

struct F3Result {
  Bound value;
  std::vector<F3Term> terms;
  std::vector<std::string> diagnostics;
};

// ((2d-2)/(2d-1)) max over S of sup J_{n,l}/c.
F3Result f3_initial(IntegralTable& t, const BootstrapConfig& cfg);
F3Result f3_improve(IntegralTable& t, const RewriteBounds& rb, const BootstrapConfig& cfg);

// The five H-term bounds of one (n, l) at a point x, with the constants given explicitly.
struct HConstants {
  Bound cb, aP, al, ah, mx;  // c_Phi.hi, |alpha_Phi|, alpha_F lo/hi, max|alpha_F - 1|
  Bound bRP, bDRP, bDRF;     // beta_{R,Phi}, beta_{Delta R,Phi}, beta_{Delta R,F}
  Bound Kb, G2;              // Kbar, Gamma2'
};
HConstants h_constants(const RewriteBounds& rb, const BootstrapConfig& cfg);
// H-term bounds from an integral lookup (name in J, T, T*, U, K, I); shift2 bounds
// sum_iota I_{2,l}(x + 2e_iota) and is only called for n = 0.
using IntegralLookup = std::function<Bound(const char*, int, int)>;
void h_terms(const HConstants& k, int d, int n, int l, const IntegralLookup& v, const std::function<Bound()>& shift2,
             Bound H[5]);
// H[0..4] at x. The sum over iota in the n = 0 line term is evaluated at x.
void h_terms_at(IntegralTable& t, const HConstants& k, int n, int l, const Coords& x, Bound H[5]);

struct Verdict {
  bool holds = false;
  Bound computed[3];  // max(initial_i, improved_i)
  Bound gamma[3];
  Bound margin[3];    // computed_i / Gamma_i
  std::vector<std::string> failing;
};

Verdict decide_P(const Bound initial[3], const Bound improved[3], const BootstrapConfig& cfg);

}  // namespace noble
