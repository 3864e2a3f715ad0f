#pragma once

#include <memory>
#include <string>
#include <vector>

#include "noble/bound.hpp"
#include "noble/lattice.hpp"

namespace noble {

struct QuadratureConfig {
  int nodes = 48;            // Gauss-Legendre nodes per panel
  int tail_terms = 40;       // K, terms of the large-s expansion
  int log2_cutoff = 8;       // cutoff S_T = 2^log2_cutoff in s = t/d
  double target_width = 1e-25;
  int threads = 0;           // 0: hardware concurrency
  int initial_mmax = 8;      // Bessel orders precomputed at construction
};

// Modified Bessel factor e^{-s} I_m(s) for m = 0..mmax by the ascending series
// (all terms positive) with a ratio bound on the remainder.
std::vector<Bound> scaled_bessel_series(const Bound& s, int mmax);

// Rigorous enclosures of I_{n,0}(x) = d^n/(n-1)! int_0^inf s^{n-1} prod_mu e^{-s} I_{x_mu}(s) ds.
// [0, S_T] uses Gauss-Legendre on dyadic panels with a Chebyshev/Bernstein-ellipse
// remainder; [S_T, inf) integrates the truncated large-s expansion termwise with an
// explicit remainder constant.
class BesselGreen {
 public:
  explicit BesselGreen(int d, QuadratureConfig cfg = {});

  int dim() const { return d_; }
  int nmax() const { return (d_ - 1) / 2; }
  const QuadratureConfig& config() const { return cfg_; }

  // Entries for n = 1..nmax().
  std::vector<Bound> values(const Coords& x);
  Bound value(int n, const Coords& x);

  // Double-precision evaluation on the same rule (no error control); uses the
  // runtime-selected product kernel.
  std::vector<double> values_fast(const Coords& x);

  struct Diagnostics {
    double quadrature_error = 0;  // summed panel remainder bound for n = 1
    double tail_error = 0;        // expansion remainder for the last point
    double cutoff = 0;
    int panels = 0;
  };
  Diagnostics diagnostics() const { return diag_; }
  std::string policy() const;

 private:
  void ensure_m(int m);
  void build_watson(int m);

  struct Panel {
    Bound a, b;
    std::vector<Bound> s;  // nodes
    std::vector<Bound> w;  // weights times half-length
    std::vector<Bound> err;  // remainder bound per n (index n-1), prefactor included
    std::vector<std::vector<Bound>> F;  // [m][node]
    std::vector<std::vector<double>> Fd;
    std::vector<double> sd, wd;
  };

  int d_;
  QuadratureConfig cfg_;
  int mmax_ = -1;
  Bound cutoff_;
  std::vector<Bound> prefactor_;  // d^n/(n-1)!
  std::vector<Panel> panels_;
  std::vector<std::vector<Bound>> watson_;  // absolute coefficients p_j of P_m
  std::vector<Bound> watson_eps_;
  Diagnostics diag_;
};

// Shared per-dimension engines with default settings.
BesselGreen& bessel_engine(int d);

// I_{n,0}(x); n = 0 gives the transition I_{0,0}(x) = delta_{x,0}.
Bound bessel_green(int d, int n, const Coords& x);

}  // namespace noble
