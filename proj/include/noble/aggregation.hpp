#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "noble/bound.hpp"

namespace noble {

using BoundVector = std::vector<Bound>;
using BoundMatrix = std::vector<std::vector<Bound>>;

// Per-N bounds v^T B^N w and (alpha N + beta)(h^T B^N w + sum_M v^T B^M C B^{N-M-1} w + v^T B^N h).
struct MatrixBoundSpec {
  int n = 0;
  BoundMatrix B, C;
  BoundVector v, w, h;
  Bound alpha = Bound(1);
  Bound beta = Bound(2);

  void validate() const;
};

enum class Parity { all, even, odd };
Parity parity_from_string(const std::string& s);
std::string to_string(Parity p);

struct EigenSplit {
  std::vector<std::complex<long double>> lambda;
  // v_i = r_i eta_i (left), w_i = b_i zeta_i (right); v.w_j and v_i.w_j use these
  std::vector<std::vector<std::complex<long double>>> v_i, w_i;
  long double residual = 0;       // max_i |B zeta_i - lambda_i zeta_i|_inf / |B|_inf
  long double reconstruction = 0; // |sum v_i - v|_inf + |sum w_i - w|_inf
  long double condition = 0;      // |Z|_inf |Z^{-1}|_inf
  long double spectral_radius = 0;
  bool complex_spectrum = false;
};

// Eigen-decomposition in long double. Throws NotDiagonalizable,
// SpectralRadiusAtLeastOne or ComplexSpectrumBeyondTolerance.
EigenSplit eigen_split(const MatrixBoundSpec& spec, long double tol = 1e-12L);

struct GeometricSum {
  Bound value;                 // rigorous: truncated sum plus certified tail
  long double closed_form = 0; // eigen closed form (real part)
  bool closed_form_inside = false;
  int terms = 0;               // truncation order K
  Bound tail;                  // tail bound included in value
  Bound ratio;                 // contraction factor used for the tail
};

// Sum over N of the per-N bound, all N or one parity.
GeometricSum geometric_sum(const MatrixBoundSpec& spec, Parity parity, bool weighted, double rel_tol = 1e-30);

// Eigen closed forms alone, in long double (used for the cross-check and for reports).
long double closed_form_sum(const MatrixBoundSpec& spec, const EigenSplit& es, Parity parity, bool weighted);

// Direct partial sum over N < K in interval arithmetic (the lower oracle when entries are nonnegative).
Bound partial_sum(const MatrixBoundSpec& spec, Parity parity, bool weighted, int K);

struct TailDescriptor {
  Bound ratio;
  int start = -1;               // first index covered; default: sequence length
  std::optional<Bound> anchor;  // bound on the entry at start; default: last entry times ratio
};

// Finite sum of the listed entries (one parity or all) plus [0, certified tail].
Bound scalar_series_sum(const std::vector<Bound>& seq, Parity parity,
                        const std::optional<TailDescriptor>& tail = std::nullopt);

}  // namespace noble
