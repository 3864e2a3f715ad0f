#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "noble/bound.hpp"

namespace noble {

using Coords = std::vector<int>;

struct LatticePoint {
  Coords coords;
  int dim() const { return static_cast<int>(coords.size()); }
  bool operator==(const LatticePoint& o) const { return coords == o.coords; }
  bool operator<(const LatticePoint& o) const { return coords < o.coords; }
};

// Sorted descending with absolute values; the orbit representative.
Coords canonicalize(const Coords& x);
LatticePoint canonicalize(const LatticePoint& x);
bool is_canonical(const Coords& x);

Coords origin(int d);
Coords unit(int d, int i, int times = 1);
// Parse "0", "origin", "e1", "2e1+e2", "(1,1,0)" style points; result is canonical.
Coords parse_point(const std::string& s, int d);
std::string point_name(const Coords& canonical);  // "2e1+e2", "0"

long l1_norm(const Coords& x);
long l2_norm_sq(const Coords& x);

// Multiset of (|value|, multiplicity), zeros included, sorted by value descending.
struct OrbitSignature {
  int d = 0;
  std::vector<std::pair<int, int>> parts;
  bool operator==(const OrbitSignature& o) const { return d == o.d && parts == o.parts; }
};
OrbitSignature orbit_signature(const Coords& x);
// Number of distinct images of x under permutations and sign flips.
mpz_class orbit_size(const Coords& x);

// p(x; nu, delta)_j = delta_j * x_{nu_j}
Coords apply_symmetry(const Coords& x, const std::vector<int>& nu, const std::vector<int>& delta);

// Orbit sum of f(x + y) over y in the symmetry images of x, returned as a list of
// (canonical x+y, weight) with weights summing to 1. Images are counted by
// multiplicity of injective placements of the nonzero entries, never by the
// full group of size 2^d d!.
std::vector<std::pair<Coords, Bound>> orbit_shift_weights(const Coords& x);

// Coordinate-majorization order on canonical representatives: x <= z iff x_i <= z_i.
bool majorized_by(const Coords& x, const Coords& z);

double dhat(const std::vector<double>& k);
double dhat_sin(const std::vector<double>& k);  // (1/d^2) sum sin^2
Bound dhat(const std::vector<Bound>& k);

struct CosineSplit {
  double lhs;     // 1 - cos(t)
  double rhs_sum; // sum (1 - cos t_i) + sum_{i>j} |sin t_i||sin t_j|
  double rhs_j;   // J sum (1 - cos t_i)
};
CosineSplit cosine_split_check(double t, const std::vector<double>& parts);

// For nonnegative symmetric g with finite support listed by canonical
// representative (x, g(x)), returns (sum_x g(x)[1 - cos(k.x)], [1 - Dhat(k)] sum_x g(x)|x|^2)
// where both sums run over the full orbits.
std::pair<double, double> fourier_weight_check(const std::vector<std::pair<Coords, double>>& g,
                                               const std::vector<double>& k);

// All distinct symmetry images of x (small orbits only).
std::vector<Coords> orbit_points(const Coords& x);

}  // namespace noble
