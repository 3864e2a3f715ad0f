#pragma once

#include <string>
#include <vector>

#include "noble/bound.hpp"
#include "noble/srw_table.hpp"
#include "noble/walks.hpp"

namespace noble {

enum class DiagramKind { bubble, triangle, square };
DiagramKind diagram_kind_from_string(const std::string& s);
int legs(DiagramKind k);

struct DiagramInputs {
  Bound mubar;
  Bound Gamma1 = Bound(1);
  Bound Gamma2p = Bound(1);
  int repulsive_limit = 10;  // sum m_i at or above this uses the plain K path
};

struct DiagramBound {
  Bound value;
  Bound prefix;               // explicit a_i contributions
  std::vector<Bound> tails;   // tails[j-1]: the D^{*M} * G^{*j} term
  std::string path;           // "repulsive" or "non-repulsive"
};

// Multiplicity of a_i in the prefix: compositions of i into k legs with leg s >= m_s.
mpz_class prefix_multiplicity(int k, long excess);
// Multiplicity of the G^{*j} tail: C(R - 1 + k - j, k - j) with R = M - sum m.
mpz_class tail_multiplicity(int k, int j, long R);

// Explicit-prefix plus tail bound for the repulsive k-leg diagram with lengths m and cutoff M.
// Falls back to (2d/(2d-1) Gamma1)^{sum m} Gamma2'^k K_{k, sum m}(x) when sum m reaches the
// repulsive limit or the bond-avoiding counts exceed the enumeration budget.
DiagramBound diagram_bound(DiagramKind kind, const std::vector<int>& m, int M, const Coords& x,
                           const DiagramInputs& in, IntegralTable& t, WalkCountTable& a);

// H^{1,l} <= sum_{i=l}^{M-1} (2d mubar)^{i-l} H^{0,i} + (2d mubar)^{M-l} H^{1,M};
// h0[i - l] bounds H^{0,i}.
Bound weighted_ladder(int d, const Bound& mubar, int l, int M, const std::vector<Bound>& h0, const Bound& h1M);

}  // namespace noble
