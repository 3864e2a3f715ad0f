#pragma once

#include <gmpxx.h>

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "noble/lattice.hpp"

namespace noble {

enum class WalkKind { srw, nbw, bond_sa, saw };

std::string to_string(WalkKind k);
WalkKind walk_kind_from_string(const std::string& s);

// Exact walk counts per (n, canonical x).
class WalkCountTable {
 public:
  WalkCountTable(int d, WalkKind kind);

  int dim() const { return d_; }
  WalkKind kind() const { return kind_; }

  // Ensures all rows up to n exist (srw, nbw) and returns the count.
  const mpz_class& count(int n, const Coords& x);
  int max_row() const { return static_cast<int>(rows_.size()) - 1; }

  // Points with a nonzero count in row n (canonical).
  std::vector<Coords> support(int n);

  // Enumeration budget for bond_sa / saw.
  void set_nmax(int n) { nmax_ = n; }
  int nmax() const { return nmax_; }
  void set_node_budget(unsigned long long b) { node_budget_ = b; }

  std::string serialize() const;
  static WalkCountTable deserialize(const std::string& text);
  void save(const std::string& path) const;
  static WalkCountTable load(const std::string& path);

  bool operator==(const WalkCountTable& o) const;

 private:
  void extend_srw(int n);
  void extend_nbw(int n);
  const mpz_class& count_enumerated(int n, const Coords& x);

  int d_;
  WalkKind kind_;
  int nmax_ = 10;
  unsigned long long node_budget_ = 2'000'000'000ULL;
  std::vector<std::map<Coords, mpz_class>> rows_;
  // nbw directed states: key (canonical x, marked value, sign)
  using DirKey = std::tuple<Coords, int, int>;
  std::vector<std::map<DirKey, mpz_class>> dir_rows_;
  std::map<std::pair<int, Coords>, mpz_class> enumerated_;
};

mpz_class count_srw(int d, int n, const Coords& x);
mpz_class count_nbw(int d, int n, const Coords& x);
mpz_class count_bond_sa(int d, int n, const Coords& x, int nmax = 10);
mpz_class count_saw(int d, int n, const Coords& x, int nmax = 10);

// d C(6;3,3) + d(d-1) C(6;2,2,1,1) + C(d,3) C(6;1,1,1,1,1,1)
mpz_class count_srw_loop_formula(int d, int n = 6);

// Exact p_m(x) for all m <= mmax at a single point by the product of
// one-dimensional exponential generating functions.
std::vector<mpz_class> srw_counts_by_egf(const Coords& x, int mmax);

}  // namespace noble
