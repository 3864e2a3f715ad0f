#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "noble/bessel.hpp"
#include "noble/bound.hpp"
#include "noble/lattice.hpp"

namespace noble {

// I_{0,m}(x) = p_m(x)/(2d)^m, exact.
Bound transition(int d, int m, const Coords& x);

struct PointSetSpec {
  enum class Kind { singleton_list, l1_threshold, l2_threshold };
  Kind kind = Kind::singleton_list;
  std::vector<Coords> points;  // singleton_list
  long threshold = 0;          // l1: sum |x_i| > t; l2: |x|^2 > t

  static PointSetSpec list(std::vector<Coords> pts);
  static PointSetSpec l1_above(long t) { return {Kind::l1_threshold, {}, t}; }
  static PointSetSpec l2sq_above(long t) { return {Kind::l2_threshold, {}, t}; }
  // "{0}", "{0,e1}", "l1>2", "l2>1" (Euclidean norm), "l2sq>1"
  static PointSetSpec parse(const std::string& s, int d);

  bool finite() const { return kind == Kind::singleton_list; }
  bool contains(const Coords& x) const;
  // Minimal canonical elements under coordinate majorization (finite sets: the list itself).
  std::vector<Coords> frontier(int d) const;
  std::string str() const;
};

struct TableEntry {
  Bound value;
  std::string provenance;  // winning bound
  bool exact = false;      // enclosure of the integral itself, not only an upper bound
};

struct SupResult {
  Bound value;
  Coords argmax;
  std::string provenance;
};

// Memoised enclosures of the SRW integrals. Entries that are only upper bounds
// (K, T, T*, U, sup-majorants) store an enclosure of the bounding expression.
class IntegralTable {
 public:
  explicit IntegralTable(int d);

  int dim() const { return d_; }
  long precision() const { return precision_bits_; }

  // Use I_{n+2,l+1} + (4/d) K_{n+2,l} for J when d <= 2(n+3).
  void set_allow_j_fallback(bool on) { j_fallback_ = on; }
  bool allow_j_fallback() const { return j_fallback_; }
  // Extra layers of exact evaluation above the frontier before the monotone majorant is used.
  void set_sup_depth(int depth) { sup_depth_ = depth; }
  // Frozen tables never start a Bessel quadrature; a missing I_{n,0} raises MissingEntry.
  void set_frozen(bool on) { frozen_ = on; }
  bool frozen() const { return frozen_; }
  // Lower end of alpha_F, used by T*.
  void set_tstar_alpha(const Bound& alpha_lower);

  Bound I(int n, int l, const Coords& x);
  Bound L(int n, const Coords& x);
  Bound V(int n, int l);
  Bound J(int n, int l, const Coords& x);
  Bound K(int n, int l, const Coords& x);
  Bound T(int n, int l, const Coords& x);
  Bound Tstar(int n, int l, const Coords& x);
  Bound U(int n, int l, const Coords& x);

  // name in {I, L, V, J, K, T, T*, U}
  Bound get(const std::string& name, int n, int l, const Coords& x);
  const TableEntry& entry(const std::string& name, int n, int l, const Coords& x);
  SupResult sup(const std::string& name, int n, int l, const PointSetSpec& S);

  // Fills I_{n,l}(x) for n <= n_max, l <= l_max and L, V, J where finite.
  void build(int n_max, int l_max, const std::vector<Coords>& points);

  // The recursion residual I_{n,m} - I_{n,m-1} + I_{n-1,m-1} over stored triples;
  // returns the number of triples checked and throws when one excludes 0.
  int check_recursion() const;

  std::size_t size() const { return entries_.size(); }
  std::string serialize() const;
  static IntegralTable deserialize(const std::string& text);
  void save(const std::string& path) const;
  static IntegralTable load(const std::string& path);
  // Merge entries of another table of the same dimension.
  void merge(const IntegralTable& o);

  using Key = std::tuple<std::string, int, int, Coords>;
  const std::map<Key, TableEntry>& entries() const { return entries_; }

  // Keys requested through get() and suprema requested through sup(), for reports.
  using SupKey = std::tuple<std::string, int, int, std::string>;
  const std::set<Key>& used() const { return used_; }
  const std::map<SupKey, SupResult>& used_sups() const { return used_sups_; }
  void clear_used() {
    used_.clear();
    used_sups_.clear();
  }

 private:
  const TableEntry& put(const Key& k, TableEntry e);
  const TableEntry* find(const Key& k) const;
  // Upper bounds that are monotone under coordinate majorization for n >= 1.
  Bound K_mono(int n, int l, const Coords& x);
  Bound U_mono(int n, int l, const Coords& x);
  Bound T_mono(int n, int l, const Coords& x, bool star);
  Bound majorant(const std::string& name, int n, int l, const Coords& z, std::string& how);
  Bound T_generic(int n, int l, const Coords& x, bool star, std::string& how);
  void need_finite(int n, const std::string& what) const;

  int d_;
  long precision_bits_;
  bool j_fallback_ = false;
  bool frozen_ = false;
  int sup_depth_ = 0;
  std::optional<Bound> tstar_alpha_;
  std::map<Key, TableEntry> entries_;
  std::map<Coords, std::vector<Bound>> transition_rows_;
  std::set<Key> used_;
  std::map<SupKey, SupResult> used_sups_;
};

// Demo points: canonical x with |x|_1 <= 4 plus the orbit-sum points they need.
std::vector<Coords> demo_points(int d);

}  // namespace noble
