#include "noble/walks.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "noble/error.hpp"

namespace noble {

namespace {

const char* kMagic = "NOBLE-WALKS";
const int kVersion = 1;

std::string coords_str(const Coords& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(c[i]);
  }
  return s;
}

Coords coords_parse(const std::string& s) {
  Coords c;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) c.push_back(std::stoi(tok));
  return c;
}

// Canonical points reachable in one step from the support of a row.
std::set<Coords> next_candidates(const std::set<Coords>& support) {
  std::set<Coords> out;
  for (const Coords& y : support) {
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (j > 0 && y[j] == y[j - 1]) continue;
      Coords a = y;
      a[j] += 1;
      out.insert(canonicalize(a));
      Coords b = y;
      b[j] -= 1;
      out.insert(canonicalize(b));
    }
  }
  return out;
}

}  // namespace

std::string to_string(WalkKind k) {
  switch (k) {
    case WalkKind::srw: return "srw";
    case WalkKind::nbw: return "nbw";
    case WalkKind::bond_sa: return "bond-sa";
    case WalkKind::saw: return "saw";
  }
  return "?";
}

WalkKind walk_kind_from_string(const std::string& s) {
  if (s == "srw") return WalkKind::srw;
  if (s == "nbw") return WalkKind::nbw;
  if (s == "bond-sa" || s == "bond_sa") return WalkKind::bond_sa;
  if (s == "saw") return WalkKind::saw;
  fail("SyntaxError", "unknown walk kind '" + s + "'");
}

WalkCountTable::WalkCountTable(int d, WalkKind kind) : d_(d), kind_(kind) {
  if (d < 1) fail("DimensionTooLow", "walk tables need d >= 1");
  if (kind == WalkKind::srw || kind == WalkKind::nbw) {
    rows_.emplace_back();
    rows_[0][origin(d)] = 1;
  }
  if (kind == WalkKind::nbw) {
    dir_rows_.emplace_back();
    Coords o = origin(d);
    dir_rows_[0][DirKey{o, 0, 1}] = 1;
  }
}

void WalkCountTable::extend_srw(int n) {
  while (max_row() < n) {
    const auto& prev = rows_.back();
    std::set<Coords> support;
    for (auto& [c, v] : prev)
      if (v != 0) support.insert(c);
    std::map<Coords, mpz_class> row;
    auto lookup = [&](const Coords& y) -> mpz_class {
      auto it = prev.find(canonicalize(y));
      return it == prev.end() ? mpz_class(0) : it->second;
    };
    for (const Coords& x : next_candidates(support)) {
      mpz_class s = 0;
      std::size_t j = 0;
      while (j < x.size()) {
        std::size_t m = 1;
        while (j + m < x.size() && x[j + m] == x[j]) ++m;
        Coords up = x, dn = x;
        up[j] += 1;
        dn[j] -= 1;
        s += mpz_class(static_cast<unsigned long>(m)) * (lookup(up) + lookup(dn));
        j += m;
      }
      if (s != 0) row[x] = s;
    }
    rows_.push_back(std::move(row));
  }
}

void WalkCountTable::extend_nbw(int n) {
  auto state_key = [](Coords y, std::size_t j, int s) {
    if (y[j] < 0) {
      y[j] = -y[j];
      s = -s;
    }
    int v = y[j];
    if (v == 0) s = 1;
    return DirKey{canonicalize(y), v, s};
  };
  while (max_row() < n) {
    const auto& prev_dir = dir_rows_.back();
    std::set<Coords> support;
    for (auto& [c, v] : rows_.back())
      if (v != 0) support.insert(c);
    auto dir_lookup = [&](const DirKey& k) -> mpz_class {
      auto it = prev_dir.find(k);
      return it == prev_dir.end() ? mpz_class(0) : it->second;
    };
    std::map<Coords, mpz_class> row;
    std::map<DirKey, mpz_class> dir_row;
    for (const Coords& x : next_candidates(support)) {
      // b_n(x) = sum_iota b^iota_{n-1}(x + e_iota)
      mpz_class b = 0;
      std::vector<std::pair<int, std::size_t>> classes;
      std::size_t j = 0;
      while (j < x.size()) {
        std::size_t m = 1;
        while (j + m < x.size() && x[j + m] == x[j]) ++m;
        classes.emplace_back(x[j], j);
        for (int sg : {1, -1}) {
          Coords y = x;
          y[j] += sg;
          b += mpz_class(static_cast<unsigned long>(m)) * dir_lookup(state_key(y, j, sg));
        }
        j += m;
      }
      if (b == 0) continue;
      row[x] = b;
      // b^kappa_n(x) = b_n(x) - b^{-kappa}_{n-1}(x - e_kappa)
      for (auto& [v, jj] : classes) {
        for (int sg : {1, -1}) {
          if (v == 0 && sg == -1) continue;
          Coords y = x;
          y[jj] -= sg;
          mpz_class val = b - dir_lookup(state_key(y, jj, -sg));
          if (val != 0) dir_row[DirKey{x, v, sg}] = val;
        }
      }
    }
    rows_.push_back(std::move(row));
    dir_rows_.push_back(std::move(dir_row));
  }
}

const mpz_class& WalkCountTable::count_enumerated(int n, const Coords& xin) {
  Coords x = canonicalize(xin);
  auto key = std::make_pair(n, x);
  auto it = enumerated_.find(key);
  if (it != enumerated_.end()) return it->second;
  if (n > nmax_)
    fail("EnumerationBudgetExceeded", "n = " + std::to_string(n) + " exceeds n_max = " + std::to_string(nmax_));
  const bool bond = kind_ == WalkKind::bond_sa;
  unsigned long long nodes = 0;
  mpz_class total = 0;
  Coords pos = origin(d_);
  std::set<Coords> visited{pos};
  std::set<std::pair<Coords, Coords>> bonds;
  std::function<void(int)> dfs = [&](int steps) {
    if (++nodes > node_budget_)
      fail("EnumerationBudgetExceeded", "node budget exhausted at n = " + std::to_string(n));
    long dist = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) dist += std::abs(pos[i] - x[i]);
    int left = n - steps;
    if (dist > left || (left - dist) % 2 != 0) return;
    if (left == 0) {
      total += 1;
      return;
    }
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (int sg : {1, -1}) {
        Coords nxt = pos;
        nxt[i] += sg;
        if (bond) {
          auto b = pos < nxt ? std::make_pair(pos, nxt) : std::make_pair(nxt, pos);
          if (bonds.count(b)) continue;
          bonds.insert(b);
          Coords save = pos;
          pos = nxt;
          dfs(steps + 1);
          pos = save;
          bonds.erase(b);
        } else {
          if (visited.count(nxt)) continue;
          visited.insert(nxt);
          Coords save = pos;
          pos = nxt;
          dfs(steps + 1);
          pos = save;
          visited.erase(nxt);
        }
      }
    }
  };
  dfs(0);
  return enumerated_[key] = total;
}

const mpz_class& WalkCountTable::count(int n, const Coords& x) {
  static const mpz_class zero = 0;
  if (n < 0) return zero;
  if (static_cast<int>(x.size()) != d_) fail("DimensionMismatch", "point dimension differs from table");
  if (kind_ == WalkKind::bond_sa || kind_ == WalkKind::saw) return count_enumerated(n, x);
  if (kind_ == WalkKind::srw)
    extend_srw(n);
  else
    extend_nbw(n);
  auto it = rows_[static_cast<std::size_t>(n)].find(canonicalize(x));
  return it == rows_[static_cast<std::size_t>(n)].end() ? zero : it->second;
}

std::vector<Coords> WalkCountTable::support(int n) {
  if (kind_ == WalkKind::srw)
    extend_srw(n);
  else if (kind_ == WalkKind::nbw)
    extend_nbw(n);
  else
    fail("Unsupported", "support listing only for srw and nbw tables");
  std::vector<Coords> out;
  for (auto& [c, v] : rows_[static_cast<std::size_t>(n)])
    if (v != 0) out.push_back(c);
  return out;
}

std::string WalkCountTable::serialize() const {
  std::ostringstream os;
  os << kMagic << " " << kVersion << "\n";
  os << "d " << d_ << "\n";
  os << "kind " << to_string(kind_) << "\n";
  for (std::size_t n = 0; n < rows_.size(); ++n)
    for (auto& [c, v] : rows_[n]) os << "r " << n << " " << coords_str(c) << " " << v.get_str() << "\n";
  for (std::size_t n = 0; n < dir_rows_.size(); ++n)
    for (auto& [k, v] : dir_rows_[n])
      os << "s " << n << " " << coords_str(std::get<0>(k)) << " " << std::get<1>(k) << " " << std::get<2>(k) << " "
         << v.get_str() << "\n";
  for (auto& [k, v] : enumerated_) os << "e " << k.first << " " << coords_str(k.second) << " " << v.get_str() << "\n";
  os << "end\n";
  return os.str();
}

WalkCountTable WalkCountTable::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string magic;
  int version = 0;
  is >> magic >> version;
  if (magic != kMagic) fail("CacheCorrupt", "not a walk-count file");
  if (version != kVersion) fail("CacheVersion", "unsupported walk-count format version " + std::to_string(version));
  std::string tag, kind;
  int d = 0;
  is >> tag >> d;
  if (tag != "d") fail("CacheCorrupt", "missing dimension line");
  is >> tag >> kind;
  if (tag != "kind") fail("CacheCorrupt", "missing kind line");
  WalkCountTable t(d, walk_kind_from_string(kind));
  t.rows_.clear();
  t.dir_rows_.clear();
  bool ended = false;
  while (is >> tag) {
    if (tag == "end") {
      ended = true;
      break;
    }
    if (tag == "r") {
      std::size_t n;
      std::string c, v;
      is >> n >> c >> v;
      if (t.rows_.size() <= n) t.rows_.resize(n + 1);
      t.rows_[n][coords_parse(c)] = mpz_class(v);
    } else if (tag == "s") {
      std::size_t n;
      std::string c, v;
      int val, sg;
      is >> n >> c >> val >> sg >> v;
      if (t.dir_rows_.size() <= n) t.dir_rows_.resize(n + 1);
      t.dir_rows_[n][DirKey{coords_parse(c), val, sg}] = mpz_class(v);
    } else if (tag == "e") {
      int n;
      std::string c, v;
      is >> n >> c >> v;
      t.enumerated_[{n, coords_parse(c)}] = mpz_class(v);
    } else {
      fail("CacheCorrupt", "unknown record tag '" + tag + "'");
    }
  }
  if (!ended) fail("CacheCorrupt", "truncated walk-count file");
  if ((t.kind_ == WalkKind::srw || t.kind_ == WalkKind::nbw) && t.rows_.empty()) {
    t.rows_.emplace_back();
    t.rows_[0][origin(d)] = 1;
  }
  if (t.kind_ == WalkKind::nbw && t.dir_rows_.size() != t.rows_.size())
    fail("CacheCorrupt", "directed rows missing for nbw table");
  return t;
}

void WalkCountTable::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail("IOError", "cannot write " + path);
  f << serialize();
}

WalkCountTable WalkCountTable::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail("IOError", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

bool WalkCountTable::operator==(const WalkCountTable& o) const {
  return d_ == o.d_ && kind_ == o.kind_ && rows_ == o.rows_ && dir_rows_ == o.dir_rows_ &&
         enumerated_ == o.enumerated_;
}

mpz_class count_srw(int d, int n, const Coords& x) {
  WalkCountTable t(d, WalkKind::srw);
  return t.count(n, x);
}

mpz_class count_nbw(int d, int n, const Coords& x) {
  WalkCountTable t(d, WalkKind::nbw);
  return t.count(n, x);
}

mpz_class count_bond_sa(int d, int n, const Coords& x, int nmax) {
  WalkCountTable t(d, WalkKind::bond_sa);
  t.set_nmax(nmax);
  return t.count(n, x);
}

mpz_class count_saw(int d, int n, const Coords& x, int nmax) {
  WalkCountTable t(d, WalkKind::saw);
  t.set_nmax(nmax);
  return t.count(n, x);
}

mpz_class count_srw_loop_formula(int d, int n) {
  if (n != 6) fail("Unsupported", "loop formula is implemented for n = 6 only");
  mpz_class D = d;
  // 6!/(3!3!) = 20, 6!/(2!2!1!1!) = 180, 6! = 720
  mpz_class three = 0;
  if (d >= 3) three = D * (D - 1) * (D - 2) / 6;
  return D * 20 + D * (D - 1) * 180 + three * 720;
}

std::vector<mpz_class> srw_counts_by_egf(const Coords& x, int mmax) {
  std::vector<std::vector<mpz_class>> binom(static_cast<std::size_t>(mmax + 1));
  for (int m = 0; m <= mmax; ++m) {
    binom[static_cast<std::size_t>(m)].resize(static_cast<std::size_t>(m + 1));
    for (int k = 0; k <= m; ++k)
      mpz_bin_uiui(binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)].get_mpz_t(),
                   static_cast<unsigned long>(m), static_cast<unsigned long>(k));
  }
  auto B = [&](int m, int k) -> const mpz_class& { return binom[static_cast<std::size_t>(m)][static_cast<std::size_t>(k)]; };
  std::vector<mpz_class> P(static_cast<std::size_t>(mmax + 1), 0);
  P[0] = 1;  // zero dimensions: only the empty walk
  for (int a0 : x) {
    int a = std::abs(a0);
    std::vector<mpz_class> A(static_cast<std::size_t>(mmax + 1), 0);
    for (int k = a; k <= mmax; k += 2) A[static_cast<std::size_t>(k)] = B(k, (k + a) / 2);
    std::vector<mpz_class> Q(static_cast<std::size_t>(mmax + 1), 0);
    for (int m = 0; m <= mmax; ++m) {
      mpz_class s = 0;
      for (int k = 0; k <= m; ++k) {
        const mpz_class& ak = A[static_cast<std::size_t>(k)];
        if (ak == 0) continue;
        const mpz_class& pm = P[static_cast<std::size_t>(m - k)];
        if (pm == 0) continue;
        s += B(m, k) * pm * ak;
      }
      Q[static_cast<std::size_t>(m)] = s;
    }
    P = std::move(Q);
  }
  return P;
}

}  // namespace noble
