#include "noble/srw_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "noble/error.hpp"
#include "noble/walks.hpp"

namespace noble {

namespace {

const char* kMagic = "NOBLE-INTEGRALS 1";

std::string coords_str(const Coords& x) {
  std::string s;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(x[i]);
  }
  return s;
}

Coords coords_parse(const std::string& s) {
  Coords x;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) x.push_back(std::stoi(tok));
  return x;
}

bool is_origin(const Coords& x) {
  return std::all_of(x.begin(), x.end(), [](int v) { return v == 0; });
}

Bound pick_min(std::vector<std::pair<Bound, std::string>> c, std::string& how) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < c.size(); ++i)
    if (mpfr_cmp(c[i].first.hi(), c[best].first.hi()) < 0) best = i;
  how = c[best].second;
  return c[best].first;
}

Bound bmax(const Bound& a, const Bound& b) { return max(a, b); }

// x with one coordinate of value v replaced by w, canonicalized
Coords replace_one(const Coords& x, int v, int w) {
  Coords y = x;
  for (int& c : y)
    if (c == v) {
      c = w;
      break;
    }
  return canonicalize(y);
}

std::vector<Coords> successors(const Coords& z) {
  std::vector<Coords> out;
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (j > 0 && z[j - 1] <= z[j]) continue;
    Coords y = z;
    ++y[j];
    out.push_back(y);
  }
  return out;
}

std::vector<Coords> minimal_elements(const std::vector<Coords>& pts) {
  std::vector<Coords> out;
  for (const Coords& a : pts) {
    bool dominated = false;
    for (const Coords& b : pts)
      if (b != a && majorized_by(b, a)) {
        dominated = true;
        break;
      }
    if (!dominated && std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

}  // namespace

Bound transition(int d, int m, const Coords& x) {
  if (m < 0) fail("DomainError", "transition needs m >= 0");
  if (static_cast<int>(x.size()) != d) fail("DimensionMismatch", "point has wrong dimension");
  std::vector<mpz_class> p = srw_counts_by_egf(x, m);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(2 * d), static_cast<unsigned long>(m));
  mpq_class q(p[static_cast<std::size_t>(m)], den);
  q.canonicalize();
  return Bound::from_mpq(q);
}

// ---------------------------------------------------------------- PointSetSpec

PointSetSpec PointSetSpec::list(std::vector<Coords> pts) {
  PointSetSpec s;
  s.kind = Kind::singleton_list;
  for (Coords& p : pts) p = canonicalize(p);
  s.points = std::move(pts);
  return s;
}

PointSetSpec PointSetSpec::parse(const std::string& raw, int d) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  if (s == "X") return l2sq_above(1);
  if (s == "Q") return l1_above(2);
  auto threshold = [&](const std::string& prefix) -> std::optional<std::string> {
    if (s.rfind(prefix, 0) == 0) return s.substr(prefix.size());
    return std::nullopt;
  };
  try {
    if (auto t = threshold("l1>")) return l1_above(std::stol(*t));
    if (auto t = threshold("l2sq>")) return l2sq_above(std::stol(*t));
    if (auto t = threshold("l2>")) {
      if (t->find('.') == std::string::npos) {
        long r = std::stol(*t);
        return l2sq_above(r * r);
      }
      double r = std::stod(*t);
      return l2sq_above(static_cast<long>(std::floor(r * r)));
    }
  } catch (const std::logic_error&) {
    fail("SyntaxError", "bad point-set threshold '" + raw + "'");
  }
  if (s.size() < 2 || s.front() != '{' || s.back() != '}')
    fail("UnsupportedSetKind", "point set '" + raw + "' is neither a list nor a threshold");
  std::vector<Coords> pts;
  std::string cur;
  int depth = 0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char c = s[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      pts.push_back(parse_point(cur, d));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) pts.push_back(parse_point(cur, d));
  if (pts.empty()) fail("UnsupportedSetKind", "empty point list");
  return list(std::move(pts));
}

bool PointSetSpec::contains(const Coords& x_in) const {
  Coords x = canonicalize(x_in);
  switch (kind) {
    case Kind::singleton_list:
      return std::find(points.begin(), points.end(), x) != points.end();
    case Kind::l1_threshold:
      return l1_norm(x) > threshold;
    case Kind::l2_threshold:
      return l2_norm_sq(x) > threshold;
  }
  return false;
}

std::vector<Coords> PointSetSpec::frontier(int d) const {
  if (kind == Kind::singleton_list) return points;
  std::vector<Coords> out;
  if (kind == Kind::l1_threshold) {
    const long t = threshold + 1;
    if (t <= 0) return {origin(d)};
    Coords cur;
    std::function<void(long, int)> rec = [&](long left, int maxpart) {
      if (left == 0) {
        Coords x = cur;
        x.resize(static_cast<std::size_t>(d), 0);
        out.push_back(x);
        return;
      }
      if (static_cast<int>(cur.size()) == d) return;
      for (int p = static_cast<int>(std::min<long>(left, maxpart)); p >= 1; --p) {
        cur.push_back(p);
        rec(left - p, p);
        cur.pop_back();
      }
    };
    rec(t, static_cast<int>(t));
    return out;
  }
  const long r2 = threshold;
  if (r2 < 0) return {origin(d)};
  const int top = static_cast<int>(std::floor(std::sqrt(static_cast<double>(r2)))) + 1;
  std::vector<Coords> cand;
  Coords cur;
  std::function<void(long, int)> rec = [&](long norm, int maxpart) {
    if (norm > r2) {
      Coords x = cur;
      x.resize(static_cast<std::size_t>(d), 0);
      cand.push_back(x);
      return;  // supersets are never minimal
    }
    if (static_cast<int>(cur.size()) == d) return;
    for (int p = maxpart; p >= 1; --p) {
      cur.push_back(p);
      rec(norm + static_cast<long>(p) * p, p);
      cur.pop_back();
    }
  };
  rec(0, top);
  for (const Coords& x : cand) {
    bool minimal = true;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j] == 0) continue;
      if (j + 1 < x.size() && x[j] - 1 < x[j + 1]) continue;  // decrement leaves the canonical cone
      Coords y = x;
      --y[j];
      if (l2_norm_sq(y) > r2) {
        minimal = false;
        break;
      }
    }
    if (minimal) out.push_back(x);
  }
  return minimal_elements(out);
}

std::string PointSetSpec::str() const {
  switch (kind) {
    case Kind::singleton_list: {
      std::string s = "{";
      for (std::size_t i = 0; i < points.size(); ++i) s += (i ? "," : "") + point_name(points[i]);
      return s + "}";
    }
    case Kind::l1_threshold:
      return "l1>" + std::to_string(threshold);
    case Kind::l2_threshold:
      return "l2sq>" + std::to_string(threshold);
  }
  return "?";
}

// ---------------------------------------------------------------- IntegralTable

IntegralTable::IntegralTable(int d) : d_(d), precision_bits_(precision_bits()) {
  if (d < 1) fail("DomainError", "dimension must be positive");
}

void IntegralTable::set_tstar_alpha(const Bound& a) {
  if (!a.certainly_positive()) fail("DomainError", "alpha_F lower bound must be positive for T*");
  if (tstar_alpha_ && mpfr_equal_p(tstar_alpha_->lo(), a.lo()))
    return;
  tstar_alpha_ = a.lower();
  for (auto it = entries_.begin(); it != entries_.end();)
    if (std::get<0>(it->first) == "T*")
      it = entries_.erase(it);
    else
      ++it;
}

const TableEntry& IntegralTable::put(const Key& k, TableEntry e) { return entries_[k] = std::move(e); }

const TableEntry* IntegralTable::find(const Key& k) const {
  auto it = entries_.find(k);
  return it == entries_.end() ? nullptr : &it->second;
}

void IntegralTable::need_finite(int n, const std::string& what) const {
  if (n < 0) fail("DomainError", what + " with negative n");
  if (d_ < 2 * n + 1)
    fail("DimensionTooLow", what + " needs d >= " + std::to_string(2 * n + 1) + ", have d = " + std::to_string(d_));
}

Bound IntegralTable::I(int n, int l, const Coords& x_in) {
  if (l < 0) fail("DomainError", "I with negative l");
  need_finite(n, "I_{" + std::to_string(n) + "," + std::to_string(l) + "}");
  Coords x = canonicalize(x_in);
  if (static_cast<int>(x.size()) != d_) fail("DimensionMismatch", "point has wrong dimension");
  Key k{"I", n, l, x};
  if (const TableEntry* e = find(k)) return e->value;
  if (n == 0) {
    auto& row = transition_rows_[x];
    if (static_cast<int>(row.size()) <= l) {
      int target = std::max(l, 2 * static_cast<int>(row.size()) + 8);
      std::vector<mpz_class> p = srw_counts_by_egf(x, target);
      row.clear();
      mpz_class den = 1;
      for (int m = 0; m <= target; ++m) {
        mpq_class q(p[static_cast<std::size_t>(m)], den);
        q.canonicalize();
        row.push_back(Bound::from_mpq(q));
        den *= 2 * d_;
      }
    }
    return put(k, {row[static_cast<std::size_t>(l)], "transition", true}).value;
  }
  if (l == 0) {
    if (frozen_)
      fail("MissingEntry", "I_{" + std::to_string(n) + ",0}(" + point_name(x) + ") at d = " + std::to_string(d_) +
                               " is not in the cache (use --compute-missing)");
    std::vector<Bound> v = bessel_engine(d_).values(x);
    for (int m = 1; m <= static_cast<int>(v.size()); ++m) put({"I", m, 0, x}, {v[static_cast<std::size_t>(m - 1)], "bessel-quadrature", true});
    return find(k)->value;
  }
  Bound a = I(n, l - 1, x);
  Bound b = I(n - 1, l - 1, x);
  return put(k, {a - b, "recursion", true}).value;
}

Bound IntegralTable::L(int n, const Coords& x_in) {
  need_finite(n, "L_" + std::to_string(n));
  Coords x = canonicalize(x_in);
  Key k{"L", n, 0, x};
  if (const TableEntry* e = find(k)) return e->value;
  Bound s(0);
  for (auto& [y, w] : orbit_shift_weights(x)) s += w * I(n, 0, y);
  return put(k, {s, "orbit-sum", true}).value;
}

Bound IntegralTable::V(int n, int l) {
  need_finite(n, "V_" + std::to_string(n));
  Coords o = origin(d_);
  Key k{"V", n, l, o};
  if (const TableEntry* e = find(k)) return e->value;
  Bound dd(d_);
  Coords e2 = unit(d_, 0, 2), e22 = unit(d_, 0, 2), e4 = unit(d_, 0, 4);
  if (d_ >= 2) e22[1] = 2;
  Bound inner = I(n, l, o) - Bound(2) * I(n, l, e2) + I(n, l, o) / (Bound(2) * dd) + I(n, l, e4) / (Bound(2) * dd);
  if (d_ >= 2) inner += (dd - Bound(1)) / dd * I(n, l, e22);
  Bound v = inner / (Bound(2) * dd).square();
  return put(k, {v, "sin-squared-expansion", true}).value;
}

Bound IntegralTable::J(int n, int l, const Coords& x_in) {
  Coords x = canonicalize(x_in);
  Key k{"J", n, l, x};
  if (const TableEntry* e = find(k)) return e->value;
  if (n < 0 || l < 0) fail("DomainError", "J with negative index");
  if (d_ >= 2 * (n + 3) + 1) {
    Bound dd(d_);
    Bound shift(0);
    std::map<int, int> mult;
    for (int v : x) ++mult[v];
    for (auto& [v, m] : mult) {
      Bound pair = I(n + 3, l, replace_one(x, v, v + 2)) + I(n + 3, l, replace_one(x, v, std::abs(v - 2)));
      shift += Bound(m) * pair;
    }
    Bound v = I(n + 2, l + 1, x) - I(n + 3, l, x) / dd + shift / (Bound(2) * dd.square());
    return put(k, {v, "J-exact", true}).value;
  }
  if (!j_fallback_)
    fail("DimensionTooLow", "J_{" + std::to_string(n) + "," + std::to_string(l) + "} needs d >= " +
                                std::to_string(2 * (n + 3) + 1) + " (fallback disabled)");
  Bound v = I(n + 2, l + 1, x) + Bound(4) / Bound(d_) * K(n + 2, l, x);
  return put(k, {v, "J-fallback-4/d", false}).value;
}

Bound IntegralTable::K(int n, int l, const Coords& x_in) {
  need_finite(n, "K_{" + std::to_string(n) + "," + std::to_string(l) + "}");
  Coords x = canonicalize(x_in);
  Key k{"K", n, l, x};
  if (const TableEntry* e = find(k)) return e->value;
  Coords o = origin(d_);
  if (is_origin(x) && l % 2 == 0) return put(k, {I(n, l, o), "origin-even-exact", true}).value;
  std::vector<std::pair<Bound, std::string>> c;
  c.emplace_back(sqrt(I(n, 2 * l, o) * L(n, x)), "cauchy-schwarz");
  if (is_origin(x)) c.emplace_back(sqrt(I(n, l - 1, o) * I(n, l + 1, o)), "origin-odd-interpolation");
  if (l == 0 && n >= 1)
    c.emplace_back(K(n - 1, 0, x) + sqrt(I(n - 1, 2, o) * L(n - 1, x)) + sqrt(I(n, 4, o) * L(n, x)), "l0-three-term-split");
  std::string how;
  Bound v = pick_min(std::move(c), how);
  return put(k, {v, how, false}).value;
}

Bound IntegralTable::T_generic(int n, int l, const Coords& x, bool star, std::string& how) {
  Bound scale(1);
  if (star) {
    if (!tstar_alpha_) fail("MissingEntry", "T* needs a lower bound on alpha_F");
    scale = Bound(1) / *tstar_alpha_;
  }
  std::vector<std::pair<Bound, std::string>> c;
  c.emplace_back(Bound(4) / Bound(d_) * K(n, l, x), "4/d");
  if (d_ >= 2 * (n + 1) + 1) c.emplace_back(Bound(2) / Bound(d_) * K(n + 1, l, x), "2/d");
  std::string which;
  Bound m = pick_min(std::move(c), which);
  how = std::string(star ? "Tstar-" : "T-") + which;
  return K(n, l + 1, x) + scale * m;
}

Bound IntegralTable::T(int n, int l, const Coords& x_in) {
  Coords x = canonicalize(x_in);
  Key k{"T", n, l, x};
  if (const TableEntry* e = find(k)) return e->value;
  std::string how;
  Bound v = T_generic(n, l, x, false, how);
  return put(k, {v, how, false}).value;
}

Bound IntegralTable::Tstar(int n, int l, const Coords& x_in) {
  Coords x = canonicalize(x_in);
  Key k{"T*", n, l, x};
  if (const TableEntry* e = find(k)) return e->value;
  std::string how;
  Bound v = T_generic(n, l, x, true, how);
  return put(k, {v, how, false}).value;
}

Bound IntegralTable::U(int n, int l, const Coords& x_in) {
  need_finite(n, "U_{" + std::to_string(n) + "," + std::to_string(l) + "}");
  Coords x = canonicalize(x_in);
  Key k{"U", n, l, x};
  if (const TableEntry* e = find(k)) return e->value;
  Coords o = origin(d_);
  if (is_origin(x) && l % 2 == 0)
    return put(k, {(I(n, l, o) - I(n, l, unit(d_, 0, 2))) / Bound(2 * d_), "origin-even-exact", true}).value;
  std::vector<std::pair<Bound, std::string>> c;
  c.emplace_back(K(n, l, x) / Bound(d_), "K/d");
  c.emplace_back(sqrt(clamp_nonneg(V(n, 2 * l)) * L(n, x)), "cauchy-schwarz");
  std::string how;
  Bound v = pick_min(std::move(c), how);
  return put(k, {v, how, false}).value;
}

Bound IntegralTable::get(const std::string& name, int n, int l, const Coords& x) {
  used_.insert({name, n, name == "L" ? 0 : l, name == "V" ? origin(d_) : canonicalize(x)});
  if (name == "I") return I(n, l, x);
  if (name == "L") return L(n, x);
  if (name == "V") return V(n, l);
  if (name == "J") return J(n, l, x);
  if (name == "K") return K(n, l, x);
  if (name == "T") return T(n, l, x);
  if (name == "T*") return Tstar(n, l, x);
  if (name == "U") return U(n, l, x);
  fail("UnknownSymbol", "no integral named '" + name + "'");
}

const TableEntry& IntegralTable::entry(const std::string& name, int n, int l, const Coords& x) {
  get(name, n, l, x);
  Coords c = name == "V" ? origin(d_) : canonicalize(x);
  return *find({name, n, name == "L" ? 0 : l, c});
}

// ------------------------------------------------ monotone majorants for suprema

Bound IntegralTable::K_mono(int n, int l, const Coords& z) {
  need_finite(n, "K");
  Coords o = origin(d_);
  if (n == 0) {
    // L_0(x) = 1/|orbit(x)| <= 1/(2d) away from the origin
    Bound l0 = is_origin(z) ? Bound(1) : Bound::rational(1, 2 * d_);
    return sqrt(I(0, 2 * l, o) * l0);
  }
  Bound best = sqrt(I(n, 2 * l, o) * L(n, z));
  if (l == 0 && n >= 2) {
    Bound alt = K_mono(n - 1, 0, z) + sqrt(I(n - 1, 2, o) * L(n - 1, z)) + sqrt(I(n, 4, o) * L(n, z));
    if (alt.certainly_lt(best) || mpfr_cmp(alt.hi(), best.hi()) < 0) best = alt;
  }
  return best;
}

Bound IntegralTable::U_mono(int n, int l, const Coords& z) {
  Bound a = K_mono(n, l, z) / Bound(d_);
  if (n == 0) return a;
  Bound b = sqrt(clamp_nonneg(V(n, 2 * l)) * L(n, z));
  return mpfr_cmp(b.hi(), a.hi()) < 0 ? b : a;
}

Bound IntegralTable::T_mono(int n, int l, const Coords& z, bool star) {
  Bound scale(1);
  if (star) {
    if (!tstar_alpha_) fail("MissingEntry", "T* needs a lower bound on alpha_F");
    scale = Bound(1) / *tstar_alpha_;
  }
  Bound m = Bound(4) / Bound(d_) * K_mono(n, l, z);
  if (d_ >= 2 * (n + 1) + 1) {
    Bound m2 = Bound(2) / Bound(d_) * K_mono(n + 1, l, z);
    if (mpfr_cmp(m2.hi(), m.hi()) < 0) m = m2;
  }
  return K_mono(n, l + 1, z) + scale * m;
}

Bound IntegralTable::majorant(const std::string& name, int n, int l, const Coords& z, std::string& how) {
  if (name == "I") {
    if (n == 0) fail("UnsupportedSetKind", "I_{0,l} has no monotone majorant over infinite sets");
    how = "monotone";
    return I(n, l, z);
  }
  if (name == "L") {
    if (n == 0) fail("UnsupportedSetKind", "L_0 has no monotone majorant over infinite sets");
    how = "monotone";
    return L(n, z);
  }
  if (name == "V") {
    how = "constant";
    return V(n, l);
  }
  if (name == "K") {
    how = "cs-majorant";
    return K_mono(n, l, z);
  }
  if (name == "U") {
    how = "cs-majorant";
    return U_mono(n, l, z);
  }
  if (name == "T" || name == "T*") {
    how = "cs-majorant";
    return T_mono(n, l, z, name == "T*");
  }
  if (name == "J") {
    std::vector<std::pair<Bound, std::string>> c;
    Bound base = I(n + 2, l + 1, z);
    c.emplace_back(base + Bound(4) / Bound(d_) * K_mono(n + 2, l, z), "I+4K/d");
    if (d_ >= 2 * (n + 3) + 1) c.emplace_back(base + Bound(2) * U_mono(n + 3, l, z), "I+2U");
    std::string which;
    Bound v = pick_min(std::move(c), which);
    how = "majorant " + which;
    return max(v, Bound(0));
  }
  fail("UnknownSymbol", "no integral named '" + name + "'");
}

SupResult IntegralTable::sup(const std::string& name, int n, int l, const PointSetSpec& S) {
  SupResult r;
  bool first = true;
  auto take = [&](const Bound& v, const Coords& x, const std::string& how) {
    if (first || mpfr_cmp(v.hi(), r.value.hi()) > 0) {
      r.argmax = x;
      r.provenance = how;
    }
    r.value = first ? v : bmax(r.value, v);
    first = false;
  };
  if (S.finite()) {
    for (const Coords& x : S.points) take(get(name, n, l, x), x, "finite-max");
    used_sups_[{name, n, l, S.str()}] = r;
    return r;
  }
  std::vector<Coords> F = S.frontier(d_);
  for (int layer = 0; layer < sup_depth_; ++layer) {
    std::vector<Coords> next;
    for (const Coords& z : F) {
      take(get(name, n, l, z), z, "pointwise");
      for (Coords& y : successors(z)) next.push_back(y);
    }
    F = minimal_elements(next);
  }
  for (const Coords& z : F) {
    std::string how;
    Bound v = majorant(name, n, l, z, how);
    take(v, z, "frontier " + how);
  }
  used_sups_[{name, n, l, S.str()}] = r;
  return r;
}

void IntegralTable::build(int n_max, int l_max, const std::vector<Coords>& points) {
  for (const Coords& x : points) {
    for (int n = 0; n <= n_max && 2 * n + 1 <= d_; ++n) {
      for (int l = 0; l <= l_max; ++l) I(n, l, x);
      L(n, x);
      for (int l = 0; l + 1 <= l_max; ++l)
        if (2 * (n + 3) + 1 <= d_) J(n, l, x);
    }
  }
  for (int n = 0; n <= n_max && 2 * n + 1 <= d_; ++n)
    for (int l = 0; l <= l_max; ++l) V(n, l);
}

int IntegralTable::check_recursion() const {
  int checked = 0;
  for (auto& [k, e] : entries_) {
    auto& [name, n, m, x] = k;
    if (name != "I" || n < 1 || m < 1) continue;
    const TableEntry* a = find({"I", n, m - 1, x});
    const TableEntry* b = find({"I", n - 1, m - 1, x});
    if (!a || !b) continue;
    Bound res = e.value - a->value + b->value;
    if (!res.contains_zero())
      fail("CacheCorrupt", "recursion residual at I_{" + std::to_string(n) + "," + std::to_string(m) + "}(" +
                               point_name(x) + ") is " + res.str(6));
    ++checked;
  }
  return checked;
}

std::string IntegralTable::serialize() const {
  std::ostringstream os;
  os << kMagic << "\n";
  os << "d " << d_ << "\n";
  os << "precision " << precision_bits_ << "\n";
  for (auto& [k, e] : entries_) {
    auto& [name, n, l, x] = k;
    if (name == "T*") continue;  // depends on alpha_F
    std::string prov = e.provenance;
    std::replace(prov.begin(), prov.end(), ' ', '_');
    os << "e " << name << " " << n << " " << l << " " << coords_str(x) << " " << e.value.hex_lo() << " "
       << e.value.hex_hi() << " " << (e.exact ? 1 : 0) << " " << prov << "\n";
  }
  os << "end\n";
  return os.str();
}

IntegralTable IntegralTable::deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) fail("CacheCorrupt", "empty integral cache");
  if (line.rfind("NOBLE-INTEGRALS", 0) != 0) fail("CacheCorrupt", "missing integral cache header");
  if (line != kMagic) fail("CacheVersion", "unsupported integral cache version '" + line + "'");
  int d = 0;
  long prec = 0;
  std::string tag;
  if (!(is >> tag >> d) || tag != "d") fail("CacheCorrupt", "missing dimension line");
  if (!(is >> tag >> prec) || tag != "precision") fail("CacheCorrupt", "missing precision line");
  IntegralTable t(d);
  t.precision_bits_ = prec;
  bool ended = false;
  while (is >> tag) {
    if (tag == "end") {
      ended = true;
      break;
    }
    if (tag != "e") fail("CacheCorrupt", "unknown record '" + tag + "'");
    std::string name, xs, lo, hi, prov;
    int n = 0, l = 0, exact = 0;
    if (!(is >> name >> n >> l >> xs >> lo >> hi >> exact >> prov)) fail("CacheCorrupt", "truncated record");
    Coords x = coords_parse(xs);
    if (static_cast<int>(x.size()) != d || !is_canonical(x)) fail("CacheCorrupt", "bad point in record");
    Bound v;
    try {
      v = Bound::from_hex(lo, hi);
    } catch (const Error&) {
      fail("CacheCorrupt", "unreadable endpoints");
    }
    if (mpfr_cmp(v.lo(), v.hi()) > 0) fail("CacheCorrupt", "inverted interval");
    std::replace(prov.begin(), prov.end(), '_', ' ');
    t.entries_[{name, n, l, x}] = TableEntry{v, prov, exact != 0};
  }
  if (!ended) fail("CacheCorrupt", "integral cache truncated (no end marker)");
  t.check_recursion();
  return t;
}

void IntegralTable::save(const std::string& path) const {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp);
    if (!f) fail("IOError", "cannot write " + path);
    f << serialize();
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) fail("IOError", "cannot move cache into place at " + path);
}

IntegralTable IntegralTable::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("IOError", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return deserialize(ss.str());
}

void IntegralTable::merge(const IntegralTable& o) {
  if (o.d_ != d_) fail("DimensionMismatch", "cannot merge tables of different dimension");
  for (auto& [k, e] : o.entries_) {
    auto it = entries_.find(k);
    if (it == entries_.end() || e.value.width_d() < it->second.value.width_d()) entries_[k] = e;
  }
}

std::vector<Coords> demo_points(int d) {
  std::vector<Coords> out;
  Coords cur;
  std::function<void(int, int)> rec = [&](int left, int maxpart) {
    if (left == 0) {
      Coords x = cur;
      x.resize(static_cast<std::size_t>(d), 0);
      out.push_back(x);
      return;
    }
    if (static_cast<int>(cur.size()) == d) return;
    for (int p = std::min(left, maxpart); p >= 1; --p) {
      cur.push_back(p);
      rec(left - p, p);
      cur.pop_back();
    }
  };
  for (int t = 0; t <= 5; ++t) rec(t, t);
  // the six-step points with at most two nonzero entries, and 2e1+2e2+2e3
  for (Coords x : std::vector<Coords>{{6}, {5, 1}, {4, 2}, {3, 3}, {2, 2, 2}}) {
    if (static_cast<int>(x.size()) > d) continue;
    x.resize(static_cast<std::size_t>(d), 0);
    out.push_back(x);
  }
  return out;
}

}  // namespace noble
