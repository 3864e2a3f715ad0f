#include "noble/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "noble/error.hpp"

namespace noble {

Coords canonicalize(const Coords& x) {
  Coords c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::abs(x[i]);
  std::sort(c.begin(), c.end(), std::greater<int>());
  return c;
}

LatticePoint canonicalize(const LatticePoint& x) { return LatticePoint{canonicalize(x.coords)}; }

bool is_canonical(const Coords& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0) return false;
    if (i > 0 && x[i] > x[i - 1]) return false;
  }
  return true;
}

Coords origin(int d) { return Coords(static_cast<std::size_t>(d), 0); }

Coords unit(int d, int i, int times) {
  Coords c = origin(d);
  c.at(static_cast<std::size_t>(i)) = times;
  return c;
}

long l1_norm(const Coords& x) {
  long s = 0;
  for (int v : x) s += std::abs(v);
  return s;
}

long l2_norm_sq(const Coords& x) {
  long s = 0;
  for (int v : x) s += static_cast<long>(v) * v;
  return s;
}

Coords parse_point(const std::string& raw, int d) {
  std::string s;
  for (char c : raw)
    if (c != ' ') s += c;
  if (s.empty()) fail("SyntaxError", "empty point");
  Coords x = origin(d);
  if (s == "0" || s == "origin") return x;
  if (s.front() == '(') {
    if (s.back() != ')') fail("SyntaxError", "unterminated point tuple '" + raw + "'");
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string tok;
    std::size_t i = 0;
    while (std::getline(ss, tok, ',')) {
      if (i >= x.size()) fail("SyntaxError", "point has more than d coordinates: '" + raw + "'");
      x[i++] = std::stoi(tok);
    }
    return canonicalize(x);
  }
  std::stringstream ss(s);
  std::string term;
  while (std::getline(ss, term, '+')) {
    auto e = term.find('e');
    if (e == std::string::npos) fail("SyntaxError", "bad point term '" + term + "'");
    int mult = 1;
    if (e > 0) mult = std::stoi(term.substr(0, e));
    int idx = std::stoi(term.substr(e + 1));
    if (idx < 1 || idx > d) fail("SyntaxError", "unit index out of range in '" + term + "'");
    x[static_cast<std::size_t>(idx - 1)] += mult;
  }
  return canonicalize(x);
}

std::string point_name(const Coords& x) {
  Coords c = canonicalize(x);
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] == 0) continue;
    if (!s.empty()) s += "+";
    if (c[i] != 1) s += std::to_string(c[i]);
    s += "e" + std::to_string(i + 1);
  }
  return s.empty() ? "0" : s;
}

OrbitSignature orbit_signature(const Coords& x) {
  Coords c = canonicalize(x);
  OrbitSignature sig;
  sig.d = static_cast<int>(c.size());
  for (int v : c) {
    if (!sig.parts.empty() && sig.parts.back().first == v)
      ++sig.parts.back().second;
    else
      sig.parts.emplace_back(v, 1);
  }
  return sig;
}

mpz_class orbit_size(const Coords& x) {
  OrbitSignature sig = orbit_signature(x);
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(sig.d));
  for (auto& [v, m] : sig.parts) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(m));
    r /= f;
    if (v != 0) r <<= static_cast<mp_bitcnt_t>(m);
  }
  return r;
}

Coords apply_symmetry(const Coords& x, const std::vector<int>& nu, const std::vector<int>& delta) {
  Coords y(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) y[j] = delta[j] * x[static_cast<std::size_t>(nu[j])];
  return y;
}

std::vector<std::pair<Coords, Bound>> orbit_shift_weights(const Coords& x_in) {
  Coords x = canonicalize(x_in);
  const int d = static_cast<int>(x.size());
  std::vector<int> vals;
  for (int v : x)
    if (v != 0) vals.push_back(v);
  const int p = static_cast<int>(vals.size());
  std::set<int> distinct(vals.begin(), vals.end());
  if (distinct.size() > 4)
    fail("UnsupportedOrbitShape", "more than 4 distinct nonzero magnitudes in " + point_name(x));
  if (p > 8) fail("UnsupportedOrbitShape", "more than 8 nonzero coordinates in " + point_name(x));
  const int zeros = d - p;

  std::map<Coords, unsigned long long> counts;
  unsigned long long total = 0;
  // target[i] in [0, p) places entry i onto nonzero position target[i]; -1 sends it to a zero slot
  std::vector<int> target(static_cast<std::size_t>(p), -1);
  std::vector<bool> used(static_cast<std::size_t>(p), false);

  std::function<void(int)> rec = [&](int i) {
    if (i == p) {
      int r = 0;
      std::vector<int> placed;
      for (int k = 0; k < p; ++k) {
        if (target[static_cast<std::size_t>(k)] < 0)
          ++r;
        else
          placed.push_back(k);
      }
      if (r > zeros) return;
      unsigned long long ways = 1;
      for (int k = 0; k < r; ++k) ways *= static_cast<unsigned long long>(zeros - k);
      ways <<= r;  // signs on zero slots do not change |x+y|
      const int np = static_cast<int>(placed.size());
      for (int mask = 0; mask < (1 << np); ++mask) {
        Coords z = origin(d);
        for (int k = 0; k < p; ++k) z[static_cast<std::size_t>(k)] = vals[static_cast<std::size_t>(k)];
        int slot = p;
        for (int k = 0; k < p; ++k)
          if (target[static_cast<std::size_t>(k)] < 0) z[static_cast<std::size_t>(slot++)] = vals[static_cast<std::size_t>(k)];
        for (int q = 0; q < np; ++q) {
          int k = placed[static_cast<std::size_t>(q)];
          int sgn = (mask >> q) & 1 ? -1 : 1;
          z[static_cast<std::size_t>(target[static_cast<std::size_t>(k)])] += sgn * vals[static_cast<std::size_t>(k)];
        }
        Coords c = canonicalize(z);
        counts[c] += ways;
        total += ways;
      }
      return;
    }
    target[static_cast<std::size_t>(i)] = -1;
    rec(i + 1);
    for (int t = 0; t < p; ++t) {
      if (used[static_cast<std::size_t>(t)]) continue;
      used[static_cast<std::size_t>(t)] = true;
      target[static_cast<std::size_t>(i)] = t;
      rec(i + 1);
      used[static_cast<std::size_t>(t)] = false;
    }
    target[static_cast<std::size_t>(i)] = -1;
  };
  rec(0);

  std::vector<std::pair<Coords, Bound>> out;
  for (auto& [c, n] : counts) out.emplace_back(c, Bound::from_mpq(mpq_class(mpz_class(std::to_string(n)), mpz_class(std::to_string(total)))));
  return out;
}

bool majorized_by(const Coords& x, const Coords& z) {
  Coords a = canonicalize(x), b = canonicalize(z);
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

double dhat(const std::vector<double>& k) {
  double s = 0;
  for (double v : k) s += std::cos(v);
  return s / static_cast<double>(k.size());
}

double dhat_sin(const std::vector<double>& k) {
  double s = 0;
  for (double v : k) s += std::sin(v) * std::sin(v);
  double d = static_cast<double>(k.size());
  return s / (d * d);
}

Bound dhat(const std::vector<Bound>& k) {
  Bound s(0);
  for (const Bound& v : k) s += cos(v);
  return s / Bound(static_cast<long>(k.size()));
}

CosineSplit cosine_split_check(double t, const std::vector<double>& parts) {
  CosineSplit r{};
  r.lhs = 1.0 - std::cos(t);
  double s = 0, cross = 0;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    s += 1.0 - std::cos(parts[i]);
    for (std::size_t j = 0; j < i; ++j) cross += std::fabs(std::sin(parts[i])) * std::fabs(std::sin(parts[j]));
  }
  r.rhs_sum = s + cross;
  r.rhs_j = static_cast<double>(parts.size()) * s;
  return r;
}

std::vector<Coords> orbit_points(const Coords& x) {
  Coords c = canonicalize(x);
  std::sort(c.begin(), c.end());
  std::set<Coords> out;
  do {
    int nz = 0;
    for (int v : c)
      if (v != 0) ++nz;
    Coords idx;
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c[i] != 0) idx.push_back(static_cast<int>(i));
    for (int mask = 0; mask < (1 << nz); ++mask) {
      Coords y = c;
      for (int q = 0; q < nz; ++q)
        if ((mask >> q) & 1) y[static_cast<std::size_t>(idx[static_cast<std::size_t>(q)])] *= -1;
      out.insert(y);
    }
  } while (std::next_permutation(c.begin(), c.end()));
  return {out.begin(), out.end()};
}

std::pair<double, double> fourier_weight_check(const std::vector<std::pair<Coords, double>>& g,
                                               const std::vector<double>& k) {
  double lhs = 0, mass2 = 0;
  for (auto& [x, gx] : g) {
    for (const Coords& y : orbit_points(x)) {
      double kx = 0;
      for (std::size_t i = 0; i < k.size(); ++i) kx += k[i] * y[i];
      lhs += gx * (1.0 - std::cos(kx));
      mass2 += gx * static_cast<double>(l2_norm_sq(y));
    }
  }
  return {lhs, (1.0 - dhat(k)) * mass2};
}

}  // namespace noble
