#include "noble/diagrams.hpp"

#include <numeric>

#include "noble/error.hpp"

namespace noble {

DiagramKind diagram_kind_from_string(const std::string& s) {
  if (s == "bubble") return DiagramKind::bubble;
  if (s == "triangle") return DiagramKind::triangle;
  if (s == "square") return DiagramKind::square;
  fail("ConfigError", "unknown diagram kind '" + s + "'");
}

int legs(DiagramKind k) {
  switch (k) {
    case DiagramKind::bubble: return 2;
    case DiagramKind::triangle: return 3;
    case DiagramKind::square: return 4;
  }
  return 0;
}

namespace {
mpz_class binom(long n, long k) {
  if (k < 0 || n < k) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}
}  // namespace

mpz_class prefix_multiplicity(int k, long excess) {
  if (excess < 0) return 0;
  return binom(excess + k - 1, k - 1);
}

mpz_class tail_multiplicity(int k, int j, long R) {
  if (j == k) return 1;
  if (R <= 0) return 0;
  return binom(R - 1 + k - j, k - j);
}

DiagramBound diagram_bound(DiagramKind kind, const std::vector<int>& m, int M, const Coords& x,
                           const DiagramInputs& in, IntegralTable& t, WalkCountTable& a) {
  int k = legs(kind);
  if (static_cast<int>(m.size()) != k)
    fail("ConfigError", "diagram needs " + std::to_string(k) + " leg lengths");
  for (int v : m)
    if (v < 0) fail("ConfigError", "negative leg length");
  int sm = std::accumulate(m.begin(), m.end(), 0);
  if (M < sm) fail("ConfigError", "cutoff M must be at least the sum of the leg lengths");
  int d = t.dim();
  if (a.dim() != d) fail("DimensionMismatch", "walk table dimension differs from the integral table");
  DiagramBound out;
  Bound dd(2 * d);

  bool counts_available = a.kind() == WalkKind::bond_sa || a.kind() == WalkKind::saw;
  if (!counts_available) fail("ConfigError", "diagram prefixes need bond-avoiding or self-avoiding counts");
  if (sm >= in.repulsive_limit || M - 1 > a.nmax()) {
    out.path = "non-repulsive";
    Bound f = Bound::rational(2 * d, 2 * d - 1) * in.Gamma1;
    out.value = f.pow(sm) * in.Gamma2p.pow(k) * t.K(k, sm, x);
    out.prefix = Bound(0);
    return out;
  }
  out.path = "repulsive";
  out.prefix = Bound(0);
  for (int i = sm; i <= M - 1; ++i) {
    mpz_class c = prefix_multiplicity(k, i - sm);
    const mpz_class& ai = a.count(i, x);
    if (ai == 0) continue;
    out.prefix += Bound::from_mpz(c * ai) * in.mubar.pow(i);
  }
  Bound scale = (dd * in.mubar).pow(M);
  long R = M - sm;
  out.value = out.prefix;
  for (int j = 1; j <= k; ++j) {
    mpz_class c = tail_multiplicity(k, j, R);
    Bound term = c == 0 ? Bound(0) : Bound::from_mpz(c) * scale * in.Gamma2p.pow(j) * t.K(j, M, x);
    out.tails.push_back(term);
    out.value += term;
  }
  return out;
}

Bound weighted_ladder(int d, const Bound& mubar, int l, int M, const std::vector<Bound>& h0, const Bound& h1M) {
  if (l > M) fail("ConfigError", "ladder needs l <= M");
  if (static_cast<int>(h0.size()) != M - l) fail("ConfigError", "ladder needs M - l explicit H^{0,i} bounds");
  Bound q = Bound(2 * d) * mubar;
  Bound s(0);
  for (int i = l; i < M; ++i) s += q.pow(i - l) * h0[static_cast<std::size_t>(i - l)];
  return s + q.pow(M - l) * h1M;
}

}  // namespace noble
