#include <doctest.h>

#include <random>
#include <sstream>

#include "noble/error.hpp"
#include "noble/srw_table.hpp"
#include "noble/walks.hpp"

using namespace noble;

namespace {

Coords add(const Coords& a, const Coords& b) {
  Coords c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += b[i];
  return c;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> t;
  for (std::string s; is >> s;) t.push_back(s);
  return t;
}

}  // namespace

TEST_CASE("transition probabilities are exact") {
  CHECK(transition(2, 6, origin(2)).contains(Bound::rational(400, 4096)));
  CHECK(transition(2, 6, origin(2)).is_point());
  CHECK(transition(7, 0, origin(7)).contains(1.0));
  CHECK(transition(7, 1, unit(7, 0)).contains(Bound::rational(1, 14)));
}

TEST_CASE("recursion examples and residual check") {
  IntegralTable t(9);
  Coords o = origin(9);
  CHECK(t.I(1, 1, o).overlaps(t.I(1, 0, o) - Bound(1)));
  CHECK(t.I(2, 1, o).overlaps(t.I(2, 0, o) - t.I(1, 0, o)));
  t.build(3, 4, {o, unit(9, 0), parse_point("e1+e2", 9)});
  CHECK(t.check_recursion() > 0);
}

TEST_CASE("L, V and K special cases") {
  int d = 11;
  IntegralTable t(d);
  Bound dd(d);
  Coords e1 = unit(d, 0), o = origin(d);
  Bound L1 = t.I(2, 0, o) / (Bound(2) * dd) + t.I(2, 0, unit(d, 0, 2)) / (Bound(2) * dd) +
             (dd - Bound(1)) / dd * t.I(2, 0, parse_point("e1+e2", d));
  CHECK(t.L(2, e1).overlaps(L1));
  CHECK(t.L(2, o).overlaps(t.I(2, 0, o)));
  CHECK(t.V(2, 0).certainly_nonneg());
  CHECK(t.K(2, 2, o).overlaps(t.I(2, 2, o)));
  for (const Coords& x : {o, e1, parse_point("e1+e2", d)})
    for (int l = 0; l <= 3; ++l) {
      CHECK(t.U(2, l, x).hi_d() <= (t.K(2, l, x) / dd).hi_d() * (1 + 1e-30));
      CHECK(t.T(1, l, x).certainly_nonneg());
      CHECK(t.K(1, l, x).certainly_nonneg());
      if (l <= 1) CHECK(t.J(1, l, x).certainly_nonneg());
    }
  // J below the dimension gate
  IntegralTable small(9);
  CHECK_THROWS_AS((void)small.J(2, 0, origin(9)), Error);
}

TEST_CASE("point-set frontiers") {
  auto fq = PointSetSpec::parse("Q", 11).frontier(11);
  std::vector<Coords> q{parse_point("3e1", 11), parse_point("2e1+e2", 11), parse_point("e1+e2+e3", 11)};
  std::sort(fq.begin(), fq.end());
  std::sort(q.begin(), q.end());
  CHECK(fq == q);
  auto fx = PointSetSpec::parse("X", 11).frontier(11);
  std::vector<Coords> x{parse_point("2e1", 11), parse_point("e1+e2", 11)};
  std::sort(fx.begin(), fx.end());
  std::sort(x.begin(), x.end());
  CHECK(fx == x);
  // sampled points of X dominate some frontier element
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 300; ++rep) {
    Coords p(11, 0);
    for (int i = 0; i < 4; ++i) p[static_cast<std::size_t>(i)] = static_cast<int>(rng() % 4);
    p = canonicalize(p);
    if (!PointSetSpec::parse("X", 11).contains(p)) continue;
    bool dom = false;
    for (const Coords& f : fx) dom = dom || majorized_by(f, p);
    CHECK(dom);
  }
  CHECK_THROWS_AS(PointSetSpec::parse("balls", 11), Error);
  IntegralTable t(11);
  SupResult s = t.sup("I", 1, 0, PointSetSpec::parse("{0}", 11));
  CHECK(s.value.overlaps(t.I(1, 0, origin(11))));
  SupResult sq = t.sup("I", 2, 1, PointSetSpec::parse("Q", 11));
  Bound m = max(max(t.I(2, 1, q[0]), t.I(2, 1, q[1])), t.I(2, 1, q[2]));
  CHECK(sq.value.hi_d() >= m.lo_d());
}

TEST_CASE("monotonicity in x for 200 ordered pairs") {
  int d = 11;
  IntegralTable t(d);
  std::vector<Coords> xs{origin(d), unit(d, 0), parse_point("e1+e2", d), unit(d, 0, 2), parse_point("2e1+e2", d),
                         parse_point("e1+e2+e3", d)};
  std::vector<Coords> ys{unit(d, 0), parse_point("e1+e2", d), unit(d, 0, 2)};
  std::mt19937_64 rng(2024);
  int pairs = 0, violations = 0, certified = 0, ties = 0;
  while (pairs < 200) {
    const Coords& x = xs[rng() % xs.size()];
    const Coords& y = ys[rng() % ys.size()];
    int n = 1 + static_cast<int>(rng() % 4), l = static_cast<int>(rng() % 5);
    Coords z = add(x, y);
    Bound a = t.I(n, l, z), b = t.I(n, l, x);
    if (b.certainly_lt(a)) ++violations;
    // I_{1,l}(0) - I_{1,l}(e1) = p_l(0), which vanishes for odd l
    bool tie = n == 1 && l % 2 == 1 && x == origin(d) && z == unit(d, 0);
    if (a.certainly_le(b)) ++certified;
    else if (tie && a.overlaps(b)) ++ties;
    Bound la = t.L(n, z), lb = t.L(n, x);
    if (lb.certainly_lt(la)) ++violations;
    if (la.certainly_le(lb)) ++certified;
    ++pairs;
  }
  CHECK(violations == 0);
  CHECK(certified + ties == 400);
}

TEST_CASE("serialization round-trip and load-time validation") {
  IntegralTable t(9);
  t.build(2, 3, {origin(9), unit(9, 0)});
  std::string s = t.serialize();
  CHECK(s.rfind("NOBLE-INTEGRALS 1\n", 0) == 0);
  IntegralTable r = IntegralTable::deserialize(s);
  CHECK(r.serialize() == s);
  CHECK(r.size() == t.size());

  // swap the enclosure of I_{1,1}(0) for that of I_{1,0}(0)
  std::istringstream is(s);
  std::vector<std::string> lines;
  for (std::string line; std::getline(is, line);) lines.push_back(line);
  std::string lo, hi, coords0;
  for (auto& line : lines) {
    auto tk = tokens(line);
    if (tk.size() > 6 && tk[1] == "I" && tk[2] == "1" && tk[3] == "0" && coords0.empty()) {
      coords0 = tk[4];
      lo = tk[5];
      hi = tk[6];
    }
  }
  REQUIRE(!coords0.empty());
  std::string bad;
  for (auto& line : lines) {
    auto tk = tokens(line);
    if (tk.size() > 6 && tk[1] == "I" && tk[2] == "1" && tk[3] == "1" && tk[4] == coords0) {
      tk[5] = lo;
      tk[6] = hi;
      std::string j;
      for (auto& x : tk) j += (j.empty() ? "" : " ") + x;
      bad += j + "\n";
    } else {
      bad += line + "\n";
    }
  }
  try {
    (void)IntegralTable::deserialize(bad);
    FAIL("tampered cache accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == "CacheCorrupt");
  }
  CHECK_THROWS_AS((void)IntegralTable::deserialize("NOBLE-INTEGRALS 7\n"), Error);
  CHECK_THROWS_AS((void)IntegralTable::deserialize("garbage\n"), Error);
}

TEST_CASE("frozen tables never start a quadrature") {
  IntegralTable t(9);
  (void)t.I(1, 0, origin(9));
  t.set_frozen(true);
  CHECK(t.I(1, 2, origin(9)).finite());
  try {
    (void)t.I(1, 0, unit(9, 0, 3));
    FAIL("frozen table computed a new entry");
  } catch (const Error& e) {
    CHECK(e.kind() == "MissingEntry");
  }
}
