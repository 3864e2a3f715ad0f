#include <doctest.h>

#include <complex>
#include <random>

#include "noble/aggregation.hpp"
#include "noble/error.hpp"

using namespace noble;

namespace {

MatrixBoundSpec printed_matrix() {
  MatrixBoundSpec s;
  s.n = 3;
  const char* B[3][3] = {{"0.0134202", "0.0112907", "0.0257405"},
                         {"0.0127527", "0.0108018", "0.0338533"},
                         {"0.028009", "0.0260537", "0.0401418"}};
  s.B.assign(3, BoundVector(3));
  s.C.assign(3, BoundVector(3, Bound(0)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s.B[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Bound::parse(B[i][j]);
  s.v = {Bound(1), Bound(1), Bound(1)};
  s.w = {Bound(1), Bound(1), Bound(1)};
  s.h = {Bound(0), Bound(0), Bound(0)};
  return s;
}

MatrixBoundSpec random_spec(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> U(0, 1);
  MatrixBoundSpec s;
  s.n = n;
  s.B.assign(static_cast<std::size_t>(n), BoundVector(static_cast<std::size_t>(n)));
  s.C.assign(static_cast<std::size_t>(n), BoundVector(static_cast<std::size_t>(n)));
  for (auto& row : s.B)
    for (auto& b : row) b = Bound(U(rng) * 0.25);
  for (auto& row : s.C)
    for (auto& c : row) c = Bound(U(rng) * 0.1);
  for (int i = 0; i < n; ++i) {
    s.v.push_back(Bound(U(rng)));
    s.w.push_back(Bound(U(rng)));
    s.h.push_back(Bound(U(rng) * 0.1));
  }
  s.alpha = Bound(1);
  s.beta = Bound(2);
  return s;
}

}  // namespace

TEST_CASE("the printed 3x3 matrix") {
  MatrixBoundSpec s = printed_matrix();
  EigenSplit e = eigen_split(s);
  long double top = 0;
  for (auto l : e.lambda) top = std::max(top, std::abs(l));
  CHECK(top >= 0.072L);
  CHECK(top <= 0.074L);
  Bound sum(0);
  for (auto& row : s.B)
    for (auto& b : row) sum += b;
  CHECK(sum.lo_d() >= 0.19);
  CHECK(sum.hi_d() <= 0.21);
  CHECK(e.residual < 1e-12L);
  GeometricSum g = geometric_sum(s, Parity::all, false);
  CHECK(g.closed_form_inside);
  CHECK(g.value.hi_d() >= partial_sum(s, Parity::all, false, 30).lo_d());
}

TEST_CASE("trivial spectra") {
  MatrixBoundSpec z;
  z.n = 2;
  z.B.assign(2, BoundVector(2, Bound(0)));
  z.C = z.B;
  z.v = {Bound(0.3), Bound(0.4)};
  z.w = {Bound(2), Bound(1)};
  z.h = {Bound(0), Bound(0)};
  EigenSplit e = eigen_split(z);
  for (auto l : e.lambda) CHECK(std::abs(l) == 0.0L);
  CHECK(geometric_sum(z, Parity::all, false).value.overlaps(Bound(1.0)));

  MatrixBoundSpec g = z;
  g.B[0][0] = Bound(0.1);
  g.B[1][1] = Bound(0.2);
  e = eigen_split(g);
  std::vector<long double> ls;
  for (auto l : e.lambda) ls.push_back(l.real());
  std::sort(ls.begin(), ls.end());
  CHECK(static_cast<double>(ls[0]) == doctest::Approx(0.1));
  CHECK(static_cast<double>(ls[1]) == doctest::Approx(0.2));

  MatrixBoundSpec one;
  one.n = 1;
  one.B = {{Bound(0.5)}};
  one.C = {{Bound(0)}};
  one.v = {Bound(1)};
  one.w = {Bound(1)};
  one.h = {Bound(0)};
  CHECK(geometric_sum(one, Parity::all, false).value.overlaps(Bound(2)));
  CHECK(geometric_sum(one, Parity::even, false).value.overlaps(Bound(4) / Bound(3)));
  CHECK(geometric_sum(one, Parity::odd, false).value.overlaps(Bound(2) / Bound(3)));

  one.B = {{Bound(1.1)}};
  try {
    (void)eigen_split(one);
    FAIL("accepted spectral radius above one");
  } catch (const Error& e2) {
    CHECK(e2.kind() == "SpectralRadiusAtLeastOne");
  }
  MatrixBoundSpec jordan = z;
  jordan.B = {{Bound(0.1), Bound(1)}, {Bound(0), Bound(0.1)}};
  CHECK_THROWS_AS((void)eigen_split(jordan), Error);
}

TEST_CASE("closed forms against truncated sums on random contractions") {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 40; ++rep) {
    MatrixBoundSpec s = random_spec(rng, 2 + rep % 3);
    for (bool weighted : {false, true}) {
      GeometricSum all = geometric_sum(s, Parity::all, weighted);
      GeometricSum ev = geometric_sum(s, Parity::even, weighted);
      GeometricSum od = geometric_sum(s, Parity::odd, weighted);
      Bound p = partial_sum(s, Parity::all, weighted, 60);
      // lower oracle: every term is nonnegative
      CHECK(all.value.hi_d() >= p.lo_d());
      Bound pk = partial_sum(s, Parity::all, weighted, all.terms);
      CHECK(all.value.overlaps(pk + Bound(Bound(0), all.tail.upper() + Bound(1e-20))));
      CHECK((ev.value + od.value).overlaps(all.value));
      CHECK(all.closed_form_inside);
      EigenSplit e = eigen_split(s);
      CHECK(e.reconstruction < 1e-12L);
    }
  }
}

TEST_CASE("scalar series") {
  std::vector<Bound> q{Bound::parse("0.1"), Bound::parse("0.01"), Bound::parse("0.001")};
  TailDescriptor t;
  t.ratio = Bound::parse("0.1");
  CHECK(scalar_series_sum(q, Parity::all, t).contains(Bound::rational(1, 9)));
  CHECK(scalar_series_sum({}, Parity::all).contains(0.0));
  std::vector<Bound> a{Bound(1), Bound(2), Bound(4), Bound(8)};
  CHECK(scalar_series_sum(a, Parity::odd).contains(10.0));
  CHECK(scalar_series_sum(a, Parity::even).contains(5.0));
  t.ratio = Bound(1);
  try {
    (void)scalar_series_sum(q, Parity::all, t);
    FAIL("accepted ratio 1");
  } catch (const Error& e) {
    CHECK(e.kind() == "TailRatioNotContractive");
  }
}
