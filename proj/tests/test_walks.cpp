#include <doctest.h>

#include <filesystem>
#include <functional>
#include <set>

#include "noble/error.hpp"
#include "noble/walks.hpp"

using namespace noble;

namespace {

enum class Rule { any, no_reversal, no_bond_reuse, no_vertex_reuse };

// Plain depth-first enumeration over all (2d)^n step sequences.
long brute(int d, int n, const Coords& target, Rule rule) {
  Coords pos(static_cast<std::size_t>(d), 0);
  std::set<std::pair<Coords, Coords>> bonds;
  std::set<Coords> sites{pos};
  long count = 0;
  std::function<void(int, int)> go = [&](int left, int last) {
    if (left == 0) {
      if (pos == target) ++count;
      return;
    }
    for (int dir = 0; dir < 2 * d; ++dir) {
      if (rule == Rule::no_reversal && last >= 0 && (dir ^ 1) == last) continue;
      Coords next = pos;
      next[static_cast<std::size_t>(dir / 2)] += (dir % 2) ? -1 : 1;
      auto bond = std::minmax(pos, next);
      if (rule == Rule::no_bond_reuse && bonds.count(bond)) continue;
      if (rule == Rule::no_vertex_reuse && sites.count(next)) continue;
      Coords saved = pos;
      bonds.insert(bond);
      sites.insert(next);
      pos = next;
      go(left - 1, dir);
      pos = saved;
      bonds.erase(bond);
      sites.erase(next);
    }
  };
  go(n, -1);
  return count;
}

}  // namespace

TEST_CASE("six-step loops") {
  CHECK(count_srw(2, 6, origin(2)) == 400);
  CHECK(count_srw(3, 6, origin(3)) == 1860);
  CHECK(count_srw_loop_formula(1) == 20);
  CHECK(count_srw_loop_formula(2) == 400);
  CHECK(count_srw_loop_formula(3) == 1860);
  CHECK(brute(2, 6, origin(2), Rule::any) == 400);
  CHECK(brute(3, 6, origin(3), Rule::any) == 1860);
  for (int d = 4; d <= 12; ++d) CHECK(count_srw(d, 6, origin(d)) == count_srw_loop_formula(d));
}

TEST_CASE("small examples") {
  CHECK(count_srw(3, 0, origin(3)) == 1);
  CHECK(count_srw(2, 2, origin(2)) == 4);
  CHECK(count_nbw(5, 2, origin(5)) == 0);
  CHECK(count_nbw(2, 4, origin(2)) == 8);
  CHECK(count_nbw(3, 1, unit(3, 0)) == 1);
  CHECK(count_bond_sa(2, 1, unit(2, 0)) == 1);
  CHECK(count_bond_sa(2, 2, origin(2)) == 0);
  CHECK(count_bond_sa(2, 3, unit(2, 0)) <= count_srw(2, 3, unit(2, 0)));
}

TEST_CASE("recursions agree with enumeration for d <= 3, n <= 8") {
  for (int d = 2; d <= 3; ++d)
    for (int n = 0; n <= (d == 2 ? 8 : 6); ++n)
      for (const Coords& x : {origin(d), unit(d, 0), unit(d, 0, 2), parse_point("e1+e2", d)}) {
        CHECK(count_srw(d, n, x) == brute(d, n, x, Rule::any));
        CHECK(count_nbw(d, n, x) == brute(d, n, x, Rule::no_reversal));
        if (n <= 6) {
          CHECK(count_bond_sa(d, n, x) == brute(d, n, x, Rule::no_bond_reuse));
          CHECK(count_saw(d, n, x) == brute(d, n, x, Rule::no_vertex_reuse));
        }
      }
  CHECK(srw_counts_by_egf(parse_point("2e1+e2", 3), 7)[5] == count_srw(3, 5, parse_point("2e1+e2", 3)));
}

TEST_CASE("mass conservation and pointwise ordering") {
  for (int d = 2; d <= 4; ++d) {
    WalkCountTable p(d, WalkKind::srw), b(d, WalkKind::nbw);
    for (int n = 0; n <= 8; ++n) {
      mpz_class sp = 0, sb = 0;
      for (const Coords& x : p.support(n)) sp += p.count(n, x) * orbit_size(x);
      for (const Coords& x : b.support(n)) sb += b.count(n, x) * orbit_size(x);
      mpz_class full;
      mpz_ui_pow_ui(full.get_mpz_t(), static_cast<unsigned long>(2 * d), static_cast<unsigned long>(n));
      CHECK(sp == full);
      if (n >= 1) {
        mpz_class nb;
        mpz_ui_pow_ui(nb.get_mpz_t(), static_cast<unsigned long>(2 * d - 1), static_cast<unsigned long>(n - 1));
        CHECK(sb == 2 * d * nb);
      }
      for (const Coords& x : p.support(n)) CHECK(b.count(n, x) <= p.count(n, x));
      if (n % 2 == 1 || n == 2) CHECK(b.count(n, origin(d)) == 0);
    }
  }
  for (int n = 0; n <= 6; ++n)
    for (const Coords& x : {origin(3), unit(3, 0), parse_point("e1+e2", 3)}) {
      CHECK(count_bond_sa(3, n, x) <= count_srw(3, n, x));
      CHECK(count_saw(3, n, x) <= count_bond_sa(3, n, x));
    }
}

TEST_CASE("enumeration budget") {
  try {
    (void)count_bond_sa(3, 12, origin(3), 10);
    FAIL("no budget error");
  } catch (const Error& e) {
    CHECK(e.kind() == "EnumerationBudgetExceeded");
  }
}

TEST_CASE("walk tables round-trip bit-exactly") {
  WalkCountTable t(4, WalkKind::nbw);
  (void)t.count(9, unit(4, 0));
  std::string s = t.serialize();
  CHECK(s.rfind("NOBLE-WALKS", 0) == 0);
  WalkCountTable r = WalkCountTable::deserialize(s);
  CHECK(r == t);
  CHECK(r.serialize() == s);
  auto p = std::filesystem::temp_directory_path() / "noble-walks-test.tbl";
  t.save(p.string());
  CHECK(WalkCountTable::load(p.string()) == t);
  std::filesystem::remove(p);
  CHECK_THROWS_AS(WalkCountTable::deserialize("NOBLE-WALKS 99\n"), Error);
}
