#include <doctest.h>

#include <algorithm>
#include <random>

#include "noble/error.hpp"
#include "noble/expr.hpp"
#include "noble/ledger.hpp"

using namespace noble;

namespace {

const std::string kFixtures = NOBLE_FIXTURES;
const char* kMagic = "NOBLE-LEDGER 1";

std::string error_kind(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

EvalContext ctx11() {
  EvalContext c;
  c.d = 11;
  c.builtins["d"] = Bound(11);
  c.integral = [](const std::string& name, int n, int l, const Coords& x) {
    return Bound(static_cast<long>(name.size() * 100 + n * 10 + l + l1_norm(x)));
  };
  c.walk = [](int n, const Coords&) { return Bound(n * 7); };
  return c;
}

// Integrals resolve to fixed numbers; enough for parsing and the rewrite steps.
EvalContext stub_hooks() {
  EvalContext c;
  c.integral = [](const std::string&, int n, int l, const Coords&) {
    return Bound(0.01) / Bound(static_cast<long>(1 + n + l));
  };
  c.walk = [](int n, const Coords&) { return Bound(static_cast<long>(n * n)); };
  return c;
}

}  // namespace

TEST_CASE("expressions") {
  Document doc = parse_document(std::string(kMagic) + "\n[s]\nbeta_xi[0] = 0.01 / d\n", kMagic);
  Evaluator ev(doc, ctx11());
  CHECK(ev.value("beta_xi[0]").contains(Bound::rational(1, 1100)));
  Document doc2 = parse_document(std::string(kMagic) +
                                     "\n[s]\nbubble = 2*d*0.05^2 * I(2,2,origin)\nw = a(4, e1) + sqrt(4) - 2^3\n"
                                     "m = max(1, min(3, 2)) + abs(-1)\n",
                                 kMagic);
  Evaluator ev2(doc2, ctx11());
  CHECK(ev2.value("bubble").overlaps(Bound(22) * Bound::parse("0.0025") * Bound(122)));
  CHECK(ev2.value("w").overlaps(Bound(22)));
  CHECK(ev2.value("m").overlaps(Bound(3)));
  CHECK(ev2.integral_lookups() == 1);
}

TEST_CASE("parse and evaluation errors") {
  auto doc = [](const std::string& body) { return parse_document(std::string(kMagic) + "\n" + body, kMagic); };
  CHECK(error_kind([&] {
          Document d = doc("[s]\nx = y\ny = x\n");
          Evaluator(d, ctx11()).value("x");
        }) == "CycleDetected");
  CHECK(error_kind([&] {
          Document d = doc("[s]\nx = zeta + 1\n");
          Evaluator(d, ctx11()).value("x");
        }) == "UnknownSymbol");
  CHECK(error_kind([&] { doc("[s]\nx = 1 +\n"); }) == "SyntaxError");
  CHECK(error_kind([&] { doc("[s]\nx = (1\n"); }) == "SyntaxError");
  CHECK(error_kind([&] { doc("[s]\nx = 1\nx = 2\n"); }) == "DuplicateKey");
  CHECK(error_kind([] { parse_document("hello\n", kMagic); }) == "BadHeader");
  CHECK(error_kind([] { parse_document("NOBLE-LEDGER 9\n", kMagic); }) == "UnsupportedVersion");
  try {
    doc("[s]\nok = 1\nx = 2 * * 3\n");
    FAIL("accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK(error_kind([&] {
          Document d = doc("[s]\nx = 1 / (1 - 1)\n");
          Evaluator(d, ctx11()).value("x");
        }) == "DomainError");
}

TEST_CASE("evaluation order does not matter") {
  std::vector<std::string> lines{"a = b + c", "b = 2 * c", "c = d / 3", "e = a * b - c", "f = e^2 + a"};
  std::mt19937_64 rng(1);
  std::map<std::string, Bound> first;
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(lines.begin(), lines.end(), rng);
    std::string text = std::string(kMagic) + "\n[s]\n";
    for (auto& l : lines) text += l + "\n";
    Document doc = parse_document(text, kMagic);
    auto vals = Evaluator(doc, ctx11()).evaluate_all();
    if (rep == 0) first = vals;
    for (auto& [k, v] : vals) {
      CHECK(v.lo_d() == first[k].lo_d());
      CHECK(v.hi_d() == first[k].hi_d());
    }
  }
}

TEST_CASE("config files") {
  LoadedConfig lc = parse_config(read_file(kFixtures + "/null.cfg"));
  CHECK(lc.cfg.d == 11);
  CHECK(lc.cfg.S.size() == 6);
  REQUIRE(lc.gamma3_auto);
  CHECK(*lc.gamma3_auto == doctest::Approx(1.5));
  CHECK(lc.cfg.Gamma1.overlaps(Bound::parse("1.01") * Bound::parse("1.002")));
  CHECK(lc.cfg.S[0].S.str() == PointSetSpec::parse("X", 11).str());
  LoadedConfig again = parse_config(render_config(lc, lc.cfg));
  CHECK(again.cfg.S.size() == lc.cfg.S.size());
  CHECK(again.cfg.Gamma1.overlaps(lc.cfg.Gamma1));
  CHECK(again.cfg.Gamma2.overlaps(lc.cfg.Gamma2));
  CHECK(*again.gamma3_auto == doctest::Approx(1.5));
  CHECK(error_kind([] { parse_config("NOBLE-CONFIG 1\n[bootstrap]\nd = 11\n"); }) == "MissingEntry");
  CHECK(error_kind([] { parse_config("NOBLE-CONFIG 1\n[weird]\nd = 11\n"); }) == "UnknownKey");
}

TEST_CASE("ledgers") {
  LoadedConfig lc = parse_config(read_file(kFixtures + "/demo.cfg"));
  LoadedLedger L = load_ledger(read_file(kFixtures + "/demo.ledger"), lc.cfg, stub_hooks());
  CHECK(L.ledger.d == 11);
  REQUIRE(L.ledger.xi_iota.matrix);
  CHECK(L.ledger.xi_iota.matrix->n == 3);
  CHECK(L.ledger.xi.terms.size() == 4);
  CHECK(L.ledger.xi.tail);
  CHECK(L.defaulted.empty());
  CHECK(L.integral_lookups > 0);
  CHECK(L.ledger.xi_iota.sum(Parity::all).certainly_positive());

  LoadedConfig nc = parse_config(read_file(kFixtures + "/null.cfg"));
  LoadedLedger N = load_ledger(read_file(kFixtures + "/null.ledger"), nc.cfg, stub_hooks());
  CHECK(N.missing_policy == "zero");
  CHECK(!N.defaulted.empty());
  CHECK(N.ledger.mu.overlaps(Bound::rational(1, 21)));

  std::string strict = "NOBLE-LEDGER 1\n[metadata]\nmissing = error\n[mu]\nmu = 0.04\nmubar = 0.04\n[initial]\nf1_zI = 1\n";
  CHECK(error_kind([&] { load_ledger(strict, nc.cfg, stub_hooks()); }) == "MissingEntry");
  std::string typo = "NOBLE-LEDGER 1\n[metadata]\nmissing = zero\n[mu]\nmu = 0.04\nmubar = 0.04\nmoo = 1\n";
  CHECK(error_kind([&] { load_ledger(typo, nc.cfg, stub_hooks()); }) == "UnknownKey");
}
