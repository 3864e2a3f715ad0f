#include "noble/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "noble/error.hpp"

namespace noble {

namespace {

constexpr int kDigits = 20;

Bound raw_gamma3_base(IntegralTable& t, const BootstrapConfig& cfg) {
  Bound best;
  bool first = true;
  for (const auto& e : cfg.S) {
    Bound v = t.sup("J", e.n, e.l, e.S).value / e.c;
    best = first ? v : max(best, v);
    first = false;
  }
  return best;
}

EvalContext hooks_for(IntegralTable& t, WalkCountTable& walks) {
  EvalContext ctx;
  ctx.integral = [&t](const std::string& name, int n, int l, const Coords& x) {
    return t.get(name == "Tstar" ? "T*" : name, n, l, x);
  };
  ctx.walk = [&walks](int n, const Coords& x) { return Bound::from_mpz(walks.count(n, x)); };
  return ctx;
}

std::string label(const std::string& name, int n, int l, const std::string& where) {
  if (name == "L") return "L(" + std::to_string(n) + "," + where + ")";
  if (name == "V") return "V(" + std::to_string(n) + "," + std::to_string(l) + ")";
  return name + "(" + std::to_string(n) + "," + std::to_string(l) + "," + where + ")";
}

void collect_integrals(IntegralTable& t, VerificationReport& r) {
  std::set<IntegralTable::Key> keys = t.used();
  for (const auto& k : keys) {
    const auto& [name, n, l, x] = k;
    IntegralRecord rec{name, n, l, point_name(x), {}, {}};
    auto it = t.entries().find(k);
    if (it != t.entries().end()) {
      rec.value = it->second.value;
      rec.provenance = it->second.provenance;
    } else {
      rec.value = t.get(name, n, l, x);
      rec.provenance = "computed";
    }
    r.integrals.push_back(rec);
  }
  for (const auto& [k, s] : t.used_sups()) {
    const auto& [name, n, l, set] = k;
    r.integrals.push_back({"sup " + name, n, l, set, s.value, s.provenance + " at " + point_name(s.argmax)});
  }
}

}  // namespace

VerificationReport run_verification(const LoadedConfig& lc, const std::string& ledger_text, IntegralTable& t,
                                    WalkCountTable& walks, const VerifyOptions& opts) {
  auto start = std::chrono::steady_clock::now();
  if (t.dim() != lc.cfg.d)
    fail("ConfigError", "integral table has d = " + std::to_string(t.dim()) + ", config has d = " + std::to_string(lc.cfg.d));
  if (walks.dim() != lc.cfg.d)
    fail("ConfigError", "walk table has d = " + std::to_string(walks.dim()) + ", config has d = " + std::to_string(lc.cfg.d));
  t.clear_used();
  t.set_sup_depth(lc.sup_depth);
  t.set_allow_j_fallback(lc.j_fallback);

  VerificationReport r;
  r.cfg = lc.cfg;
  r.gamma3_auto = lc.gamma3_auto;
  r.sup_depth = lc.sup_depth;
  r.j_fallback = lc.j_fallback;
  BootstrapConfig& cfg = r.cfg;
  if (lc.gamma3_auto) {
    r.gamma3_base = raw_gamma3_base(t, cfg);
    cfg.Gamma3 = max(Bound(1), (Bound(*lc.gamma3_auto) * r.gamma3_base).upper()).upper();
  }

  LoadedLedger ll = load_ledger(ledger_text, cfg, hooks_for(t, walks));
  const BetaLedger& L = ll.ledger;
  r.missing_policy = ll.missing_policy;
  r.defaulted = ll.defaulted;
  r.mu = L.mu;
  r.mubar = L.mubar;
  r.beta_mu = L.beta_mu;
  cfg.f1_initial = L.f1_initial;
  cfg.validate();

  r.rb = rewrite_bounds(L, true);
  r.gates.push_back({"1 - (2d-1) mubar beta_Xi^iota/(1-mu)", Bound(1) - r.rb.contraction});
  r.gates.push_back({"1 - 2d mubar beta_Xi^iota/(1-mu)", Bound(1) - r.rb.geometric_factor});
  r.gates.push_back({"c_Phi.lo - |alpha_Phi| - beta_R,Phi", r.rb.gate_Phi()});
  r.gates.push_back({"alpha_F.lo - lower beta_DeltaR,F", r.rb.gate_F()});
  r.gates.push_back({"1 - (2d/(2d-1)) beta_Psi", Bound(1) - Bound::rational(2 * cfg.d, 2 * cfg.d - 1) * r.rb.beta_Psi});

  r.f3_init = f3_initial(t, cfg);
  r.initial[0] = cfg.f1_initial;
  r.initial[1] = Bound(1);
  r.initial[2] = r.f3_init.value;
  r.improved[0] = improve_f1(r.rb, cfg);
  r.improved[1] = improve_f2(r.rb, cfg);
  r.f3_impr = f3_improve(t, r.rb, cfg);
  r.improved[2] = r.f3_impr.value;
  r.A = a_of_d(r.rb);
  r.verdict = decide_P(r.initial, r.improved, cfg);

  for (const auto& k : r.defaulted) r.diagnostics.push_back("defaulted to 0: " + k);
  for (const auto& s : r.f3_impr.diagnostics) r.diagnostics.push_back(s);
  for (const auto& term : r.f3_impr.terms)
    if (term.sum_of_sups) r.diagnostics.push_back(term.name + ": infinite set, per-term suprema summed");
  collect_integrals(t, r);
  if (opts.timing)
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---------------------------------------------------------------- rendering

std::string render_text(const VerificationReport& r) {
  std::ostringstream os;
  auto b = [](const Bound& x) { return x.str(kDigits); };
  const BootstrapConfig& c = r.cfg;
  os << kReportMagic << "\n\n[config]\n";
  os << "d = " << c.d << "\n";
  os << "Gamma1 = " << b(c.Gamma1) << "\n";
  os << "Gamma2 = " << b(c.Gamma2) << "\n";
  os << "Gamma3 = " << b(c.Gamma3);
  if (r.gamma3_auto) os << "  (auto " << r.gamma3_auto.value() << " x " << b(r.gamma3_base) << ")";
  os << "\n";
  os << "cmu = " << b(c.cmu) << "\n";
  os << "safety = " << c.safety << "\n";
  os << "sup_depth = " << r.sup_depth << "\n";
  os << "j_fallback = " << (r.j_fallback ? "true" : "false") << "\n";
  for (const auto& s : c.S)
    os << "S." << s.name << " = " << s.n << ", " << s.l << ", " << s.S.str() << ", " << b(s.c) << "\n";

  os << "\n[ledger]\n";
  os << "missing = " << r.missing_policy << "\n";
  os << "mu = " << b(r.mu) << "\n";
  os << "mubar = " << b(r.mubar) << "\n";
  os << "beta_mu = " << b(r.beta_mu) << "\n";
  os << "f1_zI = " << b(c.f1_initial) << "\n";

  const RewriteBounds& rb = r.rb;
  os << "\n[rewrite]\n";
  os << "c_Phi = " << b(rb.c_phi) << "\n";
  os << "alpha_F = " << b(rb.alpha_F) << "\n";
  os << "abs_alpha_Phi = " << b(rb.abs_alpha_phi) << "\n";
  os << "beta_R,F = " << b(rb.beta_RF) << "\n";
  os << "beta_R,Phi = " << b(rb.beta_RPhi) << "\n";
  os << "beta_DeltaR,F = " << b(rb.beta_DRF) << "\n";
  os << "beta_DeltaR,Phi = " << b(rb.beta_DRPhi) << "\n";
  os << "lower beta_DeltaR,F = " << b(rb.beta_DRF_lower) << "\n";
  os << "beta_Pi = " << b(rb.beta_Pi) << "\n";
  os << "beta_Psi = " << b(rb.beta_Psi) << "\n";

  os << "\n[gates]\n";
  for (const auto& g : r.gates) os << g.name << " = " << b(g.value) << (g.value.certainly_positive() ? "  ok" : "  FAIL") << "\n";

  os << "\n[candidates]\n";
  for (int i = 0; i < 3; ++i) {
    os << "f" << i + 1 << ".initial = " << b(r.initial[i]) << "\n";
    os << "f" << i + 1 << ".improved = " << b(r.improved[i]) << "\n";
  }
  os << "A(d) = " << b(r.A) << "\n";

  os << "\n[f3]\n";
  for (std::size_t i = 0; i < r.f3_impr.terms.size(); ++i) {
    const F3Term& t = r.f3_impr.terms[i];
    const F3Term& t0 = r.f3_init.terms[i];
    std::string p = t.name + " (n=" + std::to_string(t.n) + ", l=" + std::to_string(t.l) + ", " + t.set + ")";
    os << p << ".initial = " << b(t0.scaled) << "\n";
    for (int h = 0; h < 5; ++h) os << p << ".H" << h + 1 << " = " << b(t.H[h]) << "\n";
    os << p << ".scaled = " << b(t.scaled);
    if (!t.sum_of_sups) os << "  at " << point_name(t.argmax);
    os << "\n";
  }

  const Verdict& v = r.verdict;
  os << "\n[verdict]\n";
  os << "holds = " << (v.holds ? "true" : "false") << "\n";
  for (int i = 0; i < 3; ++i) {
    os << "f" << i + 1 << ".computed = " << b(v.computed[i]) << "\n";
    os << "f" << i + 1 << ".gamma = " << b(v.gamma[i]) << "\n";
    os << "f" << i + 1 << ".margin = " << b(v.margin[i]) << "\n";
  }
  for (const auto& f : v.failing) os << "failing = " << f << "\n";

  os << "\n[integrals]\n";
  for (const auto& i : r.integrals)
    os << label(i.name, i.n, i.l, i.where) << " = " << b(i.value) << "  via " << i.provenance << "\n";

  os << "\n[diagnostics]\n";
  for (const auto& d : r.diagnostics) os << d << "\n";
  if (r.seconds) os << "\n[timing]\nseconds = " << *r.seconds << "\n";
  return os.str();
}

std::string render_json(const VerificationReport& r) {
  using nlohmann::ordered_json;
  auto b = [](const Bound& x) {
    ordered_json j;
    j["lo"] = x.lower().str(kDigits);
    j["hi"] = x.upper().str(kDigits);
    j["lo_hex"] = x.hex_lo();
    j["hi_hex"] = x.hex_hi();
    return j;
  };
  ordered_json j;
  j["format"] = kReportMagic;
  const BootstrapConfig& c = r.cfg;
  ordered_json cfg;
  cfg["d"] = c.d;
  cfg["Gamma1"] = b(c.Gamma1);
  cfg["Gamma2"] = b(c.Gamma2);
  cfg["Gamma3"] = b(c.Gamma3);
  if (r.gamma3_auto) {
    cfg["Gamma3_auto_factor"] = *r.gamma3_auto;
    cfg["Gamma3_auto_base"] = b(r.gamma3_base);
  }
  cfg["cmu"] = b(c.cmu);
  cfg["safety"] = c.safety;
  cfg["sup_depth"] = r.sup_depth;
  cfg["j_fallback"] = r.j_fallback;
  ordered_json S = ordered_json::array();
  for (const auto& s : c.S) S.push_back({{"name", s.name}, {"n", s.n}, {"l", s.l}, {"set", s.S.str()}, {"c", b(s.c)}});
  cfg["S"] = S;
  j["config"] = cfg;

  j["ledger"] = {{"missing", r.missing_policy}, {"defaulted", r.defaulted}, {"mu", b(r.mu)},
                 {"mubar", b(r.mubar)},         {"beta_mu", b(r.beta_mu)},  {"f1_zI", b(c.f1_initial)}};
  const RewriteBounds& rb = r.rb;
  j["rewrite"] = {{"c_Phi", b(rb.c_phi)},
                  {"alpha_F", b(rb.alpha_F)},
                  {"abs_alpha_Phi", b(rb.abs_alpha_phi)},
                  {"beta_R_F", b(rb.beta_RF)},
                  {"beta_R_Phi", b(rb.beta_RPhi)},
                  {"beta_DeltaR_F", b(rb.beta_DRF)},
                  {"beta_DeltaR_Phi", b(rb.beta_DRPhi)},
                  {"beta_DeltaR_F_lower", b(rb.beta_DRF_lower)},
                  {"beta_Pi", b(rb.beta_Pi)},
                  {"beta_Psi", b(rb.beta_Psi)}};
  ordered_json gates = ordered_json::array();
  for (const auto& g : r.gates) gates.push_back({{"name", g.name}, {"value", b(g.value)}, {"ok", g.value.certainly_positive()}});
  j["gates"] = gates;

  ordered_json cand = ordered_json::array();
  for (int i = 0; i < 3; ++i) cand.push_back({{"initial", b(r.initial[i])}, {"improved", b(r.improved[i])}});
  j["candidates"] = cand;
  j["A"] = b(r.A);

  ordered_json terms = ordered_json::array();
  for (std::size_t i = 0; i < r.f3_impr.terms.size(); ++i) {
    const F3Term& t = r.f3_impr.terms[i];
    ordered_json H = ordered_json::array();
    for (int h = 0; h < 5; ++h) H.push_back(b(t.H[h]));
    ordered_json tj = {{"name", t.name}, {"n", t.n}, {"l", t.l}, {"set", t.set},
                       {"initial", b(r.f3_init.terms[i].scaled)}, {"H", H}, {"scaled", b(t.scaled)},
                       {"sum_of_sups", t.sum_of_sups}};
    if (!t.sum_of_sups) tj["argmax"] = point_name(t.argmax);
    terms.push_back(tj);
  }
  j["f3_terms"] = terms;

  const Verdict& v = r.verdict;
  ordered_json vj;
  vj["holds"] = v.holds;
  ordered_json per = ordered_json::array();
  for (int i = 0; i < 3; ++i) per.push_back({{"computed", b(v.computed[i])}, {"gamma", b(v.gamma[i])}, {"margin", b(v.margin[i])}});
  vj["functions"] = per;
  vj["failing"] = v.failing;
  j["verdict"] = vj;

  ordered_json ints = ordered_json::array();
  for (const auto& i : r.integrals)
    ints.push_back({{"name", i.name}, {"n", i.n}, {"l", i.l}, {"where", i.where}, {"value", b(i.value)},
                    {"provenance", i.provenance}});
  j["integrals"] = ints;
  j["diagnostics"] = r.diagnostics;
  if (r.seconds) j["seconds"] = *r.seconds;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------- search

namespace {

double slack_score(const VerificationReport& r) {
  double s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) s = std::min(s, 1.0 - r.verdict.margin[i].hi_d());
  return s;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

SearchResult search_config(const LoadedConfig& lc, const std::string& ledger_text, IntegralTable& t,
                           WalkCountTable& walks, const SearchOptions& opts) {
  SearchResult res;
  const double neg_inf = -std::numeric_limits<double>::infinity();

  LoadedConfig base = lc;
  if (base.gamma3_auto) {
    base.cfg.Gamma3 = max(Bound(1), (Bound(*base.gamma3_auto) * raw_gamma3_base(t, base.cfg)).upper()).upper();
    base.gamma3_auto.reset();
  }

  // Coordinates in log scale: Gamma1..3, cmu - 1, then the weights.
  std::size_t nc = 4 + base.cfg.S.size();
  std::vector<double> x(nc);
  x[0] = std::log(base.cfg.Gamma1.mid_d());
  x[1] = std::log(base.cfg.Gamma2.mid_d());
  x[2] = std::log(base.cfg.Gamma3.mid_d());
  x[3] = std::log(base.cfg.cmu.mid_d() - 1);
  for (std::size_t i = 0; i < base.cfg.S.size(); ++i) x[4 + i] = std::log(base.cfg.S[i].c.mid_d());

  auto make = [&](const std::vector<double>& p) {
    LoadedConfig c = base;
    c.cfg.Gamma1 = Bound(std::max(1.0, std::exp(p[0])));
    c.cfg.Gamma2 = Bound(std::max(1.0, std::exp(p[1])));
    c.cfg.Gamma3 = Bound(std::max(1.0, std::exp(p[2])));
    c.cfg.cmu = Bound(1) + Bound(std::exp(p[3]));
    for (std::size_t i = 0; i < c.cfg.S.size(); ++i) c.cfg.S[i].c = Bound(std::exp(p[4 + i]));
    return c;
  };
  // The printed config is re-parsed before scoring so the reported point is the one that was checked.
  auto score = [&](const std::vector<double>& p, bool& holds, BootstrapConfig& cfg, std::string& text) {
    ++res.evaluations;
    LoadedConfig c = make(p);
    text = render_config(c, c.cfg);
    try {
      LoadedConfig parsed = parse_config(text);
      VerificationReport r = run_verification(parsed, ledger_text, t, walks);
      holds = r.verdict.holds;
      cfg = r.cfg;
      return slack_score(r);
    } catch (const Error&) {
      holds = false;
      cfg = c.cfg;
      return neg_inf;
    }
  };

  std::mt19937_64 rng(opts.seed);
  bool holds = false;
  BootstrapConfig cfg;
  std::string text;
  double best = score(x, holds, cfg, text);
  res.best = cfg;
  res.feasible = holds;
  res.config_text = text;
  res.log.push_back("start score " + fmt(best));

  double step = opts.initial_step;
  std::vector<std::size_t> order(nc);
  for (std::size_t i = 0; i < nc; ++i) order[i] = i;
  for (int round = 0; round < opts.rounds && step >= opts.min_step; ++round) {
    std::shuffle(order.begin(), order.end(), rng);
    bool improved = false;
    for (std::size_t i : order) {
      for (double dir : {1.0, -1.0}) {
        std::vector<double> y = x;
        y[i] += dir * step;
        bool h = false;
        BootstrapConfig cy;
        std::string ty;
        double s = score(y, h, cy, ty);
        // Feasible points always beat infeasible ones.
        bool better = (h && !res.feasible) || ((h == res.feasible) && s > best);
        if (better) {
          x = y;
          best = s;
          res.best = cy;
          res.feasible = h;
          res.config_text = ty;
          improved = true;
          break;
        }
      }
    }
    res.log.push_back("round " + std::to_string(round) + " step " + fmt(step) + " score " + fmt(best) +
                      (res.feasible ? " feasible" : ""));
    if (!improved) step /= 2;
  }
  res.score = best;
  return res;
}

}  // namespace noble
