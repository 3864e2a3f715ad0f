#include "noble/ledger.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "noble/error.hpp"

namespace noble {

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail("IOError", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

int to_int(const Bound& b, const std::string& what) {
  double x = b.mid_d();
  if (!b.is_point() || std::round(x) != x) fail("ConfigError", what + " must be an integer");
  return static_cast<int>(x);
}

bool parse_bool(const std::string& s, const std::string& what) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  fail("ConfigError", what + " must be true or false, got '" + s + "'");
}

using Field = std::function<Bound&(BetaLedger&)>;

const std::vector<std::pair<std::string, Field>>& split_fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"xi_alpha0_10", [](BetaLedger& L) -> Bound& { return L.xi_alpha0_10; }},
      {"xi_alpha0_01", [](BetaLedger& L) -> Bound& { return L.xi_alpha0_01; }},
      {"xi_alphae1_10", [](BetaLedger& L) -> Bound& { return L.xi_alphae1_10; }},
      {"xi_alphae1_01", [](BetaLedger& L) -> Bound& { return L.xi_alphae1_01; }},
      {"xi_iota_alpha_I", [](BetaLedger& L) -> Bound& { return L.xi_iota_alpha_I; }},
      {"xi_iota_alpha_II", [](BetaLedger& L) -> Bound& { return L.xi_iota_alpha_II; }},
      {"sum_xi_iota_alpha_I", [](BetaLedger& L) -> Bound& { return L.sum_xi_iota_alpha_I; }},
      {"sum_xi_iota_alpha_II", [](BetaLedger& L) -> Bound& { return L.sum_xi_iota_alpha_II; }},
      {"sum_psi_alpha_I_01", [](BetaLedger& L) -> Bound& { return L.sum_psi_alpha_I_01; }},
      {"sum_psi_alpha_I_10", [](BetaLedger& L) -> Bound& { return L.sum_psi_alpha_I_10; }},
      {"sum_psi_alpha_II_01", [](BetaLedger& L) -> Bound& { return L.sum_psi_alpha_II_01; }},
      {"sum_psi_alpha_II_10", [](BetaLedger& L) -> Bound& { return L.sum_psi_alpha_II_10; }},
      {"sum_pi_alpha_lower", [](BetaLedger& L) -> Bound& { return L.sum_pi_alpha_lower; }},
      {"sum_pi_alpha_upper", [](BetaLedger& L) -> Bound& { return L.sum_pi_alpha_upper; }},
      {"psi0_lower", [](BetaLedger& L) -> Bound& { return L.psi0_lower; }},
      {"sum_pi1_lower", [](BetaLedger& L) -> Bound& { return L.sum_pi1_lower; }},
  };
  return f;
}

const std::vector<std::pair<std::string, Field>>& remainder_fields() {
  static const std::vector<std::pair<std::string, Field>> f = {
      {"xi_R[0]", [](BetaLedger& L) -> Bound& { return L.xi_R[0]; }},
      {"xi_R[1]", [](BetaLedger& L) -> Bound& { return L.xi_R[1]; }},
      {"dxi_R[0]", [](BetaLedger& L) -> Bound& { return L.dxi_R[0]; }},
      {"dxi_R[1]", [](BetaLedger& L) -> Bound& { return L.dxi_R[1]; }},
      {"psi_R_I[0]", [](BetaLedger& L) -> Bound& { return L.psi_R_I[0]; }},
      {"psi_R_I[1]", [](BetaLedger& L) -> Bound& { return L.psi_R_I[1]; }},
      {"dpsi_R_I[0]", [](BetaLedger& L) -> Bound& { return L.dpsi_R_I[0]; }},
      {"dpsi_R_I[1]", [](BetaLedger& L) -> Bound& { return L.dpsi_R_I[1]; }},
      {"psi_R_II[0]", [](BetaLedger& L) -> Bound& { return L.psi_R_II[0]; }},
      {"psi_R_II[1]", [](BetaLedger& L) -> Bound& { return L.psi_R_II[1]; }},
      {"dpsi_R_II[0]", [](BetaLedger& L) -> Bound& { return L.dpsi_R_II[0]; }},
      {"dpsi_R_II[1]", [](BetaLedger& L) -> Bound& { return L.dpsi_R_II[1]; }},
      {"xi_iota_R_I", [](BetaLedger& L) -> Bound& { return L.xi_iota_R_I; }},
      {"xi_iota_R_II", [](BetaLedger& L) -> Bound& { return L.xi_iota_R_II; }},
      {"dxi_iota_R_I", [](BetaLedger& L) -> Bound& { return L.dxi_iota_R_I; }},
      {"dxi_iota_R_II", [](BetaLedger& L) -> Bound& { return L.dxi_iota_R_II; }},
      {"pi_R", [](BetaLedger& L) -> Bound& { return L.pi_R; }},
      {"dpi_R", [](BetaLedger& L) -> Bound& { return L.dpi_R; }},
  };
  return f;
}

BetaSequence& sequence_field(BetaLedger& L, const std::string& name) {
  if (name == "xi") return L.xi;
  if (name == "xi_iota") return L.xi_iota;
  if (name == "dxi") return L.dxi;
  if (name == "dxi_iota_0") return L.dxi_iota_0;
  if (name == "dxi_iota_iota") return L.dxi_iota_iota;
  fail("UnknownKey", "no sequence named '" + name + "'");
}

bool is_sequence(const std::string& s) {
  for (const auto& n : ledger_sequence_names())
    if (n == s) return true;
  return false;
}

// "name[3]" -> ("name", 3); "name" -> ("name", -1)
std::pair<std::string, int> split_index(const std::string& key) {
  auto b = key.find('[');
  if (b == std::string::npos) return {key, -1};
  if (key.back() != ']' || key.find('[', b + 1) != std::string::npos)
    fail("UnknownKey", "'" + key + "' is not NAME or NAME[N]");
  return {key.substr(0, b), std::stoi(key.substr(b + 1, key.size() - b - 2))};
}

bool known_in_section(const std::string& section, const std::string& key) {
  if (section == "definitions" || section == "metadata") return true;
  if (section == "mu") return key == "mu" || key == "mubar" || key == "beta_mu" || key == "beta_mu_lower";
  if (section == "initial") return key == "f1_zI";
  if (section == "splits") {
    for (const auto& [n, f] : split_fields())
      if (n == key) return true;
    return false;
  }
  if (section == "remainders") {
    for (const auto& [n, f] : remainder_fields())
      if (n == key) return true;
    return false;
  }
  if (section == "sequences") {
    auto dot = key.find('.');
    if (dot != std::string::npos) {
      std::string attr = key.substr(dot + 1);
      return is_sequence(key.substr(0, dot)) && (attr == "tail_ratio" || attr == "tail_start" || attr == "tail_anchor");
    }
    auto [name, idx] = split_index(key);
    return is_sequence(name) && idx >= 0;
  }
  if (section.rfind("matrix ", 0) == 0) {
    std::string k = key.substr(key.find('.') + 1);
    if (k == "n" || k == "alpha" || k == "beta" || k == "weighted") return true;
    char c = k.empty() ? 0 : k[0];
    return (c == 'B' || c == 'C' || c == 'v' || c == 'w' || c == 'h') && k.size() > 1 && k[1] == '[';
  }
  return false;
}

MatrixBoundSpec load_matrix(const std::string& name, Evaluator& ev, const Document& doc, bool& weighted) {
  MatrixBoundSpec m;
  std::string p = name + ".";
  if (!doc.find(p + "n")) fail("MissingEntry", "matrix " + name + " needs n");
  m.n = to_int(ev.value(p + "n"), "matrix " + name + " n");
  if (m.n < 1 || m.n > 64) fail("ConfigError", "matrix " + name + " order out of range");
  auto get = [&](const std::string& k) { return doc.find(p + k) ? ev.value(p + k) : Bound(0); };
  auto idx = [](int i) { return "[" + std::to_string(i) + "]"; };
  m.B.assign(static_cast<std::size_t>(m.n), std::vector<Bound>(static_cast<std::size_t>(m.n)));
  m.C = m.B;
  m.v.assign(static_cast<std::size_t>(m.n), Bound(0));
  m.w = m.v;
  m.h = m.v;
  for (int i = 0; i < m.n; ++i) {
    for (int j = 0; j < m.n; ++j) {
      m.B[i][j] = get("B" + idx(i) + idx(j));
      m.C[i][j] = get("C" + idx(i) + idx(j));
    }
    m.v[i] = get("v" + idx(i));
    m.w[i] = get("w" + idx(i));
    m.h[i] = get("h" + idx(i));
  }
  // reject entries outside the declared order
  for (const auto* e : doc.in_section("matrix " + name)) {
    std::string k = e->key.substr(p.size());
    auto b = k.find('[');
    if (b == std::string::npos) continue;
    std::string rest = k.substr(b);
    int a = -1, c = -1;
    if (std::sscanf(rest.c_str(), "[%d][%d]", &a, &c) == 2) {
      if (a < 0 || c < 0 || a >= m.n || c >= m.n) fail("ConfigError", "matrix entry " + e->key + " outside order n");
    } else if (std::sscanf(rest.c_str(), "[%d]", &a) == 1) {
      if (a < 0 || a >= m.n) fail("ConfigError", "vector entry " + e->key + " outside order n");
    }
  }
  if (doc.find(p + "alpha")) m.alpha = ev.value(p + "alpha");
  if (doc.find(p + "beta")) m.beta = ev.value(p + "beta");
  weighted = doc.find(p + "weighted") ? to_int(ev.value(p + "weighted"), "weighted") != 0 : false;
  m.validate();
  return m;
}

}  // namespace

const std::vector<std::string>& ledger_sequence_names() {
  static const std::vector<std::string> n = {"xi", "xi_iota", "dxi", "dxi_iota_0", "dxi_iota_iota"};
  return n;
}

const std::vector<std::string>& ledger_scalar_keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> v = {"mu", "mubar", "beta_mu", "beta_mu_lower", "f1_zI"};
    for (const auto& [n, f] : split_fields()) v.push_back(n);
    for (const auto& [n, f] : remainder_fields()) v.push_back(n);
    return v;
  }();
  return k;
}

Document parse_ledger(const std::string& text) {
  return parse_document(text, kLedgerMagic, [](const std::string& s, const std::string&) { return s == "metadata"; });
}

LoadedLedger load_ledger(const std::string& text, const BootstrapConfig& cfg, EvalContext hooks) {
  Document doc = parse_ledger(text);
  static const std::set<std::string> sections = {"metadata", "mu", "initial", "sequences", "splits", "remainders",
                                                 "definitions"};
  std::set<std::string> matrices;
  for (const auto& s : doc.sections) {
    if (s.rfind("matrix ", 0) == 0) {
      std::string name = trim(s.substr(7));
      if (!is_sequence(name)) fail("UnknownKey", "matrix section for unknown sequence '" + name + "'");
      matrices.insert(name);
    } else if (!sections.count(s)) {
      fail("UnknownKey", "unknown ledger section [" + s + "]");
    }
  }
  for (const auto& e : doc.entries) {
    if (e.section.empty()) fail("UnknownKey", "entry '" + e.key + "' (line " + std::to_string(e.line) + ") outside a section");
    if (!known_in_section(e.section, e.key))
      fail("UnknownKey", "'" + e.key + "' is not a known key of [" + e.section + "] (line " + std::to_string(e.line) + ")");
  }

  LoadedLedger out;
  if (const DocEntry* m = doc.find("missing")) {
    if (m->section != "metadata") fail("UnknownKey", "'missing' belongs in [metadata]");
    out.missing_policy = m->text;
    if (m->text != "zero" && m->text != "error") fail("ConfigError", "missing must be 'zero' or 'error'");
  }
  bool zero = out.missing_policy == "zero";

  hooks.d = cfg.d;
  hooks.builtins["d"] = Bound(cfg.d);
  hooks.builtins["Gamma1"] = cfg.Gamma1;
  hooks.builtins["Gamma2"] = cfg.Gamma2;
  hooks.builtins["Gamma3"] = cfg.Gamma3;
  hooks.builtins["Gamma2p"] = Bound::rational(2 * cfg.d - 2, 2 * cfg.d - 1) * cfg.Gamma2;
  hooks.builtins["cmu"] = cfg.cmu;
  Evaluator ev(doc, hooks);
  out.values = ev.evaluate_all();
  out.integral_lookups = ev.integral_lookups();

  BetaLedger& L = out.ledger;
  L.d = cfg.d;
  auto need = [&](const std::string& k) {
    if (!doc.find(k)) fail("MissingEntry", "ledger entry '" + k + "' is required");
    return out.values.at(k);
  };
  L.mu = need("mu");
  L.mubar = need("mubar");
  L.f1_initial = need("f1_zI");
  if (!L.mu.certainly_positive()) fail("LedgerError", "mu must be positive");
  L.beta_mu = doc.find("beta_mu") ? out.values.at("beta_mu") : (L.mubar.upper() / L.mu.lower()).upper();
  L.beta_mu_lower = doc.find("beta_mu_lower") ? out.values.at("beta_mu_lower") : L.mu.lower();

  auto scalar = [&](const std::string& k, Bound& dst) {
    if (doc.find(k)) {
      dst = out.values.at(k);
    } else if (zero) {
      dst = Bound(0);
      out.defaulted.push_back(k);
    } else {
      fail("MissingEntry", "ledger entry '" + k + "' is missing (set missing = zero in [metadata] to default it)");
    }
  };
  for (const auto& [n, f] : split_fields()) scalar(n, f(L));
  for (const auto& [n, f] : remainder_fields()) scalar(n, f(L));

  for (const auto& name : ledger_sequence_names()) {
    BetaSequence& s = sequence_field(L, name);
    std::map<int, Bound> listed;
    for (const auto* e : doc.in_section("sequences")) {
      auto [base, idx] = e->key.find('.') == std::string::npos ? split_index(e->key) : std::make_pair(std::string(), -1);
      if (base == name && idx >= 0) listed[idx] = out.values.at(e->key);
    }
    bool has_tail = doc.find(name + ".tail_ratio") != nullptr;
    if (matrices.count(name)) {
      if (!listed.empty() || has_tail)
        fail("ConfigError", "sequence " + name + " has both listed entries and a matrix section");
      bool weighted = false;
      s.matrix = load_matrix(name, ev, doc, weighted);
      s.weighted = weighted;
      continue;
    }
    if (listed.empty() && !has_tail) {
      if (!zero) fail("MissingEntry", "sequence " + name + " is missing (set missing = zero in [metadata] to default it)");
      out.defaulted.push_back(name);
      continue;
    }
    int expect = 0;
    for (auto& [i, v] : listed) {
      if (i != expect) fail("ConfigError", "sequence " + name + " skips index " + std::to_string(expect));
      s.terms.push_back(v);
      ++expect;
    }
    if (has_tail) {
      TailDescriptor t;
      t.ratio = out.values.at(name + ".tail_ratio");
      if (doc.find(name + ".tail_start")) t.start = to_int(out.values.at(name + ".tail_start"), name + ".tail_start");
      if (doc.find(name + ".tail_anchor")) t.anchor = out.values.at(name + ".tail_anchor");
      s.tail = t;
    } else if (doc.find(name + ".tail_start") || doc.find(name + ".tail_anchor")) {
      fail("ConfigError", "sequence " + name + " has tail_start or tail_anchor without tail_ratio");
    }
  }
  return out;
}

LoadedConfig parse_config(const std::string& text) {
  auto raw = [](const std::string& s, const std::string& k) {
    return s == "S" || s == "integrals" || (s == "bootstrap" && k == "Gamma3");
  };
  LoadedConfig lc;
  lc.doc = parse_document(text, kConfigMagic, raw);
  for (const auto& s : lc.doc.sections)
    if (s != "bootstrap" && s != "integrals" && s != "S") fail("UnknownKey", "unknown config section [" + s + "]");
  static const std::set<std::string> bkeys = {"d", "Gamma1", "Gamma2", "Gamma3", "cmu", "safety"};
  for (const auto& e : lc.doc.entries) {
    if (e.section == "bootstrap" && !bkeys.count(e.key))
      fail("UnknownKey", "'" + e.key + "' is not a known key of [bootstrap] (line " + std::to_string(e.line) + ")");
    if (e.section == "integrals" && e.key != "sup_depth" && e.key != "j_fallback")
      fail("UnknownKey", "'" + e.key + "' is not a known key of [integrals] (line " + std::to_string(e.line) + ")");
    if (e.section.empty()) fail("UnknownKey", "entry '" + e.key + "' outside a section");
  }
  const DocEntry* de = lc.doc.find("d");
  if (!de || de->section != "bootstrap") fail("MissingEntry", "config needs d in [bootstrap]");
  EvalContext ctx;
  Evaluator pre(lc.doc, ctx);
  BootstrapConfig& c = lc.cfg;
  c.d = to_int(pre.value("d"), "d");
  ctx.d = c.d;
  ctx.builtins["d"] = Bound(c.d);
  Evaluator ev(lc.doc, ctx);
  auto need = [&](const std::string& k) {
    if (!lc.doc.find(k)) fail("MissingEntry", "config needs " + k + " in [bootstrap]");
    return ev.value(k);
  };
  c.Gamma1 = need("Gamma1");
  c.Gamma2 = need("Gamma2");
  c.cmu = need("cmu");
  if (lc.doc.find("safety")) c.safety = ev.value("safety").mid_d();
  const DocEntry* g3 = lc.doc.find("Gamma3");
  if (!g3) fail("MissingEntry", "config needs Gamma3 in [bootstrap]");
  if (g3->text.rfind("auto", 0) == 0) {
    std::string t = trim(g3->text.substr(4));
    double f = 1.5;
    if (!t.empty()) {
      if (t.front() != '(' || t.back() != ')') fail("SyntaxError", "line " + std::to_string(g3->line) + ": expected auto(FACTOR)");
      auto ast = parse_expression(t.substr(1, t.size() - 2), g3->line, g3->col + 5);
      Document tmp;
      tmp.magic = kConfigMagic;
      tmp.entries.push_back({"bootstrap", "__factor", t, g3->line, g3->col, ast});
      Evaluator x(tmp, ctx);
      f = x.value("__factor").mid_d();
    }
    if (!(f > 1)) fail("ConfigError", "auto Gamma3 factor must exceed 1");
    lc.gamma3_auto = f;
    c.Gamma3 = Bound(1);
  } else {
    Document tmp;
    tmp.magic = kConfigMagic;
    tmp.entries.push_back({"bootstrap", "__g3", g3->text, g3->line, g3->col, parse_expression(g3->text, g3->line, g3->col)});
    Evaluator x(tmp, ctx);
    c.Gamma3 = x.value("__g3");
  }
  if (const DocEntry* e = lc.doc.find("sup_depth")) {
    Document tmp;
    tmp.entries.push_back({"integrals", "__s", e->text, e->line, e->col, parse_expression(e->text, e->line, e->col)});
    Evaluator x(tmp, ctx);
    lc.sup_depth = to_int(x.value("__s"), "sup_depth");
    if (lc.sup_depth < 0 || lc.sup_depth > 8) fail("ConfigError", "sup_depth must lie in [0, 8]");
  }
  if (const DocEntry* e = lc.doc.find("j_fallback")) lc.j_fallback = parse_bool(e->text, "j_fallback");

  for (const auto* e : lc.doc.in_section("S")) {
    auto parts = split_top_level(e->text);
    if (parts.size() != 4)
      fail("SyntaxError", "line " + std::to_string(e->line) + ", col " + std::to_string(e->col) +
                              ": expected 'n, l, SET, c'");
    SEntry s;
    s.name = e->key;
    Document tmp;
    tmp.entries.push_back({"S", "n", parts[0], e->line, e->col, parse_expression(parts[0], e->line, e->col)});
    tmp.entries.push_back({"S", "l", parts[1], e->line, e->col, parse_expression(parts[1], e->line, e->col)});
    tmp.entries.push_back({"S", "c", parts[3], e->line, e->col, parse_expression(parts[3], e->line, e->col)});
    Evaluator x(tmp, ctx);
    s.n = to_int(x.value("n"), "n of " + s.name);
    s.l = to_int(x.value("l"), "l of " + s.name);
    s.S = PointSetSpec::parse(parts[2], c.d);
    s.c = x.value("c");
    c.S.push_back(std::move(s));
  }
  return lc;
}

std::string render_config(const LoadedConfig& base, const BootstrapConfig& cfg) {
  // short decimal when it parses back to the same point, else an outward-rounded interval
  auto num = [](const Bound& b) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", b.mid_d());
    if (b.is_point() && Bound::parse(buf).contains(b)) return std::string(buf);
    std::string h = b.str(30);
    return "interval(" + h.substr(1, h.size() - 2) + ")";
  };
  std::ostringstream os;
  os << kConfigMagic << "\n\n[bootstrap]\n";
  os << "d = " << cfg.d << "\n";
  os << "Gamma1 = " << num(cfg.Gamma1) << "\n";
  os << "Gamma2 = " << num(cfg.Gamma2) << "\n";
  if (base.gamma3_auto)
    os << "Gamma3 = auto(" << *base.gamma3_auto << ")\n";
  else
    os << "Gamma3 = " << num(cfg.Gamma3) << "\n";
  os << "cmu = " << num(cfg.cmu) << "\n";
  os << "safety = " << cfg.safety << "\n\n[integrals]\n";
  os << "sup_depth = " << base.sup_depth << "\n";
  os << "j_fallback = " << (base.j_fallback ? "true" : "false") << "\n\n[S]\n";
  for (const auto& s : cfg.S) os << s.name << " = " << s.n << ", " << s.l << ", " << s.S.str() << ", " << num(s.c) << "\n";
  return os.str();
}

}  // namespace noble
