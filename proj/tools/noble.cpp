// noble: integral tables, walk counts and bootstrap verification from the command line.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "noble/error.hpp"
#include "noble/ledger.hpp"
#include "noble/srw_table.hpp"
#include "noble/verify.hpp"
#include "noble/walks.hpp"

namespace fs = std::filesystem;
using namespace noble;

namespace {

struct Common {
  int d = 0;
  int precision = 40;  // decimal digits
  std::string cache;
};

std::string default_cache_dir() {
  if (const char* e = std::getenv("NOBLE_CACHE_DIR"); e && *e) return e;
  return ".noble-cache";
}

std::string table_path(const Common& c, int d) {
  return (fs::path(c.cache) / ("srw-d" + std::to_string(d) + "-p" + std::to_string(precision_bits()) + ".tbl")).string();
}

std::string walk_path(const Common& c, int d, WalkKind k) {
  return (fs::path(c.cache) / ("walks-d" + std::to_string(d) + "-" + to_string(k) + ".tbl")).string();
}

IntegralTable open_table(const Common& c, int d) {
  std::string p = table_path(c, d);
  if (!fs::exists(p)) return IntegralTable(d);
  IntegralTable t = IntegralTable::load(p);
  if (t.dim() != d) fail("CacheCorrupt", p + " holds d = " + std::to_string(t.dim()));
  if (t.precision() != precision_bits()) fail("CacheCorrupt", p + " was written at another precision");
  return t;
}

void save_if_changed(const IntegralTable& t, const std::string& path) {
  std::string text = t.serialize();
  if (fs::exists(path)) {
    std::ifstream f(path);
    std::string old((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (old == text) return;
  }
  fs::create_directories(fs::path(path).parent_path());
  t.save(path);
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) fail("IOError", "cannot write " + path);
  f << text;
}

void add_common(CLI::App* sc, Common& c, bool need_d) {
  auto* o = sc->add_option("--d", c.d, "lattice dimension");
  if (need_d) o->required();
  sc->add_option("--precision", c.precision, "working precision in decimal digits")->check(CLI::Range(10, 200));
  sc->add_option("--cache", c.cache, "cache directory (default $NOBLE_CACHE_DIR or ./.noble-cache)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noble: bootstrap verification for non-backtracking lace expansion bounds"};
  app.require_subcommand(1);
  Common c;

  auto* srw = app.add_subcommand("srw-table", "populate the SRW integral cache");
  add_common(srw, c, true);
  int nmax = 4, lmax = 6;
  std::string points = "demo";
  srw->add_option("--nmax", nmax, "largest n");
  srw->add_option("--lmax", lmax, "largest l");
  srw->add_option("--points", points, "'demo' or a point list such as {0,e1,2e1}");

  auto* wc = app.add_subcommand("walk-count", "print an exact walk count");
  add_common(wc, c, true);
  std::string kind = "srw", xs = "0";
  int wn = 0;
  wc->add_option("--kind", kind, "srw, nbw, bond_sa or saw");
  wc->add_option("--n", wn, "number of steps")->required();
  wc->add_option("--x", xs, "end point, e.g. 0 or 2e1+e2");

  std::string config, ledger, out, json_out, walk_kind = "bond_sa";
  bool compute_missing = false, timing = false;
  int walk_nmax = 10;
  auto add_run = [&](CLI::App* sc) {
    add_common(sc, c, false);
    sc->add_option("--config", config, "config file")->required();
    sc->add_option("--ledger", ledger, "ledger file")->required();
    sc->add_flag("--compute-missing", compute_missing, "compute integrals that are not cached");
    sc->add_option("--walk-kind", walk_kind, "walk counts behind a(n, x)");
    sc->add_option("--walk-nmax", walk_nmax, "enumeration limit for a(n, x)");
    sc->add_option("--out", out, "report file (default stdout)");
  };
  auto* verify = app.add_subcommand("verify", "check the bootstrap condition; exit 0 holds, 1 fails, 2 error");
  add_run(verify);
  verify->add_option("--json", json_out, "also write the JSON report here");
  verify->add_flag("--timing", timing, "append the wall time to the report");

  auto* report = app.add_subcommand("report", "write the verification report");
  add_run(report);
  std::string format = "text";
  report->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  report->add_flag("--timing", timing, "append the wall time to the report");

  auto* search = app.add_subcommand("search", "coordinate search for Gamma, cmu and the weights of S");
  add_run(search);
  std::uint64_t seed = 1;
  int rounds = 40;
  search->add_option("--seed", seed, "random seed");
  search->add_option("--rounds", rounds, "search rounds");

  CLI11_PARSE(app, argc, argv);
  if (c.cache.empty()) c.cache = default_cache_dir();
  set_precision_bits(bits_for_digits(c.precision));

  try {
    if (*srw) {
      std::string path = table_path(c, c.d);
      IntegralTable t = open_table(c, c.d);
      std::size_t before = t.size();
      std::vector<Coords> pts;
      if (points == "demo") {
        pts = demo_points(c.d);
      } else {
        PointSetSpec s = PointSetSpec::parse(points, c.d);
        if (!s.finite()) fail("ConfigError", "--points needs a finite list");
        pts = s.points;
      }
      t.build(nmax, lmax, pts);
      int checked = t.check_recursion();
      save_if_changed(t, path);
      std::printf("%s: %zu entries (%zu new), %d recursion triples checked\n", path.c_str(), t.size(),
                  t.size() - before, checked);
      return 0;
    }
    if (*wc) {
      WalkKind k = walk_kind_from_string(kind);
      WalkCountTable w(c.d, k);
      std::string p = walk_path(c, c.d, k);
      if (fs::exists(p)) w = WalkCountTable::load(p);
      Coords x = parse_point(xs, c.d);
      std::cout << w.count(wn, x).get_str() << "\n";
      if (k == WalkKind::srw || k == WalkKind::nbw) {
        fs::create_directories(c.cache);
        w.save(p);
      }
      return 0;
    }

    LoadedConfig lc = parse_config(read_file(config));
    if (c.d != 0 && c.d != lc.cfg.d) fail("ConfigError", "--d disagrees with the config");
    c.d = lc.cfg.d;
    std::string ledger_text = read_file(ledger);
    IntegralTable t = open_table(c, c.d);
    t.set_frozen(!compute_missing);
    WalkCountTable w(c.d, walk_kind_from_string(walk_kind));
    w.set_nmax(walk_nmax);
    auto persist = [&] {
      if (compute_missing) save_if_changed(t, table_path(c, c.d));
    };

    if (*search) {
      SearchOptions so;
      so.seed = seed;
      so.rounds = rounds;
      SearchResult r = search_config(lc, ledger_text, t, w, so);
      persist();
      std::string text = r.config_text;
      text += "\n# search: " + std::string(r.feasible ? "feasible" : "infeasible") + ", " +
              std::to_string(r.evaluations) + " evaluations, seed " + std::to_string(seed) + "\n";
      for (const auto& l : r.log) text += "# " + l + "\n";
      write_out(out, text);
      std::fprintf(stderr, "search: %s\n", r.feasible ? "feasible" : "infeasible");
      return r.feasible ? 0 : 1;
    }

    VerifyOptions vo;
    vo.timing = timing;
    VerificationReport r = run_verification(lc, ledger_text, t, w, vo);
    persist();
    if (*report) {
      write_out(out, format == "json" ? render_json(r) : render_text(r));
      return 0;
    }
    write_out(out, render_text(r));
    if (!json_out.empty()) write_out(json_out, render_json(r));
    if (!r.verdict.holds)
      for (const auto& f : r.verdict.failing) std::fprintf(stderr, "failing: %s\n", f.c_str());
    return r.verdict.holds ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
