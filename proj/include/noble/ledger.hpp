#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noble/bootstrap.hpp"
#include "noble/expr.hpp"
#include "noble/rewrite.hpp"

namespace noble {

inline constexpr const char* kLedgerMagic = "NOBLE-LEDGER 1";
inline constexpr const char* kConfigMagic = "NOBLE-CONFIG 1";

struct LoadedConfig {
  BootstrapConfig cfg;
  std::optional<double> gamma3_auto;  // Gamma3 = factor * max_S sup J / c
  int sup_depth = 1;
  bool j_fallback = false;
  Document doc;
};

// [bootstrap] d, Gamma1..3, cmu, safety; [integrals] sup_depth, j_fallback;
// [S] NAME = n, l, SET, c.
LoadedConfig parse_config(const std::string& text);
std::string read_file(const std::string& path);

struct LoadedLedger {
  BetaLedger ledger;
  std::string missing_policy = "error";
  std::vector<std::string> defaulted;    // entries filled with 0 under missing = zero
  std::map<std::string, Bound> values;   // every evaluated entry
  int integral_lookups = 0;
};

// Builtins d, Gamma1..3, Gamma2p, cmu come from the config. Integrals and walk
// counts resolve through the context hooks.
LoadedLedger load_ledger(const std::string& text, const BootstrapConfig& cfg, EvalContext hooks);
Document parse_ledger(const std::string& text);

// The known sequence names and scalar keys of a ledger.
const std::vector<std::string>& ledger_sequence_names();
const std::vector<std::string>& ledger_scalar_keys();

// Config text with the given values; used by search to emit its best point.
std::string render_config(const LoadedConfig& base, const BootstrapConfig& cfg);

}  // namespace noble
