#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "noble/bootstrap.hpp"
#include "noble/ledger.hpp"
#include "noble/rewrite.hpp"
#include "noble/srw_table.hpp"
#include "noble/walks.hpp"

namespace noble {

inline constexpr const char* kReportMagic = "NOBLE-REPORT 1";

struct GateRecord {
  std::string name;
  Bound value;  // must be positive
};

struct IntegralRecord {
  std::string name;
  int n = 0, l = 0;
  std::string where;  // point name, or the set for suprema
  Bound value;
  std::string provenance;
};

struct VerificationReport {
  BootstrapConfig cfg;  // Gamma3 resolved
  std::optional<double> gamma3_auto;
  Bound gamma3_base;  // max_S sup J / c when Gamma3 is automatic
  int sup_depth = 1;
  bool j_fallback = false;

  std::string missing_policy;
  std::vector<std::string> defaulted;
  Bound mu, mubar, beta_mu;

  RewriteBounds rb;
  std::vector<GateRecord> gates;
  Bound initial[3], improved[3];
  F3Result f3_init, f3_impr;
  Verdict verdict;
  Bound A;

  std::vector<IntegralRecord> integrals;
  std::vector<std::string> diagnostics;
  std::optional<double> seconds;
};

struct VerifyOptions {
  bool timing = false;
};

// Ledger, rewrite bounds, both sets of bootstrap candidates and the verdict.
// Errors from the ledger or a gate propagate as noble::Error.
VerificationReport run_verification(const LoadedConfig& lc, const std::string& ledger_text, IntegralTable& t,
                                    WalkCountTable& walks, const VerifyOptions& opts = {});

std::string render_text(const VerificationReport& r);
std::string render_json(const VerificationReport& r);

struct SearchOptions {
  std::uint64_t seed = 1;
  int rounds = 40;
  double initial_step = 0.5;  // log-scale step
  double min_step = 1e-3;
};

struct SearchResult {
  bool feasible = false;
  double score = 0;  // min_i (1 - computed_i / Gamma_i); -inf when every point errs
  BootstrapConfig best;
  std::string config_text;
  int evaluations = 0;
  std::vector<std::string> log;
};

// Seeded coordinate descent over Gamma1..3, cmu and the weights of S, maximizing the smallest slack.
SearchResult search_config(const LoadedConfig& lc, const std::string& ledger_text, IntegralTable& t,
                           WalkCountTable& walks, const SearchOptions& opts = {});

}  // namespace noble
