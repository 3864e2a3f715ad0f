#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "noble/bound.hpp"
#include "noble/lattice.hpp"

namespace noble {

struct Expr {
  enum class Kind { number, symbol, unary_minus, binary, call, point };
  Kind kind = Kind::number;
  std::string text;  // literal, symbol name, operator, function name or raw point
  std::vector<std::unique_ptr<Expr>> args;
  int line = 0, col = 0;
};

struct DocEntry {
  std::string section;  // "matrix xi_iota" keeps the full header
  std::string key;      // global name; keys of [matrix NAME] sections become NAME.key
  std::string text;     // right-hand side as written
  int line = 0, col = 0;
  std::shared_ptr<Expr> ast;  // null for raw entries
};

// Line-oriented document: a magic header line, `[section]` headers, `key = expr` entries, `#` comments.
struct Document {
  std::string magic;
  std::vector<DocEntry> entries;
  std::vector<std::string> sections;

  const DocEntry* find(const std::string& key) const;
  std::vector<const DocEntry*> in_section(const std::string& section) const;
  bool has_section(const std::string& section) const;
};

// raw(section, key) true: keep the text unparsed.
using RawPredicate = std::function<bool(const std::string&, const std::string&)>;

// Errors: SyntaxError, DuplicateKey, BadHeader.
Document parse_document(const std::string& text, const std::string& magic, const RawPredicate& raw = {});
std::shared_ptr<Expr> parse_expression(const std::string& text, int line = 1, int col = 1);

struct EvalContext {
  int d = 0;
  std::map<std::string, Bound> builtins;
  // name in {I, K, T, U, J, L, V, Tstar}
  std::function<Bound(const std::string&, int, int, const Coords&)> integral;
  std::function<Bound(int, const Coords&)> walk;
};

// Memoised, order-independent evaluation of a document's entries.
class Evaluator {
 public:
  Evaluator(const Document& doc, EvalContext ctx);
  Bound value(const std::string& key);
  bool has(const std::string& key) const;
  // Evaluates every non-raw entry; returns them by key.
  std::map<std::string, Bound> evaluate_all();
  int integral_lookups() const { return integral_lookups_; }

 private:
  Bound eval(const Expr& e, int line);
  Bound entry_value(const DocEntry& en);
  int as_int(const Bound& b, const Expr& where);

  const Document& doc_;
  EvalContext ctx_;
  std::map<std::string, const DocEntry*> by_key_;
  std::map<std::string, Bound> done_;
  std::vector<std::string> stack_;
  std::set<std::string> on_stack_;
  int integral_lookups_ = 0;
};

// Split on commas outside (), {} and [].
std::vector<std::string> split_top_level(const std::string& s, char sep = ',');
std::string trim(const std::string& s);

}  // namespace noble
