#include "noble/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "noble/error.hpp"

namespace noble {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(' || c == '{' || c == '[') ++depth;
    if (c == ')' || c == '}' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

namespace {

[[noreturn]] void syntax(int line, int col, const std::string& expected) {
  fail("SyntaxError", "line " + std::to_string(line) + ", col " + std::to_string(col) + ": expected " + expected);
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; }

// integral name -> (number of integer arguments, takes a point)
std::optional<std::pair<int, bool>> integral_shape(const std::string& f) {
  if (f == "I" || f == "K" || f == "T" || f == "U" || f == "J" || f == "Tstar") return std::make_pair(2, true);
  if (f == "L") return std::make_pair(1, true);
  if (f == "V") return std::make_pair(2, false);
  if (f == "a") return std::make_pair(1, true);
  return std::nullopt;
}

class Parser {
 public:
  Parser(const std::string& s, int line, int col) : s_(s), line_(line), col0_(col) {}

  std::unique_ptr<Expr> parse() {
    auto e = expr();
    ws();
    if (p_ != s_.size()) syntax(line_, col(), "operator or end of expression");
    return e;
  }

 private:
  int col() const { return col0_ + static_cast<int>(p_); }
  void ws() {
    while (p_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[p_]))) ++p_;
  }
  bool eat(char c) {
    ws();
    if (p_ < s_.size() && s_[p_] == c) {
      ++p_;
      return true;
    }
    return false;
  }
  std::unique_ptr<Expr> node(Expr::Kind k, std::string t, int c) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->text = std::move(t);
    e->line = line_;
    e->col = c;
    return e;
  }

  std::unique_ptr<Expr> expr() {
    auto lhs = term();
    for (;;) {
      ws();
      int c = col();
      if (eat('+')) {
        auto b = node(Expr::Kind::binary, "+", c);
        b->args.push_back(std::move(lhs));
        b->args.push_back(term());
        lhs = std::move(b);
      } else if (eat('-')) {
        auto b = node(Expr::Kind::binary, "-", c);
        b->args.push_back(std::move(lhs));
        b->args.push_back(term());
        lhs = std::move(b);
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Expr> term() {
    auto lhs = unary();
    for (;;) {
      ws();
      int c = col();
      char op = 0;
      if (eat('*'))
        op = '*';
      else if (eat('/'))
        op = '/';
      else
        return lhs;
      auto b = node(Expr::Kind::binary, std::string(1, op), c);
      b->args.push_back(std::move(lhs));
      b->args.push_back(unary());
      lhs = std::move(b);
    }
  }

  std::unique_ptr<Expr> unary() {
    ws();
    int c = col();
    if (eat('-')) {
      auto u = node(Expr::Kind::unary_minus, "-", c);
      u->args.push_back(unary());
      return u;
    }
    if (eat('+')) return unary();
    return power();
  }

  std::unique_ptr<Expr> power() {
    auto base = primary();
    ws();
    int c = col();
    if (eat('^')) {
      auto b = node(Expr::Kind::binary, "^", c);
      b->args.push_back(std::move(base));
      b->args.push_back(unary());
      return b;
    }
    return base;
  }

  std::string raw_point() {
    ws();
    std::size_t start = p_;
    int depth = 0;
    while (p_ < s_.size()) {
      char ch = s_[p_];
      if (ch == '(') ++depth;
      if (ch == ')') {
        if (depth == 0) break;
        --depth;
      }
      if (ch == ',' && depth == 0) break;
      ++p_;
    }
    std::string t = trim(s_.substr(start, p_ - start));
    if (t.empty()) syntax(line_, col(), "lattice point");
    return t;
  }

  std::unique_ptr<Expr> primary() {
    ws();
    int c = col();
    if (p_ >= s_.size()) syntax(line_, c, "number, symbol or '('");
    char ch = s_[p_];
    if (ch == '(') {
      ++p_;
      auto e = expr();
      if (!eat(')')) syntax(line_, col(), "')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') {
      std::size_t start = p_;
      if (ch == '0' && p_ + 1 < s_.size() && (s_[p_ + 1] == 'x' || s_[p_ + 1] == 'X')) {
        p_ += 2;
        while (p_ < s_.size() && (std::isxdigit(static_cast<unsigned char>(s_[p_])) || s_[p_] == '.')) ++p_;
        if (p_ < s_.size() && (s_[p_] == 'p' || s_[p_] == 'P')) {
          ++p_;
          if (p_ < s_.size() && (s_[p_] == '+' || s_[p_] == '-')) ++p_;
          while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
        }
      } else {
        while (p_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[p_])) || s_[p_] == '.')) ++p_;
        if (p_ < s_.size() && (s_[p_] == 'e' || s_[p_] == 'E')) {
          std::size_t q = p_ + 1;
          if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
          if (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) {
            p_ = q;
            while (p_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p_]))) ++p_;
          }
        }
      }
      return node(Expr::Kind::number, s_.substr(start, p_ - start), c);
    }
    if (!ident_start(ch)) syntax(line_, c, "number, symbol or '('");
    std::size_t start = p_;
    while (p_ < s_.size() && ident_char(s_[p_])) ++p_;
    while (p_ < s_.size() && s_[p_] == '[') {
      std::size_t q = p_ + 1;
      while (q < s_.size() && std::isdigit(static_cast<unsigned char>(s_[q]))) ++q;
      if (q == p_ + 1 || q >= s_.size() || s_[q] != ']') syntax(line_, col0_ + static_cast<int>(q), "index and ']'");
      p_ = q + 1;
    }
    std::string name = s_.substr(start, p_ - start);
    ws();
    if (p_ < s_.size() && s_[p_] == '(') {
      ++p_;
      auto call = node(Expr::Kind::call, name, c);
      auto shape = integral_shape(name);
      if (shape) {
        for (int i = 0; i < shape->first; ++i) {
          if (i > 0 && !eat(',')) syntax(line_, col(), "','");
          call->args.push_back(expr());
        }
        if (shape->second) {
          if (!eat(',')) syntax(line_, col(), "',' before the lattice point");
          int pc = col();
          call->args.push_back(node(Expr::Kind::point, raw_point(), pc));
        }
      } else {
        ws();
        if (p_ < s_.size() && s_[p_] != ')') {
          call->args.push_back(expr());
          while (eat(',')) call->args.push_back(expr());
        }
      }
      if (!eat(')')) syntax(line_, col(), "')'");
      return call;
    }
    return node(Expr::Kind::symbol, name, c);
  }

  const std::string& s_;
  std::size_t p_ = 0;
  int line_, col0_;
};

}  // namespace

std::shared_ptr<Expr> parse_expression(const std::string& text, int line, int col) {
  Parser p(text, line, col);
  return std::shared_ptr<Expr>(p.parse().release());
}

const DocEntry* Document::find(const std::string& key) const {
  for (const auto& e : entries)
    if (e.key == key) return &e;
  return nullptr;
}

std::vector<const DocEntry*> Document::in_section(const std::string& section) const {
  std::vector<const DocEntry*> out;
  for (const auto& e : entries)
    if (e.section == section) out.push_back(&e);
  return out;
}

bool Document::has_section(const std::string& section) const {
  for (const auto& s : sections)
    if (s == section) return true;
  return false;
}

Document parse_document(const std::string& text, const std::string& magic, const RawPredicate& raw) {
  Document doc;
  std::istringstream is(text);
  std::string line;
  int ln = 0;
  bool header = false;
  std::string section;
  std::set<std::string> keys;
  while (std::getline(is, line)) {
    ++ln;
    std::string body = line;
    auto hash = body.find('#');
    if (hash != std::string::npos) body = body.substr(0, hash);
    std::string t = trim(body);
    if (t.empty()) continue;
    if (!header) {
      std::string want_prefix = magic.substr(0, magic.find(' '));
      if (t.rfind(want_prefix, 0) != 0) fail("BadHeader", "line " + std::to_string(ln) + ": expected '" + magic + "'");
      if (t != magic) fail("UnsupportedVersion", "header '" + t + "', this build reads '" + magic + "'");
      doc.magic = t;
      header = true;
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') syntax(ln, static_cast<int>(line.find('[')) + 1, "']' closing the section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) syntax(ln, 2, "section name");
      doc.sections.push_back(section);
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos) syntax(ln, static_cast<int>(body.size()) + 1, "'=' after the key");
    std::string key = trim(body.substr(0, eq));
    if (key.empty()) syntax(ln, 1, "key before '='");
    for (char c : key)
      if (!(ident_char(c) || c == '[' || c == ']'))
        syntax(ln, static_cast<int>(body.find(key)) + 1, "key made of letters, digits, '_', '.', '[n]'");
    std::string rhs_raw = body.substr(eq + 1);
    std::size_t lead = 0;
    while (lead < rhs_raw.size() && std::isspace(static_cast<unsigned char>(rhs_raw[lead]))) ++lead;
    int col = static_cast<int>(eq + 2 + lead);
    std::string rhs = trim(rhs_raw);
    if (rhs.empty()) syntax(ln, col, "expression after '='");
    DocEntry en;
    en.section = section;
    std::string prefix;
    if (section.rfind("matrix ", 0) == 0) prefix = trim(section.substr(7)) + ".";
    en.key = prefix + key;
    en.text = rhs;
    en.line = ln;
    en.col = col;
    if (!keys.insert(en.key).second) fail("DuplicateKey", "'" + en.key + "' defined twice (line " + std::to_string(ln) + ")");
    if (!(raw && raw(section, key))) en.ast = parse_expression(rhs, ln, col);
    doc.entries.push_back(std::move(en));
  }
  if (!header) fail("BadHeader", "empty document, expected '" + magic + "'");
  return doc;
}

Evaluator::Evaluator(const Document& doc, EvalContext ctx) : doc_(doc), ctx_(std::move(ctx)) {
  for (const auto& e : doc_.entries) by_key_[e.key] = &e;
}

bool Evaluator::has(const std::string& key) const {
  return by_key_.count(key) > 0 || ctx_.builtins.count(key) > 0;
}

Bound Evaluator::value(const std::string& key) {
  auto it = by_key_.find(key);
  if (it == by_key_.end()) {
    auto b = ctx_.builtins.find(key);
    if (b != ctx_.builtins.end()) return b->second;
    fail("UnknownSymbol", "'" + key + "' is not defined");
  }
  return entry_value(*it->second);
}

std::map<std::string, Bound> Evaluator::evaluate_all() {
  std::map<std::string, Bound> out;
  for (const auto& e : doc_.entries)
    if (e.ast) out[e.key] = entry_value(e);
  return out;
}

Bound Evaluator::entry_value(const DocEntry& en) {
  auto it = done_.find(en.key);
  if (it != done_.end()) return it->second;
  if (!en.ast) fail("TypeError", "'" + en.key + "' (line " + std::to_string(en.line) + ") is not an expression");
  if (on_stack_.count(en.key)) {
    std::string path;
    bool in = false;
    for (const auto& s : stack_) {
      if (s == en.key) in = true;
      if (in) path += s + " -> ";
    }
    fail("CycleDetected", path + en.key);
  }
  stack_.push_back(en.key);
  on_stack_.insert(en.key);
  Bound v = eval(*en.ast, en.line);
  stack_.pop_back();
  on_stack_.erase(en.key);
  done_[en.key] = v;
  return v;
}

int Evaluator::as_int(const Bound& b, const Expr& where) {
  double x = b.mid_d();
  double r = std::round(x);
  if (!b.is_point() || x != r || std::fabs(r) > 1e6)
    fail("TypeError", "line " + std::to_string(where.line) + ", col " + std::to_string(where.col) +
                          ": integer argument required");
  return static_cast<int>(r);
}

Bound Evaluator::eval(const Expr& e, int line) {
  switch (e.kind) {
    case Expr::Kind::number:
      return Bound::parse(e.text);
    case Expr::Kind::symbol: {
      auto it = by_key_.find(e.text);
      if (it != by_key_.end()) return entry_value(*it->second);
      auto b = ctx_.builtins.find(e.text);
      if (b != ctx_.builtins.end()) return b->second;
      fail("UnknownSymbol", "'" + e.text + "' (line " + std::to_string(line) + ")");
    }
    case Expr::Kind::unary_minus:
      return -eval(*e.args[0], line);
    case Expr::Kind::binary: {
      Bound a = eval(*e.args[0], line);
      Bound b = eval(*e.args[1], line);
      const std::string& op = e.text;
      if (op == "+") return a + b;
      if (op == "-") return a - b;
      if (op == "*") return a * b;
      if (op == "/") {
        if (b.contains_zero())
          fail("DomainError", "line " + std::to_string(e.line) + ", col " + std::to_string(e.col) + ": division by an interval containing 0");
        return a / b;
      }
      if (b.is_point() && std::round(b.mid_d()) == b.mid_d() && std::fabs(b.mid_d()) < 1e6)
        return a.pow(static_cast<long>(b.mid_d()));
      if (!a.certainly_positive())
        fail("DomainError", "line " + std::to_string(e.line) + ": non-integer power of a non-positive base");
      return exp(b * log(a));
    }
    case Expr::Kind::call: {
      const std::string& f = e.text;
      auto arity = [&](std::size_t n) {
        if (e.args.size() != n)
          fail("SyntaxError", "line " + std::to_string(e.line) + ", col " + std::to_string(e.col) + ": expected " +
                                  std::to_string(n) + " arguments to " + f);
      };
      if (auto shape = integral_shape(f)) {
        std::vector<int> ints;
        for (int i = 0; i < shape->first; ++i) ints.push_back(as_int(eval(*e.args[static_cast<std::size_t>(i)], line), *e.args[static_cast<std::size_t>(i)]));
        Coords x = origin(ctx_.d);
        if (shape->second) x = parse_point(e.args.back()->text, ctx_.d);
        if (f == "a") {
          if (!ctx_.walk) fail("MissingEntry", "walk counts are not available here");
          return ctx_.walk(ints[0], x);
        }
        ++integral_lookups_;
        if (!ctx_.integral) fail("MissingEntry", "integrals are not available here");
        std::string name = f == "Tstar" ? "T*" : f;
        int l = shape->first >= 2 ? ints[1] : 0;
        return ctx_.integral(name, ints[0], l, x);
      }
      std::vector<Bound> v;
      for (const auto& a : e.args) v.push_back(eval(*a, line));
      if (f == "sqrt") {
        arity(1);
        if (!v[0].certainly_nonneg()) fail("DomainError", "line " + std::to_string(e.line) + ": sqrt of a possibly negative value");
        return sqrt(v[0]);
      }
      if (f == "abs") {
        arity(1);
        return abs(v[0]);
      }
      if (f == "exp") {
        arity(1);
        return exp(v[0]);
      }
      if (f == "log") {
        arity(1);
        if (!v[0].certainly_positive()) fail("DomainError", "line " + std::to_string(e.line) + ": log of a non-positive value");
        return log(v[0]);
      }
      if (f == "min" || f == "max") {
        if (v.empty()) arity(1);
        Bound r = v[0];
        for (std::size_t i = 1; i < v.size(); ++i) r = f == "min" ? min(r, v[i]) : max(r, v[i]);
        return r;
      }
      if (f == "interval") {
        arity(2);
        if (!v[0].lower().certainly_le(v[1].upper()))
          fail("DomainError", "line " + std::to_string(e.line) + ": interval(a, b) needs a <= b");
        return hull(v[0], v[1]);
      }
      fail("UnknownSymbol", "function '" + f + "' (line " + std::to_string(line) + ")");
    }
    case Expr::Kind::point:
      fail("TypeError", "line " + std::to_string(e.line) + ": lattice point used as a number");
  }
  fail("TypeError", "bad expression node");
}

}  // namespace noble
