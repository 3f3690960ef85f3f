// Copyright 2026 The FlexCloud Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flexcloud/workflow_dsl.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

#include "flexcloud/error.hpp"

namespace flexcloud {

namespace {

constexpr std::array<std::string_view, 19> kReserved = {
    "against", "agg",     "aggregate", "and",  "compare", "extend",  "from",
    "join",    "key",     "map",       "match", "on",     "project", "recommend",
    "select",  "top",     "using",     "where", "with",
};

constexpr std::size_t kMaxDepth = 128;

enum class Tok {
  kIdent,
  kInt,
  kFloat,
  kString,
  kLParen,
  kRParen,
  kComma,
  kColon,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kTilde,
  kArrow,
  kDollar,
  kEnd,
};

struct Token {
  Tok kind = Tok::kEnd;
  std::string text;  // identifier name or decoded string literal
  Value literal;
  SourceSpan span;
};

struct Failure {
  ParseDiagnostic diag;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      mark(t);
      if (pos_ >= src_.size()) {
        t.kind = Tok::kEnd;
        finish(t);
        out.push_back(std::move(t));
        return out;
      }
      const char c = src_[pos_];
      if (is_ident_start(c)) {
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        t.kind = Tok::kIdent;
        t.text = std::string(src_.substr(t.span.start, pos_ - t.span.start));
      } else if (is_digit(c) || (c == '-' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
        number(t);
      } else if (c == '"') {
        string(t);
      } else {
        punct(t);
      }
      finish(t);
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void mark(Token& t) const {
    t.span.start = pos_;
    t.span.line = line_;
    t.span.column = col_;
  }
  void finish(Token& t) const { t.span.end = pos_; }

  [[noreturn]] void fail(const Token& t, std::string message) const {
    SourceSpan span = t.span;
    span.end = std::max(pos_, span.start);
    throw Failure{{Severity::kError, std::move(message), span}};
  }

  void number(Token& t) {
    if (src_[pos_] == '-') advance();
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    bool is_float = false;
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && is_digit(src_[pos_ + 1])) {
      is_float = true;
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && is_digit(src_[look])) {
        is_float = true;
        while (pos_ < look) advance();
        while (pos_ < src_.size() && is_digit(src_[pos_])) advance();
      }
    }
    const std::string_view text = src_.substr(t.span.start, pos_ - t.span.start);
    if (pos_ < src_.size() && is_ident_char(src_[pos_])) fail(t, "malformed number");
    if (is_float) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        fail(t, "float literal out of range");
      }
      t.kind = Tok::kFloat;
      t.literal = Value(v);
    } else {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
      if (ec != std::errc() || ptr != text.data() + text.size()) fail(t, "integer literal out of range");
      t.kind = Tok::kInt;
      t.literal = Value(v);
    }
  }

  void string(Token& t) {
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') fail(t, "unterminated string literal");
      const char c = src_[pos_];
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) fail(t, "unterminated string literal");
        const char e = src_[pos_];
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: fail(t, std::string("unknown escape '\\") + e + "'");
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
    if (!is_valid_utf8(out)) fail(t, "string literal is not valid UTF-8");
    t.kind = Tok::kString;
    t.text = out;
    t.literal = Value(std::move(out));
  }

  void punct(Token& t) {
    const char c = src_[pos_];
    const char n = pos_ + 1 < src_.size() ? src_[pos_ + 1] : '\0';
    const auto one = [&](Tok k) {
      advance();
      t.kind = k;
    };
    const auto two = [&](Tok k) {
      advance();
      advance();
      t.kind = k;
    };
    switch (c) {
      case '(': return one(Tok::kLParen);
      case ')': return one(Tok::kRParen);
      case ',': return one(Tok::kComma);
      case ':': return one(Tok::kColon);
      case '=': return one(Tok::kEq);
      case '~': return one(Tok::kTilde);
      case '$': return one(Tok::kDollar);
      case '!':
        if (n == '=') return two(Tok::kNe);
        break;
      case '<':
        if (n == '=') return two(Tok::kLe);
        return one(Tok::kLt);
      case '>':
        if (n == '=') return two(Tok::kGe);
        return one(Tok::kGt);
      case '-':
        if (n == '>') return two(Tok::kArrow);
        break;
      default:
        break;
    }
    advance();
    const auto u = static_cast<unsigned char>(c);
    if (u >= 0x20 && u < 0x7F) fail(t, std::string("unexpected character '") + c + "'");
    fail(t, "unexpected byte 0x" + std::string(1, "0123456789abcdef"[u >> 4]) +
                std::string(1, "0123456789abcdef"[u & 15]));
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

std::string_view describe(const Token& t) {
  switch (t.kind) {
    case Tok::kIdent: return t.text;
    case Tok::kInt: return "integer";
    case Tok::kFloat: return "float";
    case Tok::kString: return "string";
    case Tok::kLParen: return "(";
    case Tok::kRParen: return ")";
    case Tok::kComma: return ",";
    case Tok::kColon: return ":";
    case Tok::kEq: return "=";
    case Tok::kNe: return "!=";
    case Tok::kLt: return "<";
    case Tok::kLe: return "<=";
    case Tok::kGt: return ">";
    case Tok::kGe: return ">=";
    case Tok::kTilde: return "~";
    case Tok::kArrow: return "->";
    case Tok::kDollar: return "$";
    case Tok::kEnd: return "end of input";
  }
  return "?";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  WorkflowAst workflow() {
    WorkflowAst ast;
    expect_keyword("workflow");
    ast.name = name("workflow name");
    expect(Tok::kLParen, "'('");
    std::set<std::string> seen;
    if (!at(Tok::kRParen)) {
      for (;;) {
        const Token& at_name = peek();
        ParamDecl p;
        p.name = name("parameter name");
        if (!seen.insert(p.name).second) fail(at_name, "parameter '" + p.name + "' is declared twice");
        expect(Tok::kColon, "':'");
        const Token& type_tok = peek();
        const std::string type = word("parameter type");
        if (type == "int") {
          p.type = ColumnType::kInt;
        } else if (type == "float") {
          p.type = ColumnType::kFloat;
        } else if (type == "text") {
          p.type = ColumnType::kText;
        } else {
          fail(type_tok, "unknown parameter type '" + type + "' (expected int, float or text)");
        }
        ast.params.push_back(std::move(p));
        if (!accept(Tok::kComma)) break;
      }
    }
    expect(Tok::kRParen, "')'");
    expect(Tok::kColon, "':'");
    params_ = &ast.params;
    do {
      const Token& name_tok = peek();
      Binding b{name("binding name"), {}};
      if (bindings_.count(b.name)) fail(name_tok, "binding '" + b.name + "' is defined twice");
      expect(Tok::kEq, "'='");
      b.expr = expr(0);
      bindings_.insert(b.name);
      ast.bindings.push_back(std::move(b));
      if (!at(Tok::kEnd) && !at(Tok::kIdent)) fail(peek(), "expected a new binding or end of input");
      if (at(Tok::kIdent) && is_reserved_word(peek().text)) {
        fail(peek(), "unexpected '" + peek().text + "'");
      }
    } while (!at(Tok::kEnd));
    return ast;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_keyword(std::string_view kw) const { return at(Tok::kIdent) && peek().text == kw; }

  const Token& next() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::kEnd) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(const Token& t, std::string message) {
    throw Failure{{Severity::kError, std::move(message), t.span}};
  }

  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }

  void expect(Tok k, std::string_view what) {
    if (!at(k)) {
      fail(peek(), "expected " + std::string(what) + ", found '" + std::string(describe(peek())) + "'");
    }
    next();
  }

  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) {
      fail(peek(), "expected '" + std::string(kw) + "'" +
                       (at(Tok::kEnd) ? std::string()
                                      : ", found '" + std::string(describe(peek())) + "'"));
    }
    next();
  }

  // Any identifier, reserved or not (used for contextual words).
  std::string word(std::string_view what) {
    if (!at(Tok::kIdent)) {
      fail(peek(), "expected " + std::string(what) + ", found '" + std::string(describe(peek())) + "'");
    }
    return next().text;
  }

  // A non-reserved identifier.
  std::string name(std::string_view what) {
    if (at(Tok::kIdent) && is_reserved_word(peek().text)) {
      fail(peek(), "expected " + std::string(what) + ", found keyword '" + peek().text + "'");
    }
    return word(what);
  }

  Expr expr(std::size_t depth) {
    if (depth > kMaxDepth) fail(peek(), "expression nested too deeply");
    if (accept(Tok::kLParen)) {
      Expr inner = expr(depth + 1);
      expect(Tok::kRParen, "')'");
      return inner;
    }
    if (!at(Tok::kIdent)) {
      fail(peek(), "expected an expression, found '" + std::string(describe(peek())) + "'");
    }
    const std::string& head = peek().text;
    if (head == "select") return select(depth);
    if (head == "project") return project(depth);
    if (head == "join") return join(depth);
    if (head == "extend") return extend(depth);
    if (head == "recommend") return recommend(depth);
    const std::string ref = name("relation or binding name");
    return Expr{RelationRef{ref, bindings_.count(ref) > 0}};
  }

  Expr select(std::size_t depth) {
    next();
    Expr input = expr(depth + 1);
    expect_keyword("where");
    Predicate pred;
    do {
      pred.conditions.push_back(condition());
    } while (at_keyword("and") && (next(), true));
    return Expr{SelectNode{std::move(input), std::move(pred)}};
  }

  Condition condition() {
    Condition c;
    c.column = name("column name");
    const Token& op = next();
    switch (op.kind) {
      case Tok::kEq: c.op = CompareOp::kEq; break;
      case Tok::kNe: c.op = CompareOp::kNe; break;
      case Tok::kLt: c.op = CompareOp::kLt; break;
      case Tok::kLe: c.op = CompareOp::kLe; break;
      case Tok::kGt: c.op = CompareOp::kGt; break;
      case Tok::kGe: c.op = CompareOp::kGe; break;
      default: fail(op, "expected a comparison operator, found '" + std::string(describe(op)) + "'");
    }
    if (accept(Tok::kDollar)) {
      const Token& p = peek();
      const std::string param = name("parameter name");
      const bool declared = std::any_of(params_->begin(), params_->end(),
                                        [&](const ParamDecl& d) { return d.name == param; });
      if (!declared) fail(p, "undeclared parameter '$" + param + "'");
      c.operand = ParamRef{param};
    } else if (at(Tok::kInt) || at(Tok::kFloat) || at(Tok::kString)) {
      c.operand = next().literal;
    } else {
      fail(peek(), "expected a literal or $parameter, found '" + std::string(describe(peek())) + "'");
    }
    return c;
  }

  Expr project(std::size_t depth) {
    next();
    Expr input = expr(depth + 1);
    expect_keyword("on");
    std::vector<std::string> cols;
    do {
      cols.push_back(name("column name"));
    } while (accept(Tok::kComma));
    return Expr{ProjectNode{std::move(input), std::move(cols)}};
  }

  Expr join(std::size_t depth) {
    next();
    Expr left = expr(depth + 1);
    expect(Tok::kComma, "','");
    Expr right = expr(depth + 1);
    expect_keyword("on");
    std::string lc = name("column name");
    expect(Tok::kEq, "'='");
    std::string rc = name("column name");
    return Expr{JoinNode{std::move(left), std::move(right), std::move(lc), std::move(rc)}};
  }

  Expr extend(std::size_t depth) {
    next();
    Expr input = expr(depth + 1);
    expect_keyword("with");
    std::string attr = name("attribute name");
    expect_keyword("from");
    Expr source = expr(depth + 1);
    expect_keyword("key");
    std::string group = name("column name");
    expect_keyword("map");
    expect(Tok::kLParen, "'('");
    std::string key = name("column name");
    expect(Tok::kArrow, "'->'");
    std::string value = name("column name");
    expect(Tok::kRParen, "')'");
    return Expr{ExtendNode{std::move(input), std::move(source), std::move(attr), std::move(group),
                           std::move(key), std::move(value)}};
  }

  Expr recommend(std::size_t depth) {
    next();
    Expr cand = expr(depth + 1);
    expect_keyword("against");
    Expr ref = expr(depth + 1);
    RecommendMode mode;
    if (at_keyword("compare")) {
      next();
      SimilarityMode sim;
      sim.candidate_column = name("column name");
      expect(Tok::kTilde, "'~'");
      sim.reference_column = name("column name");
      expect_keyword("using");
      const Token& fn_tok = peek();
      const std::string fn = word("similarity function");
      if (!parse_similarity_fn(fn, sim.fn)) {
        fail(fn_tok, "unknown similarity function '" + fn + "' (expected jaccard, pearson or inv_euclidean)");
      }
      mode = sim;
    } else if (at_keyword("aggregate")) {
      next();
      AggregateMode agg;
      agg.value_column = name("column name");
      expect_keyword("match");
      agg.candidate_column = name("column name");
      expect(Tok::kEq, "'='");
      agg.reference_column = name("column name");
      mode = agg;
    } else {
      fail(peek(), "expected 'compare' or 'aggregate', found '" + std::string(describe(peek())) + "'");
    }
    RecommendNode node{std::move(cand), std::move(ref), mode, default_aggregation(mode), std::nullopt};
    if (at_keyword("agg")) {
      next();
      const Token& agg_tok = peek();
      const std::string agg = word("aggregation");
      const auto parsed = parse_aggregation(agg);
      if (!parsed) fail(agg_tok, "unknown aggregation '" + agg + "' (expected max, mean or sum)");
      node.agg = *parsed;
    }
    if (at_keyword("top")) {
      next();
      const Token& n = peek();
      if (!at(Tok::kInt)) fail(n, "expected an integer after 'top'");
      next();
      if (n.literal.as_int() < 0) fail(n, "'top' must be non-negative");
      node.top = n.literal.as_int();
    }
    return Expr{std::move(node)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::set<std::string> bindings_;
  const std::vector<ParamDecl>* params_ = nullptr;
};

// ---------------------------------------------------------------------------
// Formatting

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string format_literal(const Value& v) {
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_float()) {
    std::string s = format_double(v.as_float());
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
  }
  return quote_string(v.as_text());
}

std::string format_expr(const Expr& e, bool nested);

std::string sub(const Expr& e) { return format_expr(e, true); }

std::string format_expr(const Expr& e, bool nested) {
  std::string body;
  if (const auto* ref = std::get_if<RelationRef>(&e.node)) return ref->name;
  if (const auto* n = std::get_if<SelectNode>(&e.node)) {
    body = "select " + sub(*n->input) + " where ";
    for (std::size_t i = 0; i < n->predicate.conditions.size(); ++i) {
      const auto& c = n->predicate.conditions[i];
      if (i) body += " and ";
      body += c.column + " " + std::string(compare_op_text(c.op)) + " ";
      if (const auto* p = std::get_if<ParamRef>(&c.operand)) {
        body += "$" + p->name;
      } else {
        body += format_literal(std::get<Value>(c.operand));
      }
    }
  } else if (const auto* n = std::get_if<ProjectNode>(&e.node)) {
    body = "project " + sub(*n->input) + " on ";
    for (std::size_t i = 0; i < n->columns.size(); ++i) body += (i ? ", " : "") + n->columns[i];
  } else if (const auto* n = std::get_if<JoinNode>(&e.node)) {
    body = "join " + sub(*n->left) + ", " + sub(*n->right) + " on " + n->left_column + " = " +
           n->right_column;
  } else if (const auto* n = std::get_if<ExtendNode>(&e.node)) {
    body = "extend " + sub(*n->input) + " with " + n->attribute + " from " + sub(*n->source) +
           " key " + n->group_key + " map (" + n->key_column + " -> " + n->value_column + ")";
  } else if (const auto* n = std::get_if<RecommendNode>(&e.node)) {
    body = "recommend " + sub(*n->candidates) + " against " + sub(*n->reference);
    if (const auto* sim = std::get_if<SimilarityMode>(&n->mode)) {
      body += " compare " + sim->candidate_column + " ~ " + sim->reference_column + " using " +
              std::string(similarity_fn_name(sim->fn));
    } else {
      const auto& agg = std::get<AggregateMode>(n->mode);
      body += " aggregate " + agg.value_column + " match " + agg.candidate_column + " = " +
              agg.reference_column;
    }
    body += " agg " + std::string(aggregation_name(n->agg));
    if (n->top) body += " top " + std::to_string(*n->top);
  }
  return nested ? "(" + body + ")" : body;
}

}  // namespace

bool is_reserved_word(std::string_view word) {
  return word == "workflow" || std::find(kReserved.begin(), kReserved.end(), word) != kReserved.end();
}

std::string format_diagnostic(const ParseDiagnostic& diag, std::string_view origin) {
  std::string out;
  if (!origin.empty()) out += std::string(origin) + ":";
  out += std::to_string(diag.span.line) + ":" + std::to_string(diag.span.column) + ": ";
  out += diag.severity == Severity::kError ? "error: " : "warning: ";
  return out + diag.message;
}

ParseOutcome parse_workflow(std::string_view source) {
  ParseOutcome out;
  try {
    Parser parser(Lexer(source).run());
    out.ast = parser.workflow();
  } catch (const Failure& f) {
    out.diagnostics.push_back(f.diag);
  }
  return out;
}

WorkflowAst parse_workflow_or_throw(std::string_view source, std::string_view origin) {
  auto outcome = parse_workflow(source);
  if (!outcome.ok()) {
    throw Error(ErrorCode::kParse, format_diagnostic(outcome.diagnostics.front(), origin));
  }
  return std::move(*outcome.ast);
}

std::string format_workflow(const WorkflowAst& ast) {
  std::string out = "workflow " + ast.name + "(";
  for (std::size_t i = 0; i < ast.params.size(); ++i) {
    if (i) out += ", ";
    out += ast.params[i].name + ": " + std::string(column_type_name(ast.params[i].type));
  }
  out += "):\n";
  for (const auto& b : ast.bindings) out += "  " + b.name + " = " + format_expr(b.expr, false) + "\n";
  return out;
}

}  // namespace flexcloud
