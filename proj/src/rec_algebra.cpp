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

#include "flexcloud/rec_algebra.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "flexcloud/error.hpp"

namespace flexcloud {

std::string_view compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "=";
    case CompareOp::kNe: return "!=";
    case CompareOp::kLt: return "<";
    case CompareOp::kLe: return "<=";
    case CompareOp::kGt: return ">";
    case CompareOp::kGe: return ">=";
  }
  return "=";
}

std::string_view aggregation_name(Aggregation agg) {
  switch (agg) {
    case Aggregation::kMax: return "max";
    case Aggregation::kMean: return "mean";
    case Aggregation::kSum: return "sum";
  }
  return "max";
}

std::optional<Aggregation> parse_aggregation(std::string_view name) {
  if (name == "max") return Aggregation::kMax;
  if (name == "mean") return Aggregation::kMean;
  if (name == "sum") return Aggregation::kSum;
  return std::nullopt;
}

Aggregation default_aggregation(const RecommendMode& mode) {
  return std::holds_alternative<SimilarityMode>(mode) ? Aggregation::kMax : Aggregation::kMean;
}

// ---------------------------------------------------------------------------
// Parameters

namespace {

const ParamDecl* find_param(const std::vector<ParamDecl>& params, std::string_view name) {
  for (const auto& p : params) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace

Params bind_params(const WorkflowAst& ast, const Params& args) {
  for (const auto& [name, value] : args) {
    if (!find_param(ast.params, name)) {
      throw Error(ErrorCode::kUnknownParam,
                  "workflow '" + ast.name + "' has no parameter '" + name + "'");
    }
  }
  Params bound;
  for (const auto& p : ast.params) {
    const auto it = args.find(p.name);
    if (it == args.end()) {
      throw Error(ErrorCode::kUnboundParam, "parameter '" + p.name + "' is not bound");
    }
    Value v = it->second;
    if (p.type == ColumnType::kFloat && v.is_int()) v = Value(static_cast<double>(v.as_int()));
    if (v.is_null() || !value_matches_type(v, p.type)) {
      throw Error(ErrorCode::kParamType, "parameter '" + p.name + "' expects " +
                                             std::string(column_type_name(p.type)));
    }
    bound.emplace(p.name, std::move(v));
  }
  return bound;
}

Params parse_param_strings(const WorkflowAst& ast, const std::vector<std::string>& assignments) {
  Params args;
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kParamType, "parameter '" + a + "' must look like name=value");
    }
    const std::string name = a.substr(0, eq);
    const std::string text = a.substr(eq + 1);
    const ParamDecl* decl = find_param(ast.params, name);
    if (!decl) {
      throw Error(ErrorCode::kUnknownParam,
                  "workflow '" + ast.name + "' has no parameter '" + name + "'");
    }
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (decl->type == ColumnType::kInt) {
      std::int64_t v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || text.empty()) {
        throw Error(ErrorCode::kParamType, "parameter '" + name + "' expects int, got '" + text + "'");
      }
      args[name] = Value(v);
    } else if (decl->type == ColumnType::kFloat) {
      double v = 0;
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last || text.empty() || !std::isfinite(v)) {
        throw Error(ErrorCode::kParamType, "parameter '" + name + "' expects float, got '" + text + "'");
      }
      args[name] = Value(v);
    } else {
      args[name] = Value(text);
    }
  }
  return args;
}

// ---------------------------------------------------------------------------
// Layouts

namespace {

std::size_t require_column(const RelationDef& def, std::string_view column) {
  const auto idx = def.column_index(column);
  if (!idx) {
    throw Error(ErrorCode::kUnknownColumn,
                "relation '" + def.name + "' has no column '" + std::string(column) + "'");
  }
  return *idx;
}

bool operand_compatible(ColumnType column, ColumnType operand) {
  if (column == ColumnType::kMap || operand == ColumnType::kMap) return false;
  if (is_numeric(column)) return is_numeric(operand);
  return column == operand;
}

std::optional<ColumnType> literal_type(const Value& v) {
  if (v.is_int()) return ColumnType::kInt;
  if (v.is_float()) return ColumnType::kFloat;
  if (v.is_text()) return ColumnType::kText;
  return std::nullopt;
}

void require_joinable(const ColumnDef& a, const ColumnDef& b, ErrorCode code) {
  if (a.type != b.type || a.type == ColumnType::kMap) {
    throw Error(code, "columns '" + a.name + "' (" + std::string(column_type_name(a.type)) +
                          ") and '" + b.name + "' (" + std::string(column_type_name(b.type)) +
                          ") cannot be matched");
  }
}

}  // namespace

RelationDef select_def(const RelationDef& input, const Predicate& predicate,
                       const std::vector<ParamDecl>& params) {
  for (const auto& c : predicate.conditions) {
    const auto& col = input.columns[require_column(input, c.column)];
    std::optional<ColumnType> operand;
    if (const auto* p = std::get_if<ParamRef>(&c.operand)) {
      const ParamDecl* decl = find_param(params, p->name);
      if (!decl) throw Error(ErrorCode::kUnboundParam, "undeclared parameter '$" + p->name + "'");
      operand = decl->type;
    } else {
      operand = literal_type(std::get<Value>(c.operand));
    }
    if (!operand || !operand_compatible(col.type, *operand)) {
      throw Error(ErrorCode::kTypeMismatch,
                  "cannot compare column '" + c.column + "' of type " +
                      std::string(column_type_name(col.type)) + " with that operand");
    }
  }
  return input;
}

RelationDef project_def(const RelationDef& input, const std::vector<std::string>& columns) {
  RelationDef out;
  out.name = input.name;
  std::set<std::string> seen;
  for (const auto& c : columns) {
    const auto idx = require_column(input, c);
    if (!seen.insert(c).second) {
      throw Error(ErrorCode::kNameCollision, "column '" + c + "' projected twice");
    }
    out.columns.push_back(input.columns[idx]);
  }
  if (input.primary_key && seen.count(*input.primary_key)) out.primary_key = input.primary_key;
  return out;
}

RelationDef join_def(const RelationDef& left, const RelationDef& right, std::string_view left_column,
                     std::string_view right_column) {
  const auto li = require_column(left, left_column);
  const auto ri = require_column(right, right_column);
  require_joinable(left.columns[li], right.columns[ri], ErrorCode::kTypeMismatch);
  RelationDef out;
  out.name = left.name;
  out.columns = left.columns;
  for (std::size_t c = 0; c < right.columns.size(); ++c) {
    const auto& col = right.columns[c];
    if (c == ri && col.name == left_column) continue;  // shared join column appears once
    if (left.column_index(col.name)) {
      throw Error(ErrorCode::kNameCollision,
                  "join: column '" + col.name + "' exists on both sides; project one away first");
    }
    out.columns.push_back(col);
  }
  return out;
}

RelationDef extend_def(const RelationDef& input, const RelationDef& source, std::string_view group_key,
                       std::string_view attribute, std::string_view key_column,
                       std::string_view value_column) {
  const auto ag = require_column(input, group_key);
  const auto bg = require_column(source, group_key);
  require_joinable(input.columns[ag], source.columns[bg], ErrorCode::kTypeMismatch);
  const auto& key = source.columns[require_column(source, key_column)];
  if (key.type != ColumnType::kInt) {
    throw Error(ErrorCode::kTypeMismatch, "extend: map key column '" + key.name + "' must be int");
  }
  const auto& value = source.columns[require_column(source, value_column)];
  if (!is_numeric(value.type)) {
    throw Error(ErrorCode::kTypeMismatch, "extend: map value column '" + value.name + "' must be numeric");
  }
  if (input.column_index(attribute)) {
    throw Error(ErrorCode::kNameCollision,
                "extend: relation already has a column '" + std::string(attribute) + "'");
  }
  RelationDef out = input;
  out.columns.push_back({std::string(attribute), ColumnType::kMap});
  return out;
}

RelationDef recommend_def(const RelationDef& candidates, const RelationDef& reference,
                          const RecommendMode& mode) {
  if (!candidates.primary_key_index()) {
    throw Error(ErrorCode::kValidation,
                "recommend: candidates need a primary key to break ties (joins drop it)");
  }
  if (candidates.column_index(kScoreColumn)) {
    throw Error(ErrorCode::kNameCollision, "recommend: candidates already carry a _score column");
  }
  if (const auto* sim = std::get_if<SimilarityMode>(&mode)) {
    const auto& c = candidates.columns[require_column(candidates, sim->candidate_column)];
    const auto& r = reference.columns[require_column(reference, sim->reference_column)];
    const ColumnType want = sim->fn == SimilarityFn::kJaccard ? ColumnType::kText : ColumnType::kMap;
    if (c.type != want || r.type != want) {
      throw Error(ErrorCode::kModeType,
                  "recommend: " + std::string(similarity_fn_name(sim->fn)) + " compares " +
                      std::string(column_type_name(want)) + " columns, got " +
                      std::string(column_type_name(c.type)) + " and " +
                      std::string(column_type_name(r.type)));
    }
  } else {
    const auto& agg = std::get<AggregateMode>(mode);
    const auto& c = candidates.columns[require_column(candidates, agg.candidate_column)];
    const auto& r = reference.columns[require_column(reference, agg.reference_column)];
    require_joinable(c, r, ErrorCode::kModeType);
    const auto& v = reference.columns[require_column(reference, agg.value_column)];
    if (!is_numeric(v.type)) {
      throw Error(ErrorCode::kModeType, "recommend: aggregated column '" + v.name + "' must be numeric");
    }
  }
  RelationDef out = candidates;
  out.columns.push_back({std::string(kScoreColumn), ColumnType::kFloat});
  return out;
}

// ---------------------------------------------------------------------------
// Operators

namespace {

bool condition_holds(const Value& lhs, CompareOp op, const Value& rhs) {
  const auto c = compare_values(lhs, rhs);
  if (!c) return false;
  switch (op) {
    case CompareOp::kEq: return *c == 0;
    case CompareOp::kNe: return *c != 0;
    case CompareOp::kLt: return *c < 0;
    case CompareOp::kLe: return *c <= 0;
    case CompareOp::kGt: return *c > 0;
    case CompareOp::kGe: return *c >= 0;
  }
  return false;
}

struct KeyLess {
  bool operator()(const Value& a, const Value& b) const { return key_order(a, b) < 0; }
};

}  // namespace

Relation op_select(const Relation& input, const Predicate& predicate, const Params& params) {
  std::vector<ParamDecl> decls;
  std::vector<std::pair<std::size_t, const Value*>> resolved;
  for (const auto& c : predicate.conditions) {
    const Value* operand = nullptr;
    if (const auto* p = std::get_if<ParamRef>(&c.operand)) {
      const auto it = params.find(p->name);
      if (it == params.end()) throw Error(ErrorCode::kUnboundParam, "parameter '" + p->name + "' is not bound");
      const auto t = literal_type(it->second);
      if (!t) throw Error(ErrorCode::kParamType, "parameter '" + p->name + "' has no usable value");
      decls.push_back({p->name, *t});
      operand = &it->second;
    } else {
      operand = &std::get<Value>(c.operand);
    }
    resolved.emplace_back(0, operand);
  }
  RelationDef def = select_def(input.def, predicate, decls);
  for (std::size_t i = 0; i < predicate.conditions.size(); ++i) {
    resolved[i].first = *def.column_index(predicate.conditions[i].column);
  }
  Relation out{std::move(def), {}};
  for (const auto& t : input.tuples) {
    bool keep = true;
    for (std::size_t i = 0; i < resolved.size() && keep; ++i) {
      keep = condition_holds(t[resolved[i].first], predicate.conditions[i].op, *resolved[i].second);
    }
    if (keep) out.tuples.push_back(t);
  }
  return out;
}

Relation op_project(const Relation& input, const std::vector<std::string>& columns) {
  Relation out{project_def(input.def, columns), {}};
  std::vector<std::size_t> idx;
  for (const auto& c : columns) idx.push_back(*input.def.column_index(c));
  out.tuples.reserve(input.tuples.size());
  for (const auto& t : input.tuples) {
    Tuple row;
    row.reserve(idx.size());
    for (auto i : idx) row.push_back(t[i]);
    out.tuples.push_back(std::move(row));
  }
  return out;
}

Relation op_join(const Relation& left, const Relation& right, std::string_view left_column,
                 std::string_view right_column) {
  Relation out{join_def(left.def, right.def, left_column, right_column), {}};
  const auto li = *left.def.column_index(left_column);
  const auto ri = *right.def.column_index(right_column);
  const bool drop_right_key = right.def.columns[ri].name == left_column;
  std::map<Value, std::vector<std::size_t>, KeyLess> by_key;
  for (std::size_t r = 0; r < right.tuples.size(); ++r) {
    const Value& k = right.tuples[r][ri];
    if (!k.is_null()) by_key[k].push_back(r);
  }
  for (const auto& lt : left.tuples) {
    const Value& k = lt[li];
    if (k.is_null()) continue;
    const auto it = by_key.find(k);
    if (it == by_key.end()) continue;
    for (std::size_t r : it->second) {
      Tuple row = lt;
      const auto& rt = right.tuples[r];
      for (std::size_t c = 0; c < rt.size(); ++c) {
        if (c == ri && drop_right_key) continue;
        row.push_back(rt[c]);
      }
      out.tuples.push_back(std::move(row));
    }
  }
  return out;
}

Relation op_extend(const Relation& input, const Relation& source, std::string_view group_key,
                   std::string_view attribute, std::string_view key_column,
                   std::string_view value_column) {
  Relation out{extend_def(input.def, source.def, group_key, attribute, key_column, value_column), {}};
  const auto ag = *input.def.column_index(group_key);
  const auto bg = *source.def.column_index(group_key);
  const auto bk = *source.def.column_index(key_column);
  const auto bv = *source.def.column_index(value_column);
  std::map<Value, RatingMap, KeyLess> groups;
  for (const auto& t : source.tuples) {
    if (t[bg].is_null() || t[bk].is_null() || t[bv].is_null()) continue;
    // Later rows overwrite earlier ones for the same key.
    groups[t[bg]][t[bk].as_int()] = t[bv].as_number();
  }
  out.tuples.reserve(input.tuples.size());
  for (const auto& t : input.tuples) {
    Tuple row = t;
    RatingMap m;
    if (!t[ag].is_null()) {
      const auto it = groups.find(t[ag]);
      if (it != groups.end()) m = it->second;
    }
    row.emplace_back(std::move(m));
    out.tuples.push_back(std::move(row));
  }
  return out;
}

namespace {

class Accumulator {
 public:
  explicit Accumulator(Aggregation agg) : agg_(agg) {}
  void add(double v) {
    if (count_ == 0 || v > max_) max_ = v;
    sum_ += v;
    ++count_;
  }
  double result() const {
    if (count_ == 0) return 0.0;
    switch (agg_) {
      case Aggregation::kMax: return max_;
      case Aggregation::kSum: return sum_;
      case Aggregation::kMean: return sum_ / static_cast<double>(count_);
    }
    return 0.0;
  }

 private:
  Aggregation agg_;
  double sum_ = 0.0;
  double max_ = 0.0;
  std::size_t count_ = 0;
};

const RatingMap& map_or_empty(const Value& v) {
  static const RatingMap kEmpty;
  return v.is_map() ? v.as_map() : kEmpty;
}

}  // namespace

Relation op_recommend(const Relation& candidates, const Relation& reference,
                      const RecommendMode& mode, Aggregation agg, std::optional<std::int64_t> top) {
  Relation out{recommend_def(candidates.def, reference.def, mode), {}};
  if (top && *top < 0) throw Error(ErrorCode::kValidation, "recommend: top must be non-negative");
  std::vector<double> scores(candidates.tuples.size(), 0.0);

  if (const auto* sim = std::get_if<SimilarityMode>(&mode)) {
    const auto ci = *candidates.def.column_index(sim->candidate_column);
    const auto ri = *reference.def.column_index(sim->reference_column);
    if (sim->fn == SimilarityFn::kJaccard) {
      std::vector<TokenList> refs;
      refs.reserve(reference.tuples.size());
      for (const auto& r : reference.tuples) {
        refs.push_back(r[ri].is_text() ? tokenize(r[ri].as_text()) : TokenList{});
      }
      for (std::size_t c = 0; c < candidates.tuples.size(); ++c) {
        const Value& v = candidates.tuples[c][ci];
        const TokenList tokens = v.is_text() ? tokenize(v.as_text()) : TokenList{};
        Accumulator acc(agg);
        for (const auto& r : refs) acc.add(sim_jaccard(tokens, r));
        scores[c] = acc.result();
      }
    } else {
      const auto fn = sim->fn == SimilarityFn::kPearson ? &sim_pearson : &sim_inv_euclidean;
      for (std::size_t c = 0; c < candidates.tuples.size(); ++c) {
        const RatingMap& m = map_or_empty(candidates.tuples[c][ci]);
        Accumulator acc(agg);
        for (const auto& r : reference.tuples) acc.add(fn(m, map_or_empty(r[ri])));
        scores[c] = acc.result();
      }
    }
  } else {
    const auto& am = std::get<AggregateMode>(mode);
    const auto ci = *candidates.def.column_index(am.candidate_column);
    const auto ri = *reference.def.column_index(am.reference_column);
    const auto vi = *reference.def.column_index(am.value_column);
    std::map<Value, std::vector<double>, KeyLess> groups;
    for (const auto& r : reference.tuples) {
      if (r[ri].is_null() || r[vi].is_null()) continue;
      groups[r[ri]].push_back(r[vi].as_number());
    }
    for (std::size_t c = 0; c < candidates.tuples.size(); ++c) {
      const Value& k = candidates.tuples[c][ci];
      if (k.is_null()) continue;
      const auto it = groups.find(k);
      if (it == groups.end()) continue;
      Accumulator acc(agg);
      for (double v : it->second) acc.add(v);
      scores[c] = acc.result();
    }
  }

  const auto pk = *candidates.def.primary_key_index();
  std::vector<std::size_t> order(candidates.tuples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return key_order(candidates.tuples[a][pk], candidates.tuples[b][pk]) < 0;
  });
  std::size_t keep = order.size();
  if (top) keep = std::min<std::size_t>(keep, static_cast<std::size_t>(*top));
  out.tuples.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    Tuple row = candidates.tuples[order[i]];
    row.emplace_back(scores[order[i]]);
    out.tuples.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Workflows

namespace {

// Shared structural checks: unique binding names, references resolve.
void check_bindings(const WorkflowAst& ast) {
  if (ast.bindings.empty()) throw Error(ErrorCode::kValidation, "workflow '" + ast.name + "' has no bindings");
  std::set<std::string> names;
  for (const auto& b : ast.bindings) {
    if (!names.insert(b.name).second) {
      throw Error(ErrorCode::kValidation, "binding '" + b.name + "' is defined twice");
    }
  }
  std::set<std::string> params;
  for (const auto& p : ast.params) {
    if (!params.insert(p.name).second) {
      throw Error(ErrorCode::kValidation, "parameter '" + p.name + "' is declared twice");
    }
  }
}

class LayoutChecker {
 public:
  LayoutChecker(const WorkflowAst& ast, const Schema& schema) : ast_(ast), schema_(schema) {}

  std::vector<RelationDef> run() {
    check_bindings(ast_);
    std::vector<RelationDef> out;
    for (const auto& b : ast_.bindings) {
      RelationDef def = infer(b.expr);
      def.name = b.name;
      bound_.emplace(b.name, def);
      out.push_back(std::move(def));
    }
    return out;
  }

 private:
  RelationDef infer(const Expr& expr) {
    return std::visit([this](const auto& node) { return infer_node(node); }, expr.node);
  }

  RelationDef infer_node(const RelationRef& ref) {
    if (ref.is_binding) {
      const auto it = bound_.find(ref.name);
      if (it == bound_.end()) {
        throw Error(ErrorCode::kValidation, "binding '" + ref.name + "' used before it is defined");
      }
      return it->second;
    }
    const RelationDef* def = schema_.find(ref.name);
    if (!def) throw Error(ErrorCode::kUnknownRelation, "unknown relation '" + ref.name + "'");
    return *def;
  }
  RelationDef infer_node(const SelectNode& n) {
    return select_def(infer(*n.input), n.predicate, ast_.params);
  }
  RelationDef infer_node(const ProjectNode& n) { return project_def(infer(*n.input), n.columns); }
  RelationDef infer_node(const JoinNode& n) {
    return join_def(infer(*n.left), infer(*n.right), n.left_column, n.right_column);
  }
  RelationDef infer_node(const ExtendNode& n) {
    return extend_def(infer(*n.input), infer(*n.source), n.group_key, n.attribute, n.key_column,
                      n.value_column);
  }
  RelationDef infer_node(const RecommendNode& n) {
    if (n.top && *n.top < 0) throw Error(ErrorCode::kValidation, "recommend: top must be non-negative");
    return recommend_def(infer(*n.candidates), infer(*n.reference), n.mode);
  }

  const WorkflowAst& ast_;
  const Schema& schema_;
  std::map<std::string, RelationDef, std::less<>> bound_;
};

class Evaluator {
 public:
  Evaluator(const Store& store, const Params& params) : store_(store), params_(params) {}

  Relation eval(const Expr& expr) {
    return std::visit([this](const auto& node) { return eval_node(node); }, expr.node);
  }
  void bind(const std::string& name, Relation rel) { bound_.insert_or_assign(name, std::move(rel)); }

 private:
  Relation eval_node(const RelationRef& ref) {
    if (ref.is_binding) return bound_.at(ref.name);
    const Relation* rel = store_.find(ref.name);
    if (!rel) throw Error(ErrorCode::kUnknownRelation, "unknown relation '" + ref.name + "'");
    return *rel;
  }
  Relation eval_node(const SelectNode& n) { return op_select(eval(*n.input), n.predicate, params_); }
  Relation eval_node(const ProjectNode& n) { return op_project(eval(*n.input), n.columns); }
  Relation eval_node(const JoinNode& n) {
    return op_join(eval(*n.left), eval(*n.right), n.left_column, n.right_column);
  }
  Relation eval_node(const ExtendNode& n) {
    return op_extend(eval(*n.input), eval(*n.source), n.group_key, n.attribute, n.key_column,
                     n.value_column);
  }
  Relation eval_node(const RecommendNode& n) {
    return op_recommend(eval(*n.candidates), eval(*n.reference), n.mode, n.agg, n.top);
  }

  const Store& store_;
  const Params& params_;
  std::map<std::string, Relation, std::less<>> bound_;
};

}  // namespace

std::vector<RelationDef> validate(const WorkflowAst& ast, const Schema& schema) {
  return LayoutChecker(ast, schema).run();
}

Relation eval_workflow(const Store& store, const WorkflowAst& ast, const Params& args) {
  const Params params = bind_params(ast, args);
  validate(ast, store.schema());
  Evaluator ev(store, params);
  Relation last;
  for (const auto& b : ast.bindings) {
    Relation rel = ev.eval(b.expr);
    rel.def.name = b.name;
    last = rel;
    ev.bind(b.name, std::move(rel));
  }
  return last;
}

}  // namespace flexcloud
