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

#include "flexcloud/sql_compiler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "flexcloud/error.hpp"

namespace flexcloud {

std::optional<SqlDialect> parse_sql_dialect(std::string_view name) {
  if (name == "ansi" || name == "ANSI") return SqlDialect::kAnsi;
  return std::nullopt;
}

std::string SqlScript::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < statements.size(); ++i) {
    out += "-- statement " + std::to_string(i + 1) + "\n";
    out += statements[i] + ";\n";
  }
  return out;
}

std::string canonical_map_text(const RatingMap& map) {
  std::string out;
  for (const auto& [k, v] : map) {
    if (!out.empty()) out += ';';
    out += std::to_string(k);
    out += ':';
    out += format_double(v);
  }
  return out;
}

RatingMap parse_map_text(std::string_view text) {
  RatingMap out;
  if (text.empty()) return out;
  std::optional<std::int64_t> previous;
  std::size_t pos = 0;
  for (;;) {
    const auto end = std::min(text.find(';', pos), text.size());
    const std::string_view entry = text.substr(pos, end - pos);
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::kMapText, "map text entry '" + std::string(entry) + "' lacks ':'");
    }
    const std::string_view ks = entry.substr(0, colon);
    const std::string_view vs = entry.substr(colon + 1);
    std::int64_t key = 0;
    double value = 0;
    auto [kp, kec] = std::from_chars(ks.data(), ks.data() + ks.size(), key);
    auto [vp, vec] = std::from_chars(vs.data(), vs.data() + vs.size(), value);
    if (ks.empty() || kec != std::errc() || kp != ks.data() + ks.size() || vs.empty() ||
        vec != std::errc() || vp != vs.data() + vs.size() || !std::isfinite(value)) {
      throw Error(ErrorCode::kMapText, "malformed map text entry '" + std::string(entry) + "'");
    }
    if (previous && key <= *previous) {
      throw Error(ErrorCode::kMapText, "map text keys must be strictly ascending");
    }
    previous = key;
    out.emplace(key, value);
    if (end == text.size()) break;
    pos = end + 1;
  }
  return out;
}

namespace {

std::string quote_ident(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string sql_literal(const Value& v) {
  if (v.is_int()) return std::to_string(v.as_int());
  if (v.is_float()) {
    std::string s = format_double(v.as_float());
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
  }
  if (v.is_text()) {
    std::string out = "'";
    for (char c : v.as_text()) {
      if (c == '\'') out += '\'';
      out += c;
    }
    return out + "'";
  }
  return "NULL";
}

std::string_view sql_aggregate(Aggregation agg) {
  switch (agg) {
    case Aggregation::kMax: return "MAX";
    case Aggregation::kMean: return "AVG";
    case Aggregation::kSum: return "SUM";
  }
  return "MAX";
}

std::string udf_name(SimilarityFn fn) { return "sim_" + std::string(similarity_fn_name(fn)); }

// Comma-separated, alias-qualified column list.
std::string column_list(const RelationDef& def, std::string_view alias = {}) {
  std::string out;
  for (const auto& c : def.columns) {
    if (!out.empty()) out += ", ";
    if (!alias.empty()) out += std::string(alias) + ".";
    out += quote_ident(c.name);
  }
  return out;
}

struct Source {
  std::string table;
  RelationDef def;
  bool ranked = false;  // produced by recommend; ordered by _score then key
};

class Compiler {
 public:
  Compiler(const WorkflowAst& ast, const Schema& schema, const Params& params)
      : ast_(ast), schema_(schema), params_(params) {
    for (const auto& r : schema.relations) reserved_.insert(r.name);
  }

  SqlScript run() {
    for (const auto& b : ast_.bindings) {
      current_binding_ = b.name;
      Source src = compile(b.expr);
      src.def.name = b.name;
      bound_.insert_or_assign(b.name, src);
    }
    const Source& out = bound_.at(ast_.output().name);
    std::string order = quote_ident(kOrdinalColumn);
    if (out.ranked) {
      order = quote_ident(kScoreColumn) + " DESC, " + quote_ident(*out.def.primary_key) + " ASC";
    }
    script_.statements.push_back("SELECT " + column_list(out.def) + " FROM " + quote_ident(out.table) +
                                 " ORDER BY " + order);
    script_.output = out.def;
    std::sort(script_.required_udfs.begin(), script_.required_udfs.end());
    return std::move(script_);
  }

 private:
  std::string fresh_table() {
    std::string name;
    do {
      name = ast_.name + "_" + current_binding_ + "_" + std::to_string(++counter_);
    } while (reserved_.count(name));
    reserved_.insert(name);
    script_.temp_objects.push_back(name);
    return name;
  }

  void emit(std::string statement) { script_.statements.push_back(std::move(statement)); }

  static void check_layout(const RelationDef& def) {
    for (const auto& c : def.columns) {
      if (c.name == kOrdinalColumn) {
        throw Error(ErrorCode::kValidation, "column name '_ord' is reserved by the SQL compiler");
      }
    }
  }

  Source compile(const Expr& e) {
    Source s = std::visit([this](const auto& n) { return node(n); }, e.node);
    check_layout(s.def);
    return s;
  }

  Source node(const RelationRef& ref) {
    if (ref.is_binding) return bound_.at(ref.name);
    const RelationDef* def = schema_.find(ref.name);
    if (!def) throw Error(ErrorCode::kUnknownRelation, "unknown relation '" + ref.name + "'");
    return {def->name, *def, false};
  }

  Source node(const SelectNode& n) {
    const Source in = compile(*n.input);
    std::vector<ParamDecl> decls = ast_.params;
    const RelationDef def = select_def(in.def, n.predicate, decls);
    std::string where;
    for (const auto& c : n.predicate.conditions) {
      if (!where.empty()) where += " AND ";
      const Value* operand = nullptr;
      if (const auto* p = std::get_if<ParamRef>(&c.operand)) {
        const auto it = params_.find(p->name);
        if (it == params_.end()) throw Error(ErrorCode::kUnboundParam, "parameter '" + p->name + "' is not bound");
        operand = &it->second;
      } else {
        operand = &std::get<Value>(c.operand);
      }
      where += quote_ident(c.column) + " " + std::string(compare_op_text(c.op) == "!=" ? "<>" : compare_op_text(c.op)) +
               " " + sql_literal(*operand);
    }
    const std::string t = fresh_table();
    emit("CREATE TEMP TABLE " + quote_ident(t) + " AS SELECT " + column_list(def) + ", " +
         quote_ident(kOrdinalColumn) + " FROM " + quote_ident(in.table) + " WHERE " + where +
         " ORDER BY " + quote_ident(kOrdinalColumn));
    return {t, def, false};
  }

  Source node(const ProjectNode& n) {
    const Source in = compile(*n.input);
    const RelationDef def = project_def(in.def, n.columns);
    const std::string t = fresh_table();
    emit("CREATE TEMP TABLE " + quote_ident(t) + " AS SELECT " + column_list(def) + ", " +
         quote_ident(kOrdinalColumn) + " FROM " + quote_ident(in.table) + " ORDER BY " +
         quote_ident(kOrdinalColumn));
    return {t, def, false};
  }

  Source node(const JoinNode& n) {
    const Source l = compile(*n.left);
    const Source r = compile(*n.right);
    const RelationDef def = join_def(l.def, r.def, n.left_column, n.right_column);
    const auto ri = *r.def.column_index(n.right_column);
    const bool drop_right_key = r.def.columns[ri].name == n.left_column;
    std::string cols = column_list(l.def, "l");
    for (std::size_t c = 0; c < r.def.columns.size(); ++c) {
      if (c == ri && drop_right_key) continue;
      cols += ", r." + quote_ident(r.def.columns[c].name);
    }
    const std::string order = "l." + quote_ident(kOrdinalColumn) + ", r." + quote_ident(kOrdinalColumn);
    const std::string t = fresh_table();
    emit("CREATE TEMP TABLE " + quote_ident(t) + " AS SELECT " + cols + ", ROW_NUMBER() OVER (ORDER BY " +
         order + ") AS " + quote_ident(kOrdinalColumn) + " FROM " + quote_ident(l.table) + " AS l JOIN " +
         quote_ident(r.table) + " AS r ON l." + quote_ident(n.left_column) + " = r." +
         quote_ident(n.right_column) + " ORDER BY " + order);
    return {t, def, false};
  }

  Source node(const ExtendNode& n) {
    const Source a = compile(*n.input);
    const Source b = compile(*n.source);
    const RelationDef def =
        extend_def(a.def, b.def, n.group_key, n.attribute, n.key_column, n.value_column);
    const std::string g = quote_ident(n.group_key);
    const std::string k = quote_ident(n.key_column);
    const std::string v = quote_ident(n.value_column);
    const std::string ord = quote_ident(kOrdinalColumn);

    // Latest source row per (group, key) among rows with no nulls.
    const std::string latest = fresh_table();
    emit("CREATE TEMP TABLE " + quote_ident(latest) + " AS SELECT s." + g + " AS \"g\", s." + k +
         " AS \"k\", s." + v + " AS \"v\" FROM " + quote_ident(b.table) + " AS s WHERE s." + g +
         " IS NOT NULL AND s." + k + " IS NOT NULL AND s." + v +
         " IS NOT NULL AND NOT EXISTS (SELECT 1 FROM " + quote_ident(b.table) + " AS s2 WHERE s2." + g +
         " = s." + g + " AND s2." + k + " = s." + k + " AND s2." + v + " IS NOT NULL AND s2." + ord +
         " > s." + ord + ")");

    const std::string maps = fresh_table();
    emit("CREATE TEMP TABLE " + quote_ident(maps) +
         " AS SELECT \"g\", GROUP_CONCAT(\"entry\", ';') AS \"m\" FROM (SELECT \"g\", CAST(\"k\" AS TEXT) || ':' "
         "|| CAST(\"v\" AS TEXT) AS \"entry\" FROM " +
         quote_ident(latest) + " ORDER BY \"g\", \"k\") AS e GROUP BY \"g\"");

    const std::string t = fresh_table();
    emit("CREATE TEMP TABLE " + quote_ident(t) + " AS SELECT " + column_list(a.def, "a") +
         ", COALESCE(mm.\"m\", '') AS " + quote_ident(n.attribute) + ", a." + ord + " FROM " +
         quote_ident(a.table) + " AS a LEFT JOIN " + quote_ident(maps) + " AS mm ON mm.\"g\" = a." + g +
         " ORDER BY a." + ord);
    return {t, def, false};
  }

  Source node(const RecommendNode& n) {
    const Source c = compile(*n.candidates);
    const Source r = compile(*n.reference);
    const RelationDef def = recommend_def(c.def, r.def, n.mode);
    if (n.top && *n.top < 0) throw Error(ErrorCode::kValidation, "recommend: top must be non-negative");
    const std::string score = quote_ident(kScoreColumn);
    const std::string agg(sql_aggregate(n.agg));

    const std::string scored = fresh_table();
    if (const auto* sim = std::get_if<SimilarityMode>(&n.mode)) {
      const std::string fn = udf_name(sim->fn);
      if (std::find(script_.required_udfs.begin(), script_.required_udfs.end(), fn) ==
          script_.required_udfs.end()) {
        script_.required_udfs.push_back(fn);
      }
      emit("CREATE TEMP TABLE " + quote_ident(scored) + " AS SELECT " + column_list(c.def, "c") +
           ", COALESCE((SELECT " + agg + "(" + fn + "(c." + quote_ident(sim->candidate_column) + ", r." +
           quote_ident(sim->reference_column) + ")) FROM " + quote_ident(r.table) + " AS r), 0.0) AS " +
           score + " FROM " + quote_ident(c.table) + " AS c");
    } else {
      const auto& am = std::get<AggregateMode>(n.mode);
      const std::string groups = scored;
      const std::string m = quote_ident(am.reference_column);
      const std::string v = quote_ident(am.value_column);
      emit("CREATE TEMP TABLE " + quote_ident(groups) + " AS SELECT r." + m + " AS \"m\", " + agg +
           "(r." + v + ") AS \"a\" FROM " + quote_ident(r.table) + " AS r WHERE r." + m +
           " IS NOT NULL AND r." + v + " IS NOT NULL GROUP BY r." + m);
      const std::string joined = fresh_table();
      emit("CREATE TEMP TABLE " + quote_ident(joined) + " AS SELECT " + column_list(c.def, "c") +
           ", COALESCE(g.\"a\", 0.0) AS " + score + " FROM " + quote_ident(c.table) + " AS c LEFT JOIN " +
           quote_ident(groups) + " AS g ON g.\"m\" = c." + quote_ident(am.candidate_column));
      return rank(joined, def, n.top);
    }
    return rank(scored, def, n.top);
  }

  Source rank(const std::string& scored, const RelationDef& def, std::optional<std::int64_t> top) {
    const std::string order =
        quote_ident(kScoreColumn) + " DESC, " + quote_ident(*def.primary_key) + " ASC";
    const std::string t = fresh_table();
    std::string stmt = "CREATE TEMP TABLE " + quote_ident(t) + " AS SELECT " + column_list(def) +
                       ", ROW_NUMBER() OVER (ORDER BY " + order + ") AS " + quote_ident(kOrdinalColumn) +
                       " FROM " + quote_ident(scored) + " ORDER BY " + order;
    if (top) stmt += " LIMIT " + std::to_string(*top);
    emit(std::move(stmt));
    return {t, def, true};
  }

  const WorkflowAst& ast_;
  const Schema& schema_;
  const Params& params_;
  SqlScript script_;
  std::map<std::string, Source, std::less<>> bound_;
  std::set<std::string> reserved_;
  std::string current_binding_;
  std::size_t counter_ = 0;
};

}  // namespace

SqlScript compile_sql(const WorkflowAst& ast, const Schema& schema, const Params& args,
                      SqlDialect dialect) {
  if (dialect != SqlDialect::kAnsi) throw Error(ErrorCode::kUnsupportedDialect, "unsupported SQL dialect");
  const Params params = bind_params(ast, args);
  validate(ast, schema);
  return Compiler(ast, schema, params).run();
}

}  // namespace flexcloud
