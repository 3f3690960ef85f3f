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

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flexcloud/relstore.hpp"
#include "flexcloud/textkit.hpp"

namespace flexcloud {

// Heap cell with value semantics: copies are deep, == compares contents.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;

  const T& operator*() const { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

inline constexpr std::string_view kScoreColumn = "_score";

enum class CompareOp { kEq, kNe, kLt, kLe, kGt, kGe };
std::string_view compare_op_text(CompareOp op);

enum class Aggregation { kMax, kMean, kSum };
std::string_view aggregation_name(Aggregation agg);
std::optional<Aggregation> parse_aggregation(std::string_view name);

struct ParamRef {
  std::string name;
  friend bool operator==(const ParamRef&, const ParamRef&) = default;
};

struct Condition {
  std::string column;
  CompareOp op = CompareOp::kEq;
  std::variant<Value, ParamRef> operand;  // literal Int/Float/Text or $param

  friend bool operator==(const Condition&, const Condition&) = default;
};

// Conjunction of conditions.
struct Predicate {
  std::vector<Condition> conditions;
  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Expr;

// Name of a base relation or an earlier binding; the parser decides which.
struct RelationRef {
  std::string name;
  bool is_binding = false;
  friend bool operator==(const RelationRef&, const RelationRef&) = default;
};

struct SelectNode {
  Box<Expr> input;
  Predicate predicate;
  friend bool operator==(const SelectNode&, const SelectNode&) = default;
};

struct ProjectNode {
  Box<Expr> input;
  std::vector<std::string> columns;
  friend bool operator==(const ProjectNode&, const ProjectNode&) = default;
};

struct JoinNode {
  Box<Expr> left;
  Box<Expr> right;
  std::string left_column;
  std::string right_column;
  friend bool operator==(const JoinNode&, const JoinNode&) = default;
};

// Attaches to each input tuple the map key_column -> value_column built from
// the source rows sharing its group_key.
struct ExtendNode {
  Box<Expr> input;
  Box<Expr> source;
  std::string attribute;
  std::string group_key;
  std::string key_column;
  std::string value_column;
  friend bool operator==(const ExtendNode&, const ExtendNode&) = default;
};

struct SimilarityMode {
  std::string candidate_column;
  std::string reference_column;
  SimilarityFn fn = SimilarityFn::kJaccard;
  friend bool operator==(const SimilarityMode&, const SimilarityMode&) = default;
};

// score(c) = agg of reference.value_column over reference rows whose
// reference_column equals c.candidate_column.
struct AggregateMode {
  std::string value_column;
  std::string candidate_column;
  std::string reference_column;
  friend bool operator==(const AggregateMode&, const AggregateMode&) = default;
};

using RecommendMode = std::variant<SimilarityMode, AggregateMode>;

struct RecommendNode {
  Box<Expr> candidates;
  Box<Expr> reference;
  RecommendMode mode;
  Aggregation agg = Aggregation::kMax;
  std::optional<std::int64_t> top;
  friend bool operator==(const RecommendNode&, const RecommendNode&) = default;
};

struct Expr {
  std::variant<RelationRef, SelectNode, ProjectNode, JoinNode, ExtendNode, RecommendNode> node;
  friend bool operator==(const Expr&, const Expr&) = default;
};

struct Binding {
  std::string name;
  Expr expr;
  friend bool operator==(const Binding&, const Binding&) = default;
};

struct ParamDecl {
  std::string name;
  ColumnType type = ColumnType::kInt;
  friend bool operator==(const ParamDecl&, const ParamDecl&) = default;
};

// A FlexRecs workflow: ordered bindings, the last one is the output.
struct WorkflowAst {
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<Binding> bindings;

  const Binding& output() const { return bindings.back(); }
  friend bool operator==(const WorkflowAst&, const WorkflowAst&) = default;
};

Aggregation default_aggregation(const RecommendMode& mode);

using Params = std::map<std::string, Value, std::less<>>;

// Checks arguments against the declared parameters. Int arguments bound to a
// float parameter are widened. Throws kUnboundParam, kUnknownParam or
// kParamType.
Params bind_params(const WorkflowAst& ast, const Params& args);

// Parses "k=v" style text arguments according to the declared types.
Params parse_param_strings(const WorkflowAst& ast, const std::vector<std::string>& assignments);

// Output layout of every binding, in order. Throws on any schema violation.
std::vector<RelationDef> validate(const WorkflowAst& ast, const Schema& schema);

// Relational operators. Each checks its inputs and throws kUnknownColumn,
// kTypeMismatch, kNameCollision, kModeType or kValidation.
Relation op_select(const Relation& input, const Predicate& predicate, const Params& params = {});
Relation op_project(const Relation& input, const std::vector<std::string>& columns);
Relation op_join(const Relation& left, const Relation& right, std::string_view left_column,
                 std::string_view right_column);
Relation op_extend(const Relation& input, const Relation& source, std::string_view group_key,
                   std::string_view attribute, std::string_view key_column,
                   std::string_view value_column);
Relation op_recommend(const Relation& candidates, const Relation& reference,
                      const RecommendMode& mode, Aggregation agg, std::optional<std::int64_t> top);

// Layout helpers shared with validation and SQL compilation.
RelationDef select_def(const RelationDef& input, const Predicate& predicate,
                       const std::vector<ParamDecl>& params);
RelationDef project_def(const RelationDef& input, const std::vector<std::string>& columns);
RelationDef join_def(const RelationDef& left, const RelationDef& right, std::string_view left_column,
                     std::string_view right_column);
RelationDef extend_def(const RelationDef& input, const RelationDef& source, std::string_view group_key,
                       std::string_view attribute, std::string_view key_column,
                       std::string_view value_column);
RelationDef recommend_def(const RelationDef& candidates, const RelationDef& reference,
                          const RecommendMode& mode);

// Evaluates the workflow on the store and returns the output binding.
Relation eval_workflow(const Store& store, const WorkflowAst& ast, const Params& args);

}  // namespace flexcloud
