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

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "flexcloud/data_cloud.hpp"

namespace flexcloud::oracle {

namespace {

bool word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

std::vector<std::string> split_words(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Occurrences of a unigram or bigram term inside one token list.
std::size_t count_in(const std::vector<std::string>& tokens, const std::vector<std::string>& term) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + term.size() <= tokens.size(); ++i) {
    bool same = true;
    for (std::size_t j = 0; j < term.size(); ++j) same = same && tokens[i + j] == term[j];
    if (same) ++n;
  }
  return n;
}

bool same_key(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return false;
  if (a.is_numeric() && b.is_numeric()) return a.as_number() == b.as_number();
  if (a.is_text() && b.is_text()) return a.as_text() == b.as_text();
  return false;
}

bool id_less(const Value& a, const Value& b) {
  if (a.is_null() != b.is_null()) return a.is_null();
  if (a.is_int() && b.is_int()) return a.as_int() < b.as_int();
  if (a.is_text() && b.is_text()) return a.as_text() < b.as_text();
  return false;
}

std::size_t col(const Relation& r, const std::string& name) {
  for (std::size_t i = 0; i < r.def.columns.size(); ++i) {
    if (r.def.columns[i].name == name) return i;
  }
  throw std::runtime_error("oracle: no column " + name + " in " + r.def.name);
}

const Relation& base(const Store& store, const std::string& name) {
  for (const auto& r : store.relations()) {
    if (r.def.name == name) return r;
  }
  throw std::runtime_error("oracle: no relation " + name);
}

// A field of an entity: its label, weight and one token list per row.
struct ScanField {
  std::string label;
  double weight;
  std::vector<std::vector<std::string>> rows;
};

struct ScanEntity {
  Value id;
  std::vector<ScanField> fields;
};

std::vector<ScanEntity> assemble(const Store& store, const EntitySpec& spec) {
  const Relation& root = base(store, spec.root);
  const std::size_t pk = col(root, *root.def.primary_key);
  std::vector<ScanEntity> out;
  for (const auto& tuple : root.tuples) {
    ScanEntity e{tuple[pk], {}};
    for (const auto& f : spec.root_fields) {
      ScanField sf{f.column, f.weight, {}};
      const Value& v = tuple[col(root, f.column)];
      if (v.is_text()) sf.rows.push_back(naive_tokenize(v.as_text()));
      e.fields.push_back(sf);
    }
    for (const auto& part : spec.parts) {
      const Relation& rel = base(store, part.relation);
      for (const auto& f : part.fields) {
        ScanField sf{part.relation + "." + f.column, f.weight, {}};
        for (const auto& row : rel.tuples) {
          if (!same_key(tuple[col(root, part.root_column)], row[col(rel, part.part_column)])) continue;
          const Value& v = row[col(rel, f.column)];
          if (v.is_text()) sf.rows.push_back(naive_tokenize(v.as_text()));
        }
        e.fields.push_back(sf);
      }
    }
    out.push_back(e);
  }
  return out;
}

std::size_t field_tf(const ScanField& f, const std::vector<std::string>& term) {
  std::size_t n = 0;
  for (const auto& row : f.rows) n += count_in(row, term);
  return n;
}

// Every unigram and bigram of one entity with its total count.
std::map<std::string, std::size_t> all_terms(const ScanEntity& e) {
  std::map<std::string, std::size_t> out;
  for (const auto& f : e.fields) {
    for (const auto& row : f.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        ++out[row[i]];
        if (i + 1 < row.size()) ++out[row[i] + " " + row[i + 1]];
      }
    }
  }
  return out;
}

}  // namespace

std::vector<std::string> naive_tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (word_byte(c)) {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : ch;
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

double naive_jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end());
  std::set<std::string> sb(b.begin(), b.end());
  std::set<std::string> all = sa;
  all.insert(sb.begin(), sb.end());
  if (all.empty()) return 0.0;
  std::size_t both = 0;
  for (const auto& t : sa) both += sb.count(t);
  return static_cast<double>(both) / static_cast<double>(all.size());
}

double naive_inv_euclidean(const RatingMap& u, const RatingMap& v) {
  double sq = 0.0;
  bool any = false;
  for (const auto& [k, a] : u) {
    const auto it = v.find(k);
    if (it == v.end()) continue;
    any = true;
    sq += (a - it->second) * (a - it->second);
  }
  return any ? 1.0 / (1.0 + std::sqrt(sq)) : 0.0;
}

// Textbook single-pass form, deliberately different from the library.
double naive_pearson(const RatingMap& u, const RatingMap& v) {
  std::vector<std::pair<double, double>> pairs;
  for (const auto& [k, a] : u) {
    if (v.count(k)) pairs.emplace_back(a, v.at(k));
  }
  if (pairs.size() < 2) return 0.0;
  bool x_const = true;
  bool y_const = true;
  for (const auto& p : pairs) {
    x_const = x_const && p.first == pairs[0].first;
    y_const = y_const && p.second == pairs[0].second;
  }
  if (x_const || y_const) return 0.0;
  // Extended precision keeps the sum-of-squares formula from cancelling
  // badly when only two points are shared.
  const long double n = static_cast<long double>(pairs.size());
  long double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (const auto& [x, y] : pairs) {
    const long double lx = x, ly = y;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    syy += ly * ly;
    sxy += lx * ly;
  }
  const long double num = n * sxy - sx * sy;
  const long double den = std::sqrt(n * sxx - sx * sx) * std::sqrt(n * syy - sy * sy);
  return std::max(-1.0, std::min(1.0, static_cast<double>(num / den)));
}

std::vector<ScanHit> scan_search(const Store& store, const EntitySpec& spec,
                                 const std::vector<std::string>& terms) {
  std::vector<ScanHit> hits;
  for (const auto& e : assemble(store, spec)) {
    bool all = true;
    double score = 0.0;
    std::vector<bool> touched(e.fields.size(), false);
    for (const auto& t : terms) {
      const auto words = split_words(t);
      bool found = false;
      for (std::size_t f = 0; f < e.fields.size(); ++f) {
        const std::size_t tf = field_tf(e.fields[f], words);
        if (tf == 0) continue;
        found = true;
        touched[f] = true;
        score += e.fields[f].weight * static_cast<double>(tf);
      }
      all = all && found;
    }
    if (!all) continue;
    ScanHit h{e.id, score, {}};
    for (std::size_t f = 0; f < e.fields.size(); ++f) {
      if (touched[f]) h.fields.push_back(e.fields[f].label);
    }
    hits.push_back(h);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const ScanHit& a, const ScanHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return id_less(a.id, b.id);
  });
  return hits;
}

std::vector<ScanCloudTerm> scan_cloud(const Store& store, const EntitySpec& spec,
                                      const std::vector<ScanHit>& hits,
                                      const std::vector<std::string>& query_terms, std::size_t k) {
  const auto entities = assemble(store, spec);
  std::vector<std::map<std::string, std::size_t>> counts;
  for (const auto& e : entities) counts.push_back(all_terms(e));

  std::map<std::string, std::size_t> tf_in_hits;
  std::map<std::string, std::size_t> docs_in_hits;
  for (const auto& h : hits) {
    for (std::size_t i = 0; i < entities.size(); ++i) {
      if (!same_key(entities[i].id, h.id)) continue;
      for (const auto& [t, n] : counts[i]) {
        tf_in_hits[t] += n;
        docs_in_hits[t] += 1;
      }
    }
  }
  std::vector<ScanCloudTerm> out;
  for (const auto& [t, tf] : tf_in_hits) {
    const auto words = split_words(t);
    bool ok = true;
    for (const auto& w : words) ok = ok && !is_stopword(w);
    for (const auto& q : query_terms) ok = ok && q != t;
    if (!ok) continue;
    std::size_t df = 0;
    for (const auto& c : counts) df += c.count(t);
    const double n = static_cast<double>(entities.size());
    out.push_back({t, static_cast<double>(tf) * std::log(1.0 + n / static_cast<double>(df)), docs_in_hits[t]});
  }
  std::stable_sort(out.begin(), out.end(), [](const ScanCloudTerm& a, const ScanCloudTerm& b) {
    return a.weight > b.weight;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

// ---------------------------------------------------------------------------
// Naive workflow interpreter

namespace {

bool satisfies(const Value& cell, CompareOp op, const Value& operand) {
  if (cell.is_null() || operand.is_null()) return false;
  int c = 0;
  if (cell.is_numeric() && operand.is_numeric()) {
    const double a = cell.as_number();
    const double b = operand.as_number();
    if (cell.is_int() && operand.is_int()) {
      c = cell.as_int() < operand.as_int() ? -1 : cell.as_int() > operand.as_int() ? 1 : 0;
    } else {
      c = a < b ? -1 : a > b ? 1 : 0;
    }
  } else if (cell.is_text() && operand.is_text()) {
    const int r = cell.as_text().compare(operand.as_text());
    c = r < 0 ? -1 : r > 0 ? 1 : 0;
  } else {
    return false;
  }
  switch (op) {
    case CompareOp::kEq: return c == 0;
    case CompareOp::kNe: return c != 0;
    case CompareOp::kLt: return c < 0;
    case CompareOp::kLe: return c <= 0;
    case CompareOp::kGt: return c > 0;
    case CompareOp::kGe: return c >= 0;
  }
  return false;
}

double aggregate(Aggregation agg, const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  if (agg == Aggregation::kMax) return *std::max_element(xs.begin(), xs.end());
  double s = 0.0;
  for (double x : xs) s += x;
  return agg == Aggregation::kSum ? s : s / static_cast<double>(xs.size());
}

struct Naive {
  const Store& store;
  const Params& params;
  std::map<std::string, Relation> env;

  Relation eval(const Expr& e) {
    return std::visit([&](const auto& n) { return run(n); }, e.node);
  }

  Relation run(const RelationRef& r) {
    if (r.is_binding) return env.at(r.name);
    return base(store, r.name);
  }

  Relation run(const SelectNode& n) {
    Relation in = eval(*n.input);
    Relation out{in.def, {}};
    for (const auto& t : in.tuples) {
      bool keep = true;
      for (const auto& c : n.predicate.conditions) {
        const Value operand = std::holds_alternative<ParamRef>(c.operand)
                                  ? params.find(std::get<ParamRef>(c.operand).name)->second
                                  : std::get<Value>(c.operand);
        keep = keep && satisfies(t[col(in, c.column)], c.op, operand);
      }
      if (keep) out.tuples.push_back(t);
    }
    return out;
  }

  Relation run(const ProjectNode& n) {
    Relation in = eval(*n.input);
    Relation out;
    out.def.name = in.def.name;
    for (const auto& c : n.columns) {
      out.def.columns.push_back(in.def.columns[col(in, c)]);
      if (in.def.primary_key && *in.def.primary_key == c) out.def.primary_key = c;
    }
    for (const auto& t : in.tuples) {
      Tuple row;
      for (const auto& c : n.columns) row.push_back(t[col(in, c)]);
      out.tuples.push_back(row);
    }
    return out;
  }

  Relation run(const JoinNode& n) {
    Relation l = eval(*n.left);
    Relation r = eval(*n.right);
    const std::size_t li = col(l, n.left_column);
    const std::size_t ri = col(r, n.right_column);
    const bool drop = n.left_column == n.right_column;
    Relation out;
    out.def.name = l.def.name;
    out.def.columns = l.def.columns;
    for (std::size_t c = 0; c < r.def.columns.size(); ++c) {
      if (!(drop && c == ri)) out.def.columns.push_back(r.def.columns[c]);
    }
    for (const auto& a : l.tuples) {
      for (const auto& b : r.tuples) {
        if (!same_key(a[li], b[ri])) continue;
        Tuple row = a;
        for (std::size_t c = 0; c < b.size(); ++c) {
          if (!(drop && c == ri)) row.push_back(b[c]);
        }
        out.tuples.push_back(row);
      }
    }
    return out;
  }

  Relation run(const ExtendNode& n) {
    Relation a = eval(*n.input);
    Relation b = eval(*n.source);
    const std::size_t ag = col(a, n.group_key);
    const std::size_t bg = col(b, n.group_key);
    const std::size_t bk = col(b, n.key_column);
    const std::size_t bv = col(b, n.value_column);
    Relation out{a.def, {}};
    out.def.columns.push_back({n.attribute, ColumnType::kMap});
    for (const auto& t : a.tuples) {
      RatingMap m;
      for (const auto& s : b.tuples) {
        if (!same_key(t[ag], s[bg]) || s[bk].is_null() || s[bv].is_null()) continue;
        m[s[bk].as_int()] = s[bv].as_number();
      }
      Tuple row = t;
      row.emplace_back(m);
      out.tuples.push_back(row);
    }
    return out;
  }

  Relation run(const RecommendNode& n) {
    Relation c = eval(*n.candidates);
    Relation r = eval(*n.reference);
    std::vector<double> scores;
    for (const auto& ct : c.tuples) {
      std::vector<double> xs;
      if (const auto* s = std::get_if<SimilarityMode>(&n.mode)) {
        const Value& cv = ct[col(c, s->candidate_column)];
        for (const auto& rt : r.tuples) {
          const Value& rv = rt[col(r, s->reference_column)];
          if (s->fn == SimilarityFn::kJaccard) {
            xs.push_back(naive_jaccard(cv.is_text() ? naive_tokenize(cv.as_text()) : std::vector<std::string>{},
                                       rv.is_text() ? naive_tokenize(rv.as_text()) : std::vector<std::string>{}));
          } else {
            const RatingMap cm = cv.is_map() ? cv.as_map() : RatingMap{};
            const RatingMap rm = rv.is_map() ? rv.as_map() : RatingMap{};
            xs.push_back(s->fn == SimilarityFn::kPearson ? naive_pearson(cm, rm) : naive_inv_euclidean(cm, rm));
          }
        }
      } else {
        const auto& a = std::get<AggregateMode>(n.mode);
        const Value& key = ct[col(c, a.candidate_column)];
        for (const auto& rt : r.tuples) {
          const Value& v = rt[col(r, a.value_column)];
          if (same_key(key, rt[col(r, a.reference_column)]) && !v.is_null()) xs.push_back(v.as_number());
        }
      }
      scores.push_back(aggregate(n.agg, xs));
    }
    const std::size_t pk = col(c, *c.def.primary_key);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < c.tuples.size(); ++i) order.push_back(i);
    // Insertion sort: slow and obviously correct.
    for (std::size_t i = 1; i < order.size(); ++i) {
      for (std::size_t j = i; j > 0; --j) {
        const std::size_t x = order[j - 1];
        const std::size_t y = order[j];
        const bool swap = scores[y] > scores[x] || (scores[y] == scores[x] && id_less(c.tuples[y][pk], c.tuples[x][pk]));
        if (!swap) break;
        std::swap(order[j - 1], order[j]);
      }
    }
    if (n.top && static_cast<std::size_t>(*n.top) < order.size()) order.resize(static_cast<std::size_t>(*n.top));
    Relation out{c.def, {}};
    out.def.columns.push_back({std::string(kScoreColumn), ColumnType::kFloat});
    for (std::size_t i : order) {
      Tuple row = c.tuples[i];
      row.emplace_back(scores[i]);
      out.tuples.push_back(row);
    }
    return out;
  }
};

}  // namespace

Relation naive_eval(const Store& store, const WorkflowAst& ast, const Params& params) {
  Naive n{store, params, {}};
  Relation last;
  for (const auto& b : ast.bindings) {
    last = n.eval(b.expr);
    last.def.name = b.name;
    n.env[b.name] = last;
  }
  return last;
}

// ---------------------------------------------------------------------------
// Straight-line scripts for the two shipped workflows

std::vector<Scored> similar_titles_script(const Store& store, std::int64_t year, const std::string& title) {
  const Relation& courses = base(store, "Courses");
  const Relation& comments = base(store, "Comments");
  std::vector<std::vector<std::string>> reference_titles;
  for (const auto& c : courses.tuples) {
    if (c[2].is_text() && c[2].as_text() == title) reference_titles.push_back(naive_tokenize(c[2].as_text()));
  }
  std::vector<Scored> out;
  for (const auto& c : courses.tuples) {
    bool offered = false;
    for (const auto& m : comments.tuples) {
      offered = offered || (m[2].as_int() == c[0].as_int() && m[3].is_int() && m[3].as_int() == year);
    }
    if (!offered) continue;
    double best = 0.0;
    for (const auto& ref : reference_titles) {
      best = std::max(best, naive_jaccard(c[2].is_text() ? naive_tokenize(c[2].as_text()) : std::vector<std::string>{}, ref));
    }
    out.push_back({c[0], best});
  }
  std::stable_sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.id.as_int() < b.id.as_int();
  });
  return out;
}

std::vector<Scored> cf_courses_script(const Store& store, std::int64_t target) {
  const Relation& students = base(store, "Students");
  const Relation& courses = base(store, "Courses");
  const Relation& comments = base(store, "Comments");
  // Comments columns: CommentID, SuID, CourseID, Year, Term, Text, Rating, Date.
  const auto ratings_of = [&](std::int64_t suid) {
    RatingMap m;
    for (const auto& c : comments.tuples) {
      if (c[1].as_int() == suid && !c[6].is_null()) m[c[2].as_int()] = c[6].as_float();
    }
    return m;
  };
  RatingMap mine;
  bool target_exists = false;
  for (const auto& s : students.tuples) {
    if (s[0].as_int() == target) {
      mine = ratings_of(target);
      target_exists = true;
    }
  }
  std::vector<Scored> similar;
  for (const auto& s : students.tuples) {
    if (s[0].as_int() == target) continue;
    similar.push_back({s[0], target_exists ? naive_inv_euclidean(ratings_of(s[0].as_int()), mine) : 0.0});
  }
  std::stable_sort(similar.begin(), similar.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.id.as_int() < b.id.as_int();
  });
  if (similar.size() > 20) similar.resize(20);

  std::vector<Scored> out;
  for (const auto& course : courses.tuples) {
    std::vector<double> rs;
    for (const auto& s : similar) {
      for (const auto& c : comments.tuples) {
        if (c[1].as_int() == s.id.as_int() && c[2].as_int() == course[0].as_int() && !c[6].is_null()) {
          rs.push_back(c[6].as_float());
        }
      }
    }
    out.push_back({course[0], aggregate(Aggregation::kMean, rs)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.id.as_int() < b.id.as_int();
  });
  if (out.size() > 10) out.resize(10);
  return out;
}

}  // namespace flexcloud::oracle
