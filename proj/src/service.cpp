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

#include "flexcloud/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

#include "flexcloud/workflow_dsl.hpp"

namespace flexcloud {

using nlohmann::json;

namespace {

std::string body(const json& j) { return j.dump() + "\n"; }

json value_json(const Value& v) {
  if (v.is_null()) return nullptr;
  if (v.is_int()) return v.as_int();
  if (v.is_float()) return v.as_float();
  if (v.is_text()) return v.as_text();
  json m = json::object();
  for (const auto& [k, r] : v.as_map()) m[std::to_string(k)] = r;
  return m;
}

json query_json(const std::vector<QueryTerm>& query) {
  json q = json::array();
  for (const auto& t : query) q.push_back(t.text());
  return q;
}

json search_json(const SearchResult& result, const std::string& entity) {
  json hits = json::array();
  for (const auto& h : result.hits) {
    hits.push_back({{"id", value_json(h.id)}, {"score", h.score}, {"fields", h.fields}});
  }
  return {{"entity", entity}, {"query", query_json(result.query)}, {"total", result.total}, {"hits", hits}};
}

json cloud_json(const DataCloud& cloud) {
  json terms = json::array();
  for (const auto& t : cloud.terms) {
    // Two decimals at the API boundary only.
    terms.push_back({{"term", t.term}, {"weight", std::round(t.weight * 100.0) / 100.0}, {"count", t.doc_count}});
  }
  return {{"query", query_json(cloud.query)}, {"terms", terms}};
}

}  // namespace

std::string render_error(const Error& error) {
  return body({{"code", std::string(error_code_name(error.code()))}, {"message", error.what()}});
}

WorkflowAst load_workflow_file(const std::filesystem::path& path) {
  return parse_workflow_or_throw(read_file(path), path.filename().string());
}

Engine::Engine(Store store, std::vector<EntitySpec> specs, std::vector<WorkflowAst> workflows)
    : store_(std::make_shared<const Store>(std::move(store))) {
  for (const auto& spec : specs) {
    if (indexes_.count(spec.name)) throw Error(ErrorCode::kSpec, "duplicate entity spec '" + spec.name + "'");
    indexes_.emplace(spec.name, SearchIndex::build(*store_, spec));
  }
  if (indexes_.count("course")) {
    default_entity_ = "course";
  } else if (!indexes_.empty()) {
    default_entity_ = indexes_.begin()->first;
  }
  for (auto& wf : workflows) {
    validate(wf, store_->schema());
    if (workflows_.count(wf.name)) {
      throw Error(ErrorCode::kValidation, "duplicate workflow '" + wf.name + "'");
    }
    std::string name = wf.name;
    workflows_.emplace(std::move(name), std::move(wf));
  }
}

Engine Engine::open(const std::filesystem::path& snapshot, const std::filesystem::path& specs_dir,
                    const std::filesystem::path& workflows_dir) {
  Store store = snapshot_load_file(snapshot);
  std::vector<EntitySpec> specs;
  const auto sorted_files = [](const std::filesystem::path& dir, const std::string& ext) {
    std::vector<std::filesystem::path> files;
    if (!std::filesystem::is_directory(dir)) {
      throw Error(ErrorCode::kNotFound, "'" + dir.string() + "' is not a directory");
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ext) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  if (specs_dir.empty()) {
    specs.push_back(default_course_spec());
  } else {
    for (const auto& f : sorted_files(specs_dir, ".json")) specs.push_back(EntitySpec::from_json(read_file(f)));
  }
  std::vector<WorkflowAst> workflows;
  if (!workflows_dir.empty()) {
    for (const auto& f : sorted_files(workflows_dir, ".frx")) workflows.push_back(load_workflow_file(f));
  }
  return Engine(std::move(store), std::move(specs), std::move(workflows));
}

const SearchIndex& Engine::index(const std::string& entity) const {
  const std::string& name = entity.empty() ? default_entity_ : entity;
  const auto it = indexes_.find(name);
  if (it == indexes_.end()) throw Error(ErrorCode::kUnknownEntity, "unknown entity '" + name + "'");
  return it->second;
}

const WorkflowAst& Engine::workflow(const std::string& name) const {
  const auto it = workflows_.find(name);
  if (it == workflows_.end()) throw Error(ErrorCode::kUnknownWorkflow, "unknown workflow '" + name + "'");
  return it->second;
}

std::string Engine::render_search(const SearchRequest& request) const {
  const SearchIndex& idx = index(request.entity);
  const std::string& entity = idx.spec().name;
  const auto query = parse_query(request.query);
  SearchResult result;
  std::optional<DataCloud> cloud;
  if (request.refine_term) {
    auto refined = refine(idx, query, QueryTerm::from_text(*request.refine_term), request.k);
    result = std::move(refined.result);
    if (request.with_cloud) cloud = std::move(refined.cloud);
  } else {
    result = search(idx, query);
    if (request.with_cloud) cloud = compute_cloud(idx, result, request.k);
  }
  json out = search_json(truncate(std::move(result), request.limit), entity);
  if (cloud) out["cloud"] = cloud_json(*cloud);
  return body(out);
}

std::string Engine::render_cloud(const SearchRequest& request) const {
  const SearchIndex& idx = index(request.entity);
  const auto query = parse_query(request.query);
  if (request.refine_term) {
    return body(cloud_json(refine(idx, query, QueryTerm::from_text(*request.refine_term), request.k).cloud));
  }
  return body(cloud_json(compute_cloud(idx, search(idx, query), request.k)));
}

Relation Engine::run(const RunRequest& request) const {
  Relation rel = eval_workflow(*store_, workflow(request.workflow), request.params);
  if (request.top && rel.tuples.size() > *request.top) rel.tuples.resize(*request.top);
  return rel;
}

SqlScript Engine::compile(const RunRequest& request) const {
  return compile_sql(workflow(request.workflow), store_->schema(), request.params);
}

std::string Engine::render_run(const RunRequest& request) const {
  const Relation full = eval_workflow(*store_, workflow(request.workflow), request.params);
  json columns = json::array();
  for (const auto& c : full.def.columns) {
    columns.push_back({{"name", c.name}, {"type", std::string(column_type_name(c.type))}});
  }
  json rows = json::array();
  const std::size_t n = request.top ? std::min(*request.top, full.tuples.size()) : full.tuples.size();
  for (std::size_t i = 0; i < n; ++i) {
    json row = json::array();
    for (const auto& v : full.tuples[i]) row.push_back(value_json(v));
    rows.push_back(std::move(row));
  }
  return body({{"workflow", request.workflow}, {"columns", columns}, {"total", full.tuples.size()}, {"rows", rows}});
}

std::string Engine::render_sql(const RunRequest& request) const {
  const SqlScript script = compile(request);
  json out_cols = json::array();
  for (const auto& c : script.output.columns) {
    out_cols.push_back({{"name", c.name}, {"type", std::string(column_type_name(c.type))}});
  }
  return body({{"workflow", request.workflow},
               {"statements", script.statements},
               {"temp_objects", script.temp_objects},
               {"required_udfs", script.required_udfs},
               {"output_columns", out_cols}});
}

std::string Engine::render_workflows() const {
  json list = json::array();
  for (const auto& [name, wf] : workflows_) {
    json params = json::array();
    for (const auto& p : wf.params) params.push_back({{"name", p.name}, {"type", std::string(column_type_name(p.type))}});
    list.push_back({{"name", name}, {"params", params}});
  }
  return body({{"workflows", list}});
}

std::string Engine::render_health() const {
  json relations = json::object();
  for (const auto& r : store_->relations()) relations[r.def.name] = r.tuples.size();
  json entities = json::array();
  for (const auto& [name, idx] : indexes_) entities.push_back(name);
  return body({{"status", "ok"}, {"relations", relations}, {"entities", entities}, {"workflows", workflows_.size()}});
}

Params params_from_json_text(const std::string& text, std::optional<std::size_t>* top) {
  json doc;
  try {
    doc = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParse, std::string("request body: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::kParse, "request body must be a JSON object");
  Params params;
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw Error(ErrorCode::kParamType, "'params' must be an object");
    for (const auto& [name, v] : doc["params"].items()) {
      if (v.is_number_integer()) {
        params[name] = Value(v.get<std::int64_t>());
      } else if (v.is_number_float()) {
        params[name] = Value(v.get<double>());
      } else if (v.is_string()) {
        params[name] = Value(v.get<std::string>());
      } else {
        throw Error(ErrorCode::kParamType, "parameter '" + name + "' must be a number or string");
      }
    }
  }
  if (top && doc.contains("top")) {
    if (!doc["top"].is_number_unsigned()) throw Error(ErrorCode::kValidation, "'top' must be a non-negative integer");
    *top = doc["top"].get<std::size_t>();
  }
  return params;
}

namespace {

constexpr const char* kJsonType = "application/json; charset=utf-8";

std::optional<std::size_t> size_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  const std::string v = req.get_param_value(name);
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw Error(ErrorCode::kBadQuery, std::string("parameter '") + name + "' must be a non-negative integer");
  }
  return out;
}

bool flag_param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return false;
  const std::string v = req.get_param_value(name);
  return v == "1" || v == "true" || v == "yes";
}

SearchRequest search_request(const httplib::Request& req) {
  SearchRequest sr;
  sr.query = req.get_param_value("q");
  sr.entity = req.get_param_value("entity");
  sr.limit = size_param(req, "limit");
  sr.k = size_param(req, "k").value_or(kDefaultCloudSize);
  sr.with_cloud = flag_param(req, "cloud");
  if (req.has_param("term")) sr.refine_term = req.get_param_value("term");
  return sr;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(fn(req), kJsonType);
      res.status = 200;
    } catch (const Error& e) {
      res.status = error_http_status(e.code());
      res.set_content(render_error(e), kJsonType);
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(render_error(Error(ErrorCode::kInternal, e.what())), kJsonType);
    }
  };
}

}  // namespace

std::unique_ptr<httplib::Server> make_server(const Engine& engine) {
  auto server = std::make_unique<httplib::Server>();
  const Engine* e = &engine;
  server->Get("/v1/health", guarded([e](const httplib::Request&) { return e->render_health(); }));
  server->Get("/v1/search", guarded([e](const httplib::Request& req) { return e->render_search(search_request(req)); }));
  server->Get("/v1/cloud", guarded([e](const httplib::Request& req) { return e->render_cloud(search_request(req)); }));
  server->Get("/v1/refine", guarded([e](const httplib::Request& req) {
                SearchRequest sr = search_request(req);
                if (!sr.refine_term) throw Error(ErrorCode::kBadQuery, "missing 'term' parameter");
                sr.with_cloud = true;
                return e->render_search(sr);
              }));
  server->Get("/v1/workflows", guarded([e](const httplib::Request&) { return e->render_workflows(); }));
  server->Post(R"(/v1/workflows/([A-Za-z_][A-Za-z0-9_]*)/run)", guarded([e](const httplib::Request& req) {
                 RunRequest rr;
                 rr.workflow = req.matches[1];
                 e->workflow(rr.workflow);
                 rr.params = params_from_json_text(req.body, &rr.top);
                 return e->render_run(rr);
               }));
  server->Post(R"(/v1/workflows/([A-Za-z_][A-Za-z0-9_]*)/sql)", guarded([e](const httplib::Request& req) {
                 RunRequest rr;
                 rr.workflow = req.matches[1];
                 e->workflow(rr.workflow);
                 rr.params = params_from_json_text(req.body);
                 return e->render_sql(rr);
               }));
  const auto not_found = [](const httplib::Request& req, httplib::Response& res) {
    res.status = 404;
    res.set_content(render_error(Error(ErrorCode::kNotFound, "no route for " + req.method + " " + req.path)), kJsonType);
  };
  server->set_error_handler([not_found](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) not_found(req, res);
  });
  return server;
}

}  // namespace flexcloud
