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

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flexcloud/data_cloud.hpp"
#include "flexcloud/entity_search.hpp"
#include "flexcloud/error.hpp"
#include "flexcloud/rec_algebra.hpp"
#include "flexcloud/relstore.hpp"
#include "flexcloud/sql_compiler.hpp"

namespace httplib {
class Server;
}

namespace flexcloud {

struct SearchRequest {
  std::string query;
  std::string entity;  // empty: the default entity
  std::optional<std::size_t> limit;
  bool with_cloud = false;
  std::size_t k = kDefaultCloudSize;
  std::optional<std::string> refine_term;  // clicked cloud term
};

struct RunRequest {
  std::string workflow;
  Params params;
  std::optional<std::size_t> top;
};

// Read-only engine over one snapshot: search indexes for every entity spec
// and the validated workflows. All render_* methods return the canonical
// JSON body (sorted keys, trailing newline) shared by the CLI and HTTP API.
class Engine {
 public:
  Engine(Store store, std::vector<EntitySpec> specs, std::vector<WorkflowAst> workflows);

  // Loads the snapshot, every *.json spec under specs_dir (the built-in
  // course spec when specs_dir is empty) and every *.frx under workflows_dir.
  static Engine open(const std::filesystem::path& snapshot, const std::filesystem::path& specs_dir,
                     const std::filesystem::path& workflows_dir);

  const Store& store() const { return *store_; }
  const SearchIndex& index(const std::string& entity) const;
  const std::string& default_entity() const { return default_entity_; }
  const WorkflowAst& workflow(const std::string& name) const;
  const std::map<std::string, WorkflowAst>& workflows() const { return workflows_; }

  std::string render_search(const SearchRequest& request) const;
  std::string render_cloud(const SearchRequest& request) const;
  std::string render_run(const RunRequest& request) const;
  std::string render_sql(const RunRequest& request) const;
  std::string render_workflows() const;
  std::string render_health() const;

  Relation run(const RunRequest& request) const;
  SqlScript compile(const RunRequest& request) const;

 private:
  std::shared_ptr<const Store> store_;
  std::map<std::string, SearchIndex> indexes_;
  std::string default_entity_;
  std::map<std::string, WorkflowAst> workflows_;
};

std::string render_error(const Error& error);

// Loads a workflow from a .frx path.
WorkflowAst load_workflow_file(const std::filesystem::path& path);

// Parses JSON "params" object values: integers, floats and strings.
Params params_from_json_text(const std::string& body, std::optional<std::size_t>* top = nullptr);

// HTTP routes under /v1 bound to an engine that must outlive the server.
std::unique_ptr<httplib::Server> make_server(const Engine& engine);

}  // namespace flexcloud
