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

#include "flexcloud/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "flexcloud/service.hpp"
#include "flexcloud/workflow_dsl.hpp"

namespace flexcloud {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : std::move(fallback);
}

struct EngineOptions {
  std::string snapshot = env_or("FLEXCLOUD_SNAPSHOT", "flexcloud.snap");
  std::string specs;
  std::string workflows;

  void attach(CLI::App* cmd) {
    cmd->add_option("--snapshot", snapshot, "Snapshot produced by 'ingest'");
    cmd->add_option("--specs", specs, "Directory of entity spec *.json files (default: built-in course spec)");
    cmd->add_option("--workflows", workflows, "Directory of *.frx workflow files");
  }
};

// WF names a workflow in --workflows or a .frx path.
std::pair<Engine, std::string> engine_for_workflow(const EngineOptions& opts, const std::string& wf) {
  const std::filesystem::path as_path(wf);
  if (as_path.extension() == ".frx") {
    WorkflowAst ast = load_workflow_file(as_path);
    std::string name = ast.name;
    std::vector<WorkflowAst> list;
    list.push_back(std::move(ast));
    return {Engine(snapshot_load_file(opts.snapshot), {}, std::move(list)), name};
  }
  return {Engine::open(opts.snapshot, {}, opts.workflows), wf};
}

void print_search_text(std::ostream& out, const Engine& engine, const SearchRequest& req) {
  const SearchIndex& idx = engine.index(req.entity);
  const auto query = parse_query(req.query);
  SearchResult result;
  std::optional<DataCloud> cloud;
  if (req.refine_term) {
    auto r = refine(idx, query, QueryTerm::from_text(*req.refine_term), req.k);
    result = std::move(r.result);
    cloud = std::move(r.cloud);
  } else {
    result = search(idx, query);
    if (req.with_cloud) cloud = compute_cloud(idx, result, req.k);
  }
  const SearchResult shown = truncate(result, req.limit);
  out << shown.total << " " << idx.spec().name << " result(s) for: " << format_query(shown.query) << "\n";
  for (std::size_t i = 0; i < shown.hits.size(); ++i) {
    const auto& h = shown.hits[i];
    out << std::setw(4) << i + 1 << ". " << value_to_display(h.id) << "  score=" << format_double(h.score)
        << "  [";
    for (std::size_t f = 0; f < h.fields.size(); ++f) out << (f ? ", " : "") << h.fields[f];
    out << "]\n";
  }
  if (cloud && req.with_cloud) {
    out << "cloud:\n";
    for (const auto& t : cloud->terms) {
      out << "  " << t.term << "  " << std::fixed << std::setprecision(2) << t.weight
          << std::defaultfloat << "  (" << t.doc_count << ")\n";
    }
  }
}

void print_relation_text(std::ostream& out, const Relation& rel) {
  for (std::size_t c = 0; c < rel.def.columns.size(); ++c) out << (c ? "\t" : "") << rel.def.columns[c].name;
  out << "\n";
  for (const auto& t : rel.tuples) {
    for (std::size_t c = 0; c < t.size(); ++c) out << (c ? "\t" : "") << value_to_display(t[c]);
    out << "\n";
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"flexcloud: keyword search with data clouds and declarative recommendation workflows"};
  app.name(args.empty() ? "flexcloud" : args.front());
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Load a schema and CSV directory into a snapshot");
  std::string schema_path;
  std::string data_dir;
  std::string snapshot_out;
  ingest->add_option("--schema", schema_path, "Schema JSON file")->required();
  ingest->add_option("--data", data_dir, "Directory holding <Relation>.csv files")->required();
  ingest->add_option("--out", snapshot_out, "Snapshot file to write")->required();

  // search
  auto* search_cmd = app.add_subcommand("search", "Keyword search with an optional data cloud");
  EngineOptions search_opts;
  search_opts.attach(search_cmd);
  SearchRequest sreq;
  std::size_t limit = 0;
  std::string refine_term;
  bool search_json = false;
  search_cmd->add_option("query", sreq.query, "Query; quote a two-word phrase with double quotes")->required();
  search_cmd->add_option("--entity", sreq.entity, "Entity spec name");
  search_cmd->add_flag("--cloud", sreq.with_cloud, "Include the data cloud");
  search_cmd->add_option("--k", sreq.k, "Cloud size");
  auto* limit_opt = search_cmd->add_option("--limit", limit, "Maximum hits to print");
  auto* refine_opt = search_cmd->add_option("--refine", refine_term, "Click a cloud term to refine");
  search_cmd->add_flag("--json", search_json, "Emit JSON");

  // run
  auto* run_cmd = app.add_subcommand("run", "Evaluate a recommendation workflow");
  EngineOptions run_opts;
  run_opts.attach(run_cmd);
  std::string run_wf;
  std::vector<std::string> run_params;
  std::size_t top = 0;
  bool run_json = false;
  run_cmd->add_option("workflow", run_wf, "Workflow name or .frx file")->required();
  run_cmd->add_option("--param", run_params, "Parameter binding name=value")->take_all();
  auto* top_opt = run_cmd->add_option("--top", top, "Keep only the first N rows");
  run_cmd->add_flag("--json", run_json, "Emit JSON");

  // compile
  auto* compile_cmd = app.add_subcommand("compile", "Compile a workflow to a SQL script");
  EngineOptions compile_opts;
  compile_opts.attach(compile_cmd);
  std::string compile_wf;
  std::vector<std::string> compile_params;
  std::string emit = "sql";
  std::string dialect = "ansi";
  std::string compile_out;
  compile_cmd->add_option("workflow", compile_wf, "Workflow name or .frx file")->required();
  compile_cmd->add_option("--param", compile_params, "Parameter binding name=value")->take_all();
  compile_cmd->add_option("--emit", emit, "Output form")->check(CLI::IsMember({"sql", "json"}));
  compile_cmd->add_option("--dialect", dialect, "SQL dialect");
  compile_cmd->add_option("--out", compile_out, "Write to a file instead of stdout");

  // format
  auto* fmt_cmd = app.add_subcommand("fmt", "Print a workflow file in canonical form");
  std::string fmt_file;
  fmt_cmd->add_option("file", fmt_file, ".frx file")->required();

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the JSON API over HTTP");
  EngineOptions serve_opts;
  serve_opts.attach(serve_cmd);
  int port = 0;
  std::string host = "127.0.0.1";
  auto* port_opt = serve_cmd->add_option("--port", port, "Port (overrides FLEXCLOUD_PORT)");
  serve_cmd->add_option("--host", host, "Bind address");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("flexcloud");
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      const Schema schema = load_schema(read_file(schema_path));
      const Store store = ingest_directory(schema, data_dir);
      std::ofstream f(snapshot_out, std::ios::binary | std::ios::trunc);
      if (!f) throw Error(ErrorCode::kNotFound, "cannot write '" + snapshot_out + "'");
      snapshot_save(store, f);
      f.close();
      if (!f) throw Error(ErrorCode::kInternal, "failed writing '" + snapshot_out + "'");
      err << "ingested " << store.relations().size() << " relation(s) into " << snapshot_out << "\n";
      return kExitOk;
    }
    if (search_cmd->parsed()) {
      const Engine engine = Engine::open(search_opts.snapshot, search_opts.specs, {});
      if (*limit_opt) sreq.limit = limit;
      if (*refine_opt) sreq.refine_term = refine_term;
      if (search_json) {
        out << engine.render_search(sreq);
      } else {
        print_search_text(out, engine, sreq);
      }
      return kExitOk;
    }
    if (run_cmd->parsed()) {
      auto [engine, name] = engine_for_workflow(run_opts, run_wf);
      RunRequest rr{name, parse_param_strings(engine.workflow(name), run_params), std::nullopt};
      if (*top_opt) rr.top = top;
      if (run_json) {
        out << engine.render_run(rr);
      } else {
        print_relation_text(out, engine.run(rr));
      }
      return kExitOk;
    }
    if (compile_cmd->parsed()) {
      if (!parse_sql_dialect(dialect)) {
        throw Error(ErrorCode::kUnsupportedDialect, "unsupported SQL dialect '" + dialect + "'");
      }
      auto [engine, name] = engine_for_workflow(compile_opts, compile_wf);
      RunRequest rr{name, parse_param_strings(engine.workflow(name), compile_params), std::nullopt};
      const std::string text = emit == "json" ? engine.render_sql(rr) : engine.compile(rr).to_text();
      if (compile_out.empty()) {
        out << text;
      } else {
        std::ofstream f(compile_out, std::ios::binary | std::ios::trunc);
        f << text;
        if (!f) throw Error(ErrorCode::kInternal, "failed writing '" + compile_out + "'");
      }
      return kExitOk;
    }
    if (fmt_cmd->parsed()) {
      out << format_workflow(load_workflow_file(fmt_file));
      return kExitOk;
    }
    if (serve_cmd->parsed()) {
      if (!*port_opt) {
        const std::string env = env_or("FLEXCLOUD_PORT", "8080");
        try {
          port = std::stoi(env);
        } catch (const std::exception&) {
          err << "error: FLEXCLOUD_PORT='" << env << "' is not a port number\n";
          return kExitUsage;
        }
      }
      const Engine engine = Engine::open(serve_opts.snapshot, serve_opts.specs, serve_opts.workflows);
      auto server = make_server(engine);
      err << "serving " << serve_opts.snapshot << " on http://" << host << ":" << port << "\n";
      if (!server->listen(host, port)) {
        err << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitData;
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace flexcloud
