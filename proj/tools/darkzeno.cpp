// Copyright 2026 The darkzeno Authors
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

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "darkzeno/darkzeno.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string preset;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::vector<std::string> formats;
  int threads = 0;
  bool print_config = false;
};

darkzeno::Json read_document(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw darkzeno::Error(darkzeno::ErrorCode::io_error, "cannot read config '" + path + "'");
  std::stringstream text;
  text << f.rdbuf();
  darkzeno::Json doc;
  try {
    doc = darkzeno::Json::parse(text.str());
  } catch (const darkzeno::Json::parse_error& e) {
    throw darkzeno::Error(darkzeno::ErrorCode::parse_error, path + ": malformed JSON: " + e.what());
  }
  // a result file carries its configuration under "config"
  if (doc.is_object() && doc.contains("config") && doc.contains("grids")) return doc.at("config");
  return doc;
}

darkzeno::RunConfig resolve(const Options& o) {
  darkzeno::Json doc = o.config_path.empty() ? darkzeno::Json::object() : read_document(o.config_path);
  if (!o.preset.empty()) doc["preset"] = o.preset;
  for (const auto& s : o.overrides) darkzeno::apply_override(doc, s);
  darkzeno::RunConfig c = darkzeno::parse_config_json(doc);
  if (!o.out_dir.empty()) c.output.dir = o.out_dir;
  if (!o.formats.empty()) {
    for (const auto& f : o.formats) {
      if (f != "csv" && f != "json") {
        throw darkzeno::Error(darkzeno::ErrorCode::parse_error, "--format: expected csv or json, got '" + f + "'");
      }
    }
    c.output.formats = o.formats;
  }
  if (o.threads > 0) c.sweep.threads = o.threads;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dark-state dynamics of two atoms in a dissipative cavity under dephasing"};
  app.require_subcommand(1);
  Options opts;

  std::string presets;
  for (const auto& n : darkzeno::preset_names()) presets += (presets.empty() ? "" : ", ") + n;

  const std::map<std::string_view, std::string> about{
      {"evolve", "integrate one trajectory and report the dark weight, T_stab and P_ret"},
      {"heatmap", "T_stab and P_ret over a two-parameter grid"},
      {"diagonal", "symmetric-dephasing scan and its T_stab minimum"},
      {"gmin", "optimal dephasing rate for each coupling"},
      {"k0scan", "coupling-ratio threshold between Zeno and anti-Zeno behaviour"},
      {"reduced", "trajectory on the three-state single-excitation space"},
      {"oracle", "steady state from the Liouvillian null space"},
  };
  for (auto name : darkzeno::kCommands) {
    auto* sub = app.add_subcommand(std::string(name), about.at(name));
    sub->add_option("--config", opts.config_path, "JSON run configuration (or a result file to re-run)");
    sub->add_option("--preset", opts.preset, "named preset: " + presets);
    sub->add_option("--set", opts.overrides, "override a key, e.g. --set model.g1=40 (repeatable)");
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--format", opts.formats, "output formats: csv,json")->delimiter(',');
    sub->add_option("--threads", opts.threads, "sweep worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--print-config", opts.print_config, "print the resolved configuration and exit");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  darkzeno::RunConfig config;
  try {
    config = resolve(opts);
  } catch (const darkzeno::Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == darkzeno::ErrorCode::io_error ? darkzeno::exit_io_error : darkzeno::exit_error;
  }
  if (opts.print_config) {
    std::cout << darkzeno::serialize(config) << "\n";
    return darkzeno::exit_ok;
  }
  return darkzeno::run_command(config, command, std::cout, std::cerr);
}
