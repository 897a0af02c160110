// Copyright 2026 The empkit Authors.
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

// empkit command-line front end.
//
// Exit status: 0 success or valid EMP, 1 invalid EMP, 2 input error,
// 3 internal inconsistency.

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "empkit/empkit.hpp"

namespace {

constexpr int kInputError = 2;
constexpr int kInternalError = 3;

struct Options {
  std::string graph;
  std::string emp;
  std::string strategy = "col-ltr";
  std::string format = "table";
  empkit::RunConfig config;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("graph", o.graph, "graph JSON file")->required();
  cmd->add_option("--seed", o.config.seed, "random seed")->capture_default_str();
  cmd->add_option("--trials", o.config.trials, "random instantiations per oracle")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--strategy", o.strategy, "synthesis strategy")
      ->check(CLI::IsMember({"col-ltr", "col-rtl", "row-ttb", "explicit"}))
      ->capture_default_str();
  cmd->add_option("--format", o.format, "report format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();
  cmd->add_option("--node-limit", o.config.node_limit, "largest graph for minimal enumeration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--jobs", o.config.jobs, "worker threads for minimal enumeration")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

int run(const std::string& command, Options& o) {
  o.config.strategy = empkit::parse_strategy(o.strategy);
  o.config.format = o.format == "json" ? empkit::OutputFormat::Json : empkit::OutputFormat::Table;
  const empkit::Dag dag = empkit::load_graph(o.graph);

  if (command == "export-dot") {
    std::optional<empkit::Emp> emp;
    if (!o.emp.empty()) emp = empkit::parse_emp(o.emp, dag.size());
    std::cout << empkit::export_dot(dag, emp);
    return 0;
  }
  empkit::Report report;
  if (command == "classify") {
    report = empkit::classify_report(o.graph, dag, o.config);
  } else if (command == "synthesize") {
    report = empkit::synthesize_report(o.graph, dag, o.config);
  } else if (command == "verify") {
    report = empkit::verify_report(o.graph, dag, o.emp, o.config);
  } else {
    report = empkit::minimal_report(o.graph, dag, o.config);
  }
  std::cout << empkit::render(report, o.config.format);
  return report.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Excitation and measurement pattern design for DAG networks"};
  app.require_subcommand(1);
  std::map<std::string, Options> options;
  const std::map<std::string, std::string> commands = {
      {"classify", "print sources, sinks, dources, dinks and neighbour sets"},
      {"synthesize", "construct a valid EMP and print the stage trace"},
      {"verify", "check an EMP against the necessary conditions and both oracles"},
      {"minimal", "enumerate all minimal valid EMPs"},
      {"export-dot", "write the graph, optionally with an EMP, as DOT"},
  };
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    auto& o = options[name];
    add_common(cmd, o);
    auto* emp = cmd->add_option("--emp", o.emp, "EMP text, e.g. E125,M23467");
    if (name == "verify") emp->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, options[command]);
  } catch (const empkit::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const empkit::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
