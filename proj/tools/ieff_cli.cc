// Copyright 2026 The IEFF Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// ieff: batch runs, paired comparisons, the /v1 server and report replay.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "ieff/harness.h"
#include "ieff/presets.h"
#include "ieff/report_io.h"
#include "ieff/serialization.h"
#include "ieff/service.h"

namespace {

using namespace ieff;

constexpr int kExitError = 1;
constexpr int kExitStrictRollback = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

WorldConfig world_from(const Common& c) {
  WorldConfig world = c.config.empty() ? presets::default_world() : load_world_config(c.config);
  if (c.seed) world.seed = *c.seed;
  world.validate();
  return world;
}

ScenarioConfig scenario_from(const std::string& path) {
  return path.empty() ? presets::baseline() : load_scenario_config(path);
}

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_run(const std::string& dir, const RunCheckpoint& c) {
  write_file(out_path(dir, "report.csv"), report_csv(c.report));
  write_file(out_path(dir, "summary.json"), summary_text(c.report));
  write_file(out_path(dir, "checkpoint.json"), checkpoint_text(c));
}

int cmd_run(const Common& common, const std::string& scenario_path, bool strict) {
  RunCheckpoint c;
  c.world = world_from(common);
  c.scenario = scenario_from(scenario_path);
  Simulation sim(c.world, c.scenario);
  sim.run_to_end();
  c.report = sim.report();
  c.model = sim.model();
  if (!common.out_dir.empty()) write_run(common.out_dir, c);
  std::cout << summary_text(c.report);
  if (sim.consistency().mismatches != 0) {
    std::cerr << "error: training-serving consistency check failed on "
              << sim.consistency().mismatches << " audited requests\n";
    return kExitError;
  }
  if (strict && c.report.aborted) {
    std::cerr << "error: guardrail rollback on day " << c.report.series.back().day << "\n";
    return kExitStrictRollback;
  }
  return 0;
}

int cmd_compare(const Common& common, const std::vector<std::string>& scenarios, int seeds) {
  if (scenarios.size() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "compare needs exactly two --scenario files");
  }
  const ScenarioConfig a = load_scenario_config(scenarios[0]);
  const ScenarioConfig b = load_scenario_config(scenarios[1]);
  WorldConfig world = world_from(common);
  std::vector<RunComparison> per_seed;
  Json seeds_json = Json::array();
  for (int i = 0; i < seeds; ++i) {
    WorldConfig w = world;
    w.seed = world.seed + static_cast<std::uint64_t>(i);
    const RunReport ra = run_scenario(w, a);
    const RunReport rb = run_scenario(w, b);
    per_seed.push_back(compare_runs(ra, rb));
    seeds_json.push_back(Json{{"seed", w.seed}, {"comparison", per_seed.back()}});
  }
  const RunComparison mean = average_comparisons(per_seed);
  const std::string text = comparison_text(mean);
  if (!common.out_dir.empty()) {
    write_file(out_path(common.out_dir, "comparison.txt"), text);
    write_file(out_path(common.out_dir, "comparison.json"),
               Json{{"mean", mean}, {"seeds", seeds_json}}.dump(2) + "\n");
  }
  std::cout << text;
  return 0;
}

ieff::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

int cmd_serve(const Common& common, const std::string& scenario_path, const std::string& bind) {
  SimulationService service(world_from(common), scenario_from(scenario_path));
  HttpServer server(service);
  const int port = server.bind(bind);
  std::cout << "listening on port " << port << std::endl;
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return 0;
}

int cmd_replay(const Common& common, const std::string& checkpoint_path, bool verify) {
  const RunCheckpoint c = parse_checkpoint(read_text(checkpoint_path), checkpoint_path);
  if (!verify_summary(c.report, c.scenario.window_days)) {
    throw Error(ErrorCode::kParseError,
                checkpoint_path + ": stored summary does not match its series");
  }
  if (verify) {
    Simulation sim(c.world, c.scenario);
    sim.run_to_end();
    if (!(sim.report() == c.report) || !(sim.model() == c.model)) {
      std::cerr << "error: re-simulation diverges from " << checkpoint_path << "\n";
      return kExitError;
    }
  }
  if (!common.out_dir.empty()) {
    write_file(out_path(common.out_dir, "report.csv"), report_csv(c.report));
    write_file(out_path(common.out_dir, "summary.json"), summary_text(c.report));
  }
  std::cout << summary_text(c.report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic feature fading: simulator, control plane and API server"};
  app.require_subcommand(1);

  Common common;
  std::string scenario;
  std::vector<std::string> scenarios;
  bool strict = false;
  int seeds = 1;
  std::string bind = "127.0.0.1:8080";
  std::string checkpoint;
  bool verify = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "World config (JSON); default world when omitted");
    sub->add_option("--seed", common.seed, "Override the world seed");
    sub->add_option("--out-dir", common.out_dir, "Directory for artifacts");
  };

  auto* run = app.add_subcommand("run", "Run one scenario, write CSV, summary and checkpoint");
  add_common(run);
  run->add_option("--scenario", scenario, "Scenario config (JSON)")->required();
  run->add_flag("--strict", strict, "Exit nonzero when a guardrail rolls back a rollout");

  auto* compare = app.add_subcommand("compare", "Paired-seed phase report, first vs second");
  add_common(compare);
  compare->add_option("--scenario", scenarios, "Scenario configs, given twice")->required();
  compare->add_option("--seeds", seeds, "Paired seeds starting at --seed")
      ->check(CLI::Range(1, 1000));

  auto* serve = app.add_subcommand("serve", "Serve the /v1 API over a live session");
  add_common(serve);
  serve->add_option("--scenario", scenario, "Scenario config (JSON); baseline when omitted");
  serve->add_option("--bind", bind, "host:port to listen on");

  auto* replay = app.add_subcommand("replay", "Re-emit a run's report from its checkpoint");
  add_common(replay);
  replay->add_option("checkpoint", checkpoint, "checkpoint.json written by `run`")->required();
  replay->add_flag("--verify", verify, "Re-simulate and require an identical report");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(common, scenario, strict);
    if (*compare) return cmd_compare(common, scenarios, seeds);
    if (*serve) return cmd_serve(common, scenario, bind);
    if (*replay) return cmd_replay(common, checkpoint, verify);
  } catch (const Error& e) {
    std::cerr << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
