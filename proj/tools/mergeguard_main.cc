/*
 * Copyright 2026 The mergeguard Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mergeguard/error.h"
#include "mergeguard/eval_harness.h"
#include "mergeguard/scan_log.h"
#include "mergeguard/serialization.h"
#include "mergeguard/simulator.h"

namespace fs = std::filesystem;
using namespace mergeguard;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> detectors;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool detectors) {
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Random seed");
  if (detectors) {
    cmd->add_option("--detectors", c.detectors, "Detectors to run, comma separated")->delimiter(',');
  }
}

HarnessConfig load(const Common& c) {
  HarnessConfig config = c.config.empty() ? HarnessConfig{} : load_config(c.config);
  if (c.seed) config.seed = *c.seed;
  if (!c.detectors.empty()) {
    config.detectors = c.detectors;
    config.live_detectors = c.detectors;
  }
  config.validate();
  return config;
}

// Log files named directly or found as *.jsonl in directories, sorted.
std::vector<fs::path> log_paths(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const std::string& in : inputs) {
    if (!fs::is_directory(in)) {
      out.emplace_back(in);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(in)) {
      const fs::path& p = entry.path();
      const std::string name = p.filename().string();
      if (p.extension() == ".jsonl" && name.find(".merges.") == std::string::npos) found.push_back(p);
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  if (out.empty()) throw Error("no scan logs given");
  return out;
}

SequenceLog load_log(const fs::path& path, const std::string& merges) {
  SequenceLog log = ingest_log(path);
  if (!merges.empty()) log = with_merges(log, read_merge_spec_file(merges));
  return log;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void print_summary(const std::vector<SequenceResult>& results, const HarnessConfig& config) {
  for (const std::string& name : config.detectors) {
    std::string auc = "n/a";
    try {
      auc = format_double(compute_roc(results, name).auc);
    } catch (const Error&) {
    }
    double ms = 0.0;
    std::size_t n = 0;
    for (const SequenceResult& r : results) {
      const auto it = r.detectors.find(name);
      if (it == r.detectors.end()) continue;
      ms += it->second.total_ms;
      n += it->second.evaluations;
    }
    std::cout << name << ": auc " << auc << ", " << std::fixed << std::setprecision(2)
              << (n ? ms / static_cast<double>(n) : 0.0) << " ms per vertex\n" << std::defaultfloat;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-epoch pose graph merging with invalid merge detection"};
  app.require_subcommand(1);

  Common sim;
  std::string scenario, scenario_file;
  bool invalid = false, suite = false;
  auto* simulate = app.add_subcommand("simulate", "Simulate scenarios into scan logs");
  add_common(simulate, sim, false);
  auto* named = simulate->add_option("--scenario", scenario,
                                     "crossing, twin_corridors, symmetric_room or flats");
  auto* file = simulate->add_option("--world", scenario_file, "Scenario file (world and script)")
                   ->check(CLI::ExistingFile);
  auto* all = simulate->add_flag("--suite", suite, "The whole evaluation suite");
  named->excludes(file)->excludes(all);
  file->excludes(all);
  simulate->add_flag("--invalid", invalid, "Invalid variant of a named scenario");
  simulate->add_option("--out", sim.out, "Output directory")->required();

  Common run_opts;
  std::vector<std::string> logs;
  std::string merges;
  bool run_suite_flag = false;
  std::optional<std::size_t> threads;
  auto* run = app.add_subcommand("run", "Run detectors over scan logs");
  add_common(run, run_opts, true);
  run->add_option("logs", logs, "Scan log files or directories");
  run->add_option("--merges", merges, "Merge spec replacing the log's triggers")->check(CLI::ExistingFile);
  run->add_flag("--suite", run_suite_flag, "Simulate and run the evaluation suite");
  run->add_option("--threads", threads, "Worker threads");
  run->add_option("--out", run_opts.out, "Output directory")->default_val(".");

  std::string results_in, eval_out;
  auto* eval = app.add_subcommand("eval", "ROC curves and summary from results.csv");
  eval->add_option("results", results_in, "results.csv or the directory holding it")->required();
  eval->add_option("--out", eval_out, "Output directory, defaults to the results directory");

  Common live_opts;
  std::string live_log, live_merges;
  auto* live = app.add_subcommand("live", "Replay a scan log with unmerging enabled");
  add_common(live, live_opts, true);
  live->add_option("log", live_log, "Scan log")->required()->check(CLI::ExistingFile);
  live->add_option("--merges", live_merges, "Merge spec replacing the log's triggers")->check(CLI::ExistingFile);
  live->add_option("--out", live_opts.out, "Event CSV file, stdout if absent");

  Common show;
  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration");
  add_common(config_cmd, show, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) {
      const HarnessConfig config = load(sim);
      std::vector<Scenario> scenarios;
      if (suite) {
        scenarios = suite_scenarios(config.suite);
      } else if (!scenario_file.empty()) {
        scenarios.push_back(read_scenario_file(scenario_file));
      } else if (!scenario.empty()) {
        scenarios.push_back(named_scenario(scenario, invalid, config.seed));
      } else {
        throw Error("simulate needs --scenario, --world or --suite");
      }
      fs::create_directories(sim.out);
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        const Scenario& s = scenarios[i];
        const SequenceLog log = run_scenario(s.world, s.script, config.sensor, config.seed + i, s.id);
        write_scan_log_file(fs::path(sim.out) / (s.id + ".jsonl"), log);
        write_merge_spec_file(fs::path(sim.out) / (s.id + ".merges.jsonl"), log.merges());
        std::cout << s.id << ": " << log.scan_count() << " scans, " << log.merges().size() << " merges\n";
      }
    } else if (*run) {
      HarnessConfig config = load(run_opts);
      if (threads) config.threads = *threads;
      std::vector<SequenceLog> sequences;
      if (run_suite_flag) {
        if (!logs.empty()) throw Error("--suite takes no log files");
        sequences = simulate_suite(config);
      } else {
        const auto paths = log_paths(logs);
        if (!merges.empty() && paths.size() != 1) throw Error("--merges needs exactly one scan log");
        for (const fs::path& p : paths) sequences.push_back(load_log(p, merges));
      }
      const auto start = std::chrono::steady_clock::now();
      const auto results = run_suite(sequences, config);
      fs::create_directories(run_opts.out);
      write_results_csv(fs::path(run_opts.out) / "results.csv", results);
      std::cout << results.size() << " sequences in " << std::fixed << std::setprecision(1)
                << seconds_since(start) << " s\n" << std::defaultfloat;
      print_summary(results, config);
    } else if (*eval) {
      fs::path in(results_in);
      if (fs::is_directory(in)) in /= "results.csv";
      const fs::path out = eval_out.empty() ? in.parent_path() : fs::path(eval_out);
      emit_reports(read_results_csv(in), out.empty() ? fs::path(".") : out);
    } else if (*live) {
      const HarnessConfig config = load(live_opts);
      const std::string events = format_live_events(live_mode(load_log(live_log, live_merges), config));
      if (live_opts.out.empty()) {
        std::cout << events;
      } else {
        std::ofstream out(live_opts.out);
        out << events;
        if (!out) throw Error("cannot write " + live_opts.out);
      }
    } else if (*config_cmd) {
      std::cout << dump_config(load(show));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
