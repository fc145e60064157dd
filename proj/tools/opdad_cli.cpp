// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "opdad/harness.hpp"
#include "opdad/stream_io.hpp"

namespace {

using namespace opdad;

ExperimentConfig resolve_config(const std::string& config_path,
                                std::optional<std::uint64_t> seed,
                                std::optional<int> trials) {
  ExperimentConfig cfg =
      config_path.empty() ? parse_config("{}") : load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "cannot open output file: " + path);
  return out;
}

// simulate: synthesize one trial's observation stream (training blocks first,
// then the online blocks) and write it in the binary stream format.
int cmd_simulate(const std::string& config_path, std::uint64_t seed,
                 const std::string& out_path, const std::string& truth_path) {
  ExperimentConfig cfg = resolve_config(config_path, seed, std::nullopt);
  RngStream rng(derive_seed(cfg.seed, 0));
  const Scenario scenario(cfg.scenario, rng);
  std::vector<Observation> blocks =
      scenario.training_phase(cfg.scenario.training_blocks, rng);
  const std::vector<Observation> online = scenario.online_phase(rng);
  blocks.insert(blocks.end(), online.begin(), online.end());
  write_observation_stream(out_path, blocks, cfg.scenario.antennas);
  if (!truth_path.empty()) {
    std::ofstream truth = open_output(truth_path);
    truth << "block,truth\n";
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      truth << (i + 1) << ',' << (blocks[i].truth_attacked ? 1 : 0) << '\n';
    }
  }
  std::cerr << "wrote " << blocks.size() << " blocks ("
            << cfg.scenario.training_blocks << " training) to " << out_path << "\n";
  return 0;
}

std::vector<int> load_truth(const std::string& path, std::size_t blocks) {
  std::vector<int> truth(blocks, -1);
  std::ifstream in(path);
  require(in.good(), "cannot open truth file: " + path);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) continue;
    const int block = std::stoi(line.substr(0, comma));
    const int value = std::stoi(line.substr(comma + 1));
    if (block >= 1 && static_cast<std::size_t>(block) <= blocks) {
      truth[block - 1] = value;
    }
  }
  return truth;
}

// detect: replay a stream file through the online detector and emit one CSV
// event line per online block.
int cmd_detect(const std::string& in_path, int training_blocks, double epsilon,
               std::uint64_t seed, const std::string& truth_path,
               const std::string& out_path) {
  const ObservationStream stream = read_observation_stream(in_path);
  require(training_blocks >= 1, "replay needs at least one training block");
  require(stream.blocks.size() > static_cast<std::size_t>(training_blocks),
          "stream has no online blocks after the training prefix");

  std::vector<Observation> blocks;
  blocks.reserve(stream.blocks.size());
  for (std::size_t i = 0; i < stream.blocks.size(); ++i) {
    Observation obs;
    obs.signal = stream.blocks[i];
    obs.block_index = static_cast<int>(i + 1);
    blocks.push_back(std::move(obs));
  }
  const std::vector<Observation> training(blocks.begin(),
                                          blocks.begin() + training_blocks);
  const std::vector<Observation> online(blocks.begin() + training_blocks, blocks.end());

  DetectorConfig det;
  det.epsilon = epsilon;
  RngStream rng(seed);
  OnlineDetector detector = make_online_detector(training, det, rng);
  std::vector<DetectionEvent> events;
  events.reserve(online.size());
  for (const Observation& obs : online) events.push_back(detector.step(obs));

  std::vector<int> truth(online.size(), -1);
  if (!truth_path.empty()) {
    const std::vector<int> all = load_truth(truth_path, blocks.size());
    for (std::size_t i = 0; i < online.size(); ++i) truth[i] = all[training_blocks + i];
  }

  if (out_path.empty()) {
    write_events_csv(std::cout, events, truth);
  } else {
    std::ofstream out = open_output(out_path);
    write_events_csv(out, events, truth);
  }
  return 0;
}

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<int> trials, int threads, const std::string& out_path) {
  const ExperimentConfig cfg = resolve_config(config_path, seed, trials);
  const std::vector<SweepRow> rows = sweep(cfg, threads);
  if (out_path.empty()) {
    write_sweep_csv(std::cout, rows);
  } else {
    std::ofstream out = open_output(out_path);
    write_sweep_csv(out, rows);
  }
  return 0;
}

int cmd_verify_bounds(std::uint64_t seed, int trials, int batches,
                      const std::string& out_path) {
  const std::vector<BoundVerifyRow> rows = verify_bounds(seed, trials, batches);
  if (out_path.empty()) {
    write_bounds_csv(std::cout, rows);
  } else {
    std::ofstream out = open_output(out_path);
    write_bounds_csv(out, rows);
  }
  return 0;
}

int cmd_oracle_compare(const std::string& config_path, std::optional<std::uint64_t> seed,
                       int seeds, int blocks, const std::string& out_path) {
  const ExperimentConfig cfg = resolve_config(config_path, seed, std::nullopt);
  const std::vector<OracleCompareRow> rows = oracle_compare(cfg, seeds, blocks);
  if (out_path.empty()) {
    write_oracle_csv(std::cout, rows);
  } else {
    std::ofstream out = open_output(out_path);
    write_oracle_csv(out, rows);
  }
  return 0;
}

int cmd_bench(const std::string& methods_csv, const std::string& sizes_csv,
              std::uint64_t seed, const std::string& out_path) {
  std::vector<std::string> methods;
  std::stringstream ms(methods_csv);
  std::string token;
  while (std::getline(ms, token, ',')) methods.push_back(token);
  std::vector<int> sizes;
  std::stringstream ss(sizes_csv);
  while (std::getline(ss, token, ',')) sizes.push_back(std::stoi(token));

  const std::vector<BenchRow> rows = bench(methods, sizes, seed);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file = open_output(out_path);
    out = &file;
  }
  write_bench_csv(*out, rows);
  for (const std::string& method : methods) {
    std::cerr << method << " log-log slope: " << bench_loglog_slope(rows, method)
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "opdad: streaming principal-direction tracking and burst-jamming detection"};
  app.require_subcommand(1);

  std::string config_path, out_path, truth_path, in_path;
  std::optional<std::uint64_t> seed_opt;
  std::optional<int> trials_opt;
  std::uint64_t seed = 1;
  int threads = 0, training = 100, trials = 200, batches = 10, seeds = 3, blocks = 0;
  double epsilon = 0.13;
  std::string methods = "opdad,ed,sd";
  std::string sizes = "32,64,128,256,512";

  auto* simulate = app.add_subcommand("simulate", "write an observation stream file");
  simulate->add_option("--config", config_path, "experiment config (json)");
  simulate->add_option("--seed", seed, "master seed");
  simulate->add_option("--out", out_path, "output stream file")->required();
  simulate->add_option("--truth-out", truth_path, "ground-truth sidecar csv");

  auto* detect = app.add_subcommand("detect", "replay a stream file, emit events csv");
  detect->add_option("--in", in_path, "input stream file")->required();
  detect->add_option("--training", training, "training blocks at the head of the file");
  detect->add_option("--epsilon", epsilon, "decision ratio threshold");
  detect->add_option("--seed", seed, "tracker initialization seed");
  detect->add_option("--truth", truth_path, "ground-truth sidecar csv");
  detect->add_option("--out", out_path, "events csv (stdout when omitted)");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a metric sweep, emit csv");
  sweep_cmd->add_option("--config", config_path, "experiment config (json)");
  sweep_cmd->add_option("--seed", seed_opt, "master seed override");
  sweep_cmd->add_option("--trials", trials_opt, "trials per sweep point override");
  sweep_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
  sweep_cmd->add_option("--out", out_path, "metrics csv (stdout when omitted)");

  auto* verify = app.add_subcommand("verify-bounds",
                                    "Monte Carlo check of the convergence bounds");
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--trials", trials, "trials per batch");
  verify->add_option("--batches", batches, "batches per theorem");
  verify->add_option("--out", out_path, "csv output (stdout when omitted)");

  auto* oracle = app.add_subcommand("oracle-compare",
                                    "tracker vs batch principal direction curves");
  oracle->add_option("--config", config_path, "experiment config (json)");
  oracle->add_option("--seed", seed_opt, "master seed override");
  oracle->add_option("--seeds", seeds, "number of independent runs");
  oracle->add_option("--blocks", blocks, "override the stream length");
  oracle->add_option("--out", out_path, "csv output (stdout when omitted)");

  auto* bench_cmd = app.add_subcommand("bench", "per-block wall time by method and M");
  bench_cmd->add_option("--methods", methods, "comma-separated methods");
  bench_cmd->add_option("--m-list", sizes, "comma-separated antenna counts");
  bench_cmd->add_option("--seed", seed, "stream seed");
  bench_cmd->add_option("--out", out_path, "csv output (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(config_path, seed, out_path, truth_path);
    if (detect->parsed()) {
      return cmd_detect(in_path, training, epsilon, seed, truth_path, out_path);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(config_path, seed_opt, trials_opt, threads, out_path);
    }
    if (verify->parsed()) return cmd_verify_bounds(seed, trials, batches, out_path);
    if (oracle->parsed()) {
      return cmd_oracle_compare(config_path, seed_opt, seeds, blocks, out_path);
    }
    if (bench_cmd->parsed()) return cmd_bench(methods, sizes, seed, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
