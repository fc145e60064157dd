// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 opdad contributors

#include "opdad/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "opdad/rng.hpp"
#include "opdad/stream_io.hpp"

namespace opdad {

using json = nlohmann::json;

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

ScheduleMode schedule_mode_from_string(const std::string& name) {
  if (name == "burst_markov") return ScheduleMode::burst_markov;
  if (name == "burst_exact_count") return ScheduleMode::burst_exact_count;
  if (name == "constant") return ScheduleMode::constant;
  throw ValidationError("unknown schedule_mode: " + name);
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

struct DetectionScore {
  bool attacked = false;
  bool detected = false;
  int delay = -1;
  double pfa = 0.0;
};

// flags[l], truth[l] for blocks l = 1..L (0-based storage). A true positive
// is a flag raised on or after the first attacked block and no later than
// the end of the attack window; earlier flags are false alarms.
DetectionScore score_decisions(const std::vector<bool>& flagged,
                               const std::vector<bool>& truth, int window_end) {
  DetectionScore score;
  const int blocks = static_cast<int>(flagged.size());
  int first_attacked = 0;
  for (int l = 1; l <= blocks; ++l) {
    if (truth[l - 1]) {
      first_attacked = l;
      break;
    }
  }
  score.attacked = first_attacked > 0;

  const int clean_limit = score.attacked ? first_attacked - 1 : blocks;
  int clean_flags = 0;
  for (int l = 1; l <= clean_limit; ++l) {
    if (flagged[l - 1]) ++clean_flags;
  }
  score.pfa = clean_limit > 0 ? static_cast<double>(clean_flags) / clean_limit : 0.0;

  if (score.attacked) {
    const int last = std::min(blocks, window_end);
    for (int l = first_attacked; l <= last; ++l) {
      if (flagged[l - 1]) {
        score.detected = true;
        score.delay = l - first_attacked;
        break;
      }
    }
  }
  return score;
}

double sample_standard_error(const std::vector<double>& values) {
  const auto n = values.size();
  if (n < 2) return 0.0;
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (static_cast<double>(n) * (n - 1)));
}

void format_double(std::ostream& out, double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  out << buffer;
}

}  // namespace

void ExperimentConfig::validate() const {
  scenario.validate();
  detector.validate();
  require(trials >= 1, "trials must be at least 1");
  if (sweep) {
    require(!sweep->values.empty(), "sweep needs at least one value");
    // Every sweep value must produce a valid configuration.
    for (double v : sweep->values) (void)with_sweep_value(*this, sweep->parameter, v);
  }
  for (const std::string& method : methods) {
    require(method == "opdad" || method == "ed" || method == "sd" || method == "dmf",
            "unknown method: " + method);
  }
}

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const json& s = j.at("scenario");
    read_field(s, "K", cfg.scenario.users);
    read_field(s, "N", cfg.scenario.jammers);
    read_field(s, "M", cfg.scenario.antennas);
    read_field(s, "L", cfg.scenario.blocks);
    read_field(s, "P_U", cfg.scenario.user_power_dbm);
    read_field(s, "P_J", cfg.scenario.jammer_power_dbm);
    read_field(s, "noise_power", cfg.scenario.noise_power_dbm);
    read_field(s, "window_start", cfg.scenario.window_start);
    read_field(s, "window_end", cfg.scenario.window_end);
    read_field(s, "n_r", cfg.scenario.burst_count);
    if (s.contains("schedule_mode")) {
      cfg.scenario.schedule_mode =
          schedule_mode_from_string(s.at("schedule_mode").get<std::string>());
    }
    read_field(s, "markov_persistence", cfg.scenario.markov_persistence);
    read_field(s, "shared_schedule", cfg.scenario.shared_schedule);
    if (s.contains("user_spread_deg")) {
      cfg.scenario.user_spread = deg_to_rad(s.at("user_spread_deg").get<double>());
    }
    if (s.contains("jammer_spread_deg")) {
      cfg.scenario.jammer_spread = deg_to_rad(s.at("jammer_spread_deg").get<double>());
    }
    read_field(s, "path_loss_exponent", cfg.scenario.path_loss_exponent);
    read_field(s, "user_distance_min", cfg.scenario.user_distance_min);
    read_field(s, "user_distance_max", cfg.scenario.user_distance_max);
    read_field(s, "jammer_distance_min", cfg.scenario.jammer_distance_min);
    read_field(s, "jammer_distance_max", cfg.scenario.jammer_distance_max);
    if (s.contains("min_aoa_separation_deg")) {
      cfg.scenario.min_aoa_separation =
          deg_to_rad(s.at("min_aoa_separation_deg").get<double>());
    }
    read_field(s, "training_blocks", cfg.scenario.training_blocks);
  }
  if (j.contains("detector")) {
    const json& d = j.at("detector");
    read_field(d, "epsilon", cfg.detector.epsilon);
    read_field(d, "target_pfa", cfg.detector.target_pfa);
    read_field(d, "bootstrap_dev_multiplier", cfg.detector.bootstrap_dev_multiplier);
  }
  read_field(j, "trials", cfg.trials);
  read_field(j, "seed", cfg.seed);
  if (j.contains("sweep")) {
    SweepSpec spec;
    spec.parameter = j.at("sweep").at("parameter").get<std::string>();
    spec.values = j.at("sweep").at("values").get<std::vector<double>>();
    cfg.sweep = spec;
  }
  if (j.contains("methods")) {
    cfg.methods = j.at("methods").get<std::vector<std::string>>();
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

ExperimentConfig with_sweep_value(const ExperimentConfig& base, const std::string& parameter,
                                  double value) {
  ExperimentConfig cfg = base;
  cfg.sweep.reset();
  if (parameter == "n_r") {
    cfg.scenario.burst_count = static_cast<int>(std::lround(value));
  } else if (parameter == "P_J") {
    cfg.scenario.jammer_power_dbm = value;
  } else if (parameter == "P_U") {
    cfg.scenario.user_power_dbm = value;
  } else if (parameter == "N") {
    cfg.scenario.jammers = static_cast<int>(std::lround(value));
  } else if (parameter == "K") {
    cfg.scenario.users = static_cast<int>(std::lround(value));
  } else if (parameter == "M") {
    cfg.scenario.antennas = static_cast<int>(std::lround(value));
  } else if (parameter == "L") {
    cfg.scenario.blocks = static_cast<int>(std::lround(value));
  } else if (parameter == "epsilon") {
    cfg.detector.epsilon = value;
  } else {
    throw ValidationError("unknown sweep parameter: " + parameter);
  }
  cfg.scenario.validate();
  cfg.detector.validate();
  return cfg;
}

double kappa_for_stream(const Eigen::MatrixXcd& complex_covariance) {
  const ComplexPrincipal principal = complex_principal(complex_covariance);
  // The raw 1/gap rule is clamped on both sides. Sample spectra can put
  // mu_1 - mu_2 arbitrarily close to zero, and an unclamped 1/gap then
  // drives the stepsize so hard that the iterate jumps to each new sample;
  // the 0.05 * lambda_1 floor bounds the settling horizon at ~40 blocks.
  // Very dominant spectra would get a stepsize too cold for the detector to
  // react inside the attack window; the 0.1 * lambda_1 ceiling keeps the
  // per-block response of the detection loop useful.
  const double mu1 = principal.eigenvalues(0);
  if (mu1 <= 0.0) {
    throw NumericalError("cannot set kappa: stream covariance has no eigengap");
  }
  const double gap =
      std::clamp(principal.eigengap(), 0.05 * mu1, 0.1 * mu1) / 2.0;
  return kappa_from_eigengap(gap);
}

OnlineDetector make_online_detector(const std::vector<Observation>& training,
                                    const DetectorConfig& cfg, RngStream& init_rng,
                                    std::optional<double> kappa) {
  require(!training.empty(), "detector assembly needs training observations");
  const double kappa_value =
      kappa ? *kappa : kappa_for_stream(complex_sample_covariance(training));
  const auto antennas = training.front().signal.size();
  TrackerState tracker =
      TrackerState::random_init(static_cast<int>(2 * antennas), kappa_value, init_rng);

  // Two-part training: a warm-up stretch for the cold-start convergence,
  // then a calibration tail whose features feed the centroid statistics.
  // Capping the tail at 60 blocks keeps early, still-converging features
  // (which would inflate the dispersion and desensitize the deviation test)
  // out of the statistics once the phase is long enough. The stepsize clock
  // runs continuously into the online phase, so the in-subspace wander rate
  // keeps decaying and the calibration tail bounds the online dispersion.
  // The end-of-training direction is the phase reference for every feature,
  // calibration features included.
  const std::size_t calibration_len =
      std::clamp<std::size_t>(training.size() / 2, 1, 60);
  const std::size_t warm = training.size() - calibration_len;
  for (std::size_t i = 0; i < warm; ++i) {
    tracker.update(training[i].real_embedded());
  }

  std::vector<Eigen::VectorXd> estimates;
  estimates.reserve(training.size() - warm);
  for (std::size_t i = warm; i < training.size(); ++i) {
    tracker.update(training[i].real_embedded());
    estimates.push_back(tracker.estimate());
  }
  const Eigen::VectorXcd reference = unembed(tracker.estimate());

  std::vector<DensityFeature> calibration;
  calibration.reserve(estimates.size());
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const Eigen::VectorXd aligned = phase_align(estimates[i], reference);
    const int block = training[warm + i].block_index;
    calibration.push_back(cfg.feature_mode == FeatureMode::phase
                              ? phase_feature(aligned, block)
                              : density_feature(aligned, block));
  }

  return OnlineDetector(std::move(tracker), Centroids::init(calibration), cfg, reference);
}

TrialResult run_trial(const ExperimentConfig& cfg, std::uint64_t trial_seed,
                      bool keep_events) {
  cfg.validate();
  RngStream rng(trial_seed);
  const Scenario scenario(cfg.scenario, rng);
  const std::vector<Observation> training =
      scenario.training_phase(cfg.scenario.training_blocks, rng);
  const std::vector<Observation> online = scenario.online_phase(rng);

  int window_end = cfg.scenario.window_end;
  for (const AttackSchedule& schedule : scenario.schedules()) {
    window_end = std::max(window_end, schedule.window_end);
  }

  std::vector<bool> truth(online.size());
  for (std::size_t i = 0; i < online.size(); ++i) truth[i] = online[i].truth_attacked;

  TrialResult result;
  result.first_attacked = scenario.first_attacked_block();

  for (const std::string& method : cfg.methods) {
    MethodMetrics metrics;
    metrics.method = method;
    std::vector<bool> flagged(online.size(), false);

    if (method == "opdad") {
      OnlineDetector detector = make_online_detector(training, cfg.detector, rng);
      const double start = now_seconds();
      std::vector<DetectionEvent> events = run_online(online, detector);
      metrics.seconds_per_block = (now_seconds() - start) / online.size();
      for (std::size_t i = 0; i < events.size(); ++i) {
        flagged[i] = events[i].decision == Decision::jamming;
      }
      const ComplexPrincipal reference =
          complex_principal(complex_sample_covariance(online));
      metrics.final_gap =
          EmbeddedReference(reference.vector).gap_to(detector.tracker().estimate());
      if (keep_events) result.events = std::move(events);
    } else if (method == "ed") {
      EnergyDetector detector =
          EnergyDetector::calibrate(training, cfg.detector.target_pfa);
      const double start = now_seconds();
      for (std::size_t i = 0; i < online.size(); ++i) flagged[i] = detector.step(online[i]);
      metrics.seconds_per_block = (now_seconds() - start) / online.size();
      metrics.final_gap = kNan;
    } else if (method == "sd") {
      SubspaceDetector detector = SubspaceDetector::calibrate(training);
      const double start = now_seconds();
      for (std::size_t i = 0; i < online.size(); ++i) flagged[i] = detector.step(online[i]);
      metrics.seconds_per_block = (now_seconds() - start) / online.size();
      metrics.final_gap = kNan;
    } else if (method == "dmf") {
      // Oracle row: batch principal direction per block is the brute-force
      // reference; only the timing and gap columns are meaningful.
      const double start = now_seconds();
      const ComplexPrincipal reference =
          complex_principal(complex_sample_covariance(online));
      metrics.seconds_per_block = (now_seconds() - start) / online.size();
      (void)reference;
      metrics.final_gap = 0.0;
    }

    const DetectionScore score = score_decisions(flagged, truth, window_end);
    metrics.attacked = score.attacked;
    metrics.detected = score.detected;
    metrics.delay = score.delay;
    metrics.pfa = score.pfa;
    result.methods.push_back(std::move(metrics));
  }
  return result;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, int threads) {
  cfg.validate();
  if (threads <= 0) {
    threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  }

  std::vector<std::pair<std::string, double>> points;
  if (cfg.sweep) {
    for (double v : cfg.sweep->values) points.emplace_back(cfg.sweep->parameter, v);
  } else {
    points.emplace_back("none", 0.0);
  }

  std::vector<SweepRow> rows;
  for (std::size_t p = 0; p < points.size(); ++p) {
    const ExperimentConfig point_cfg =
        cfg.sweep ? with_sweep_value(cfg, points[p].first, points[p].second) : cfg;
    const std::uint64_t point_seed = derive_seed(cfg.seed, p);

    std::vector<TrialResult> results(cfg.trials);
    std::atomic<int> next{0};
    auto worker = [&]() {
      for (int i = next.fetch_add(1); i < cfg.trials; i = next.fetch_add(1)) {
        results[i] = run_trial(point_cfg, derive_seed(point_seed, i));
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (std::thread& t : pool) t.join();
    }

    for (const std::string& method : cfg.methods) {
      SweepRow row;
      row.sweep_param = points[p].first;
      row.value = points[p].second;
      row.method = method;
      row.trials = cfg.trials;

      int attacked = 0, missed = 0;
      std::vector<double> delays, misses;
      double pfa_total = 0.0, gap_total = 0.0, time_total = 0.0;
      int gap_count = 0;
      for (const TrialResult& trial : results) {
        const auto it = std::find_if(trial.methods.begin(), trial.methods.end(),
                                     [&](const MethodMetrics& m) { return m.method == method; });
        const MethodMetrics& m = *it;
        pfa_total += m.pfa;
        time_total += m.seconds_per_block;
        if (!std::isnan(m.final_gap)) {
          gap_total += m.final_gap;
          ++gap_count;
        }
        if (m.attacked) {
          ++attacked;
          if (m.detected) {
            delays.push_back(static_cast<double>(m.delay));
            misses.push_back(0.0);
          } else {
            ++missed;
            misses.push_back(1.0);
          }
        }
      }
      row.p_fa = pfa_total / cfg.trials;
      row.wall_time_per_block = time_total / cfg.trials;
      row.mean_gap = gap_count > 0 ? gap_total / gap_count : kNan;
      row.p_miss = attacked > 0 ? static_cast<double>(missed) / attacked : kNan;
      row.p_miss_se = sample_standard_error(misses);
      if (!delays.empty()) {
        row.avg_delay =
            std::accumulate(delays.begin(), delays.end(), 0.0) / delays.size();
        row.avg_delay_se = sample_standard_error(delays);
      } else {
        row.avg_delay = kNan;
        row.avg_delay_se = kNan;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "sweep_param,value,method,p_miss,avg_delay,p_fa,mean_gap,"
         "wall_time_per_block,trials,p_miss_se,avg_delay_se\n";
  for (const SweepRow& r : rows) {
    out << r.sweep_param << ',';
    format_double(out, r.value);
    out << ',' << r.method << ',';
    format_double(out, r.p_miss);
    out << ',';
    format_double(out, r.avg_delay);
    out << ',';
    format_double(out, r.p_fa);
    out << ',';
    format_double(out, r.mean_gap);
    out << ',';
    format_double(out, r.wall_time_per_block);
    out << ',' << r.trials << ',';
    format_double(out, r.p_miss_se);
    out << ',';
    format_double(out, r.avg_delay_se);
    out << '\n';
  }
}

namespace {


double time_per_block(const std::function<void()>& step, int min_steps, double min_seconds) {
  int steps = 0;
  const double start = now_seconds();
  double elapsed = 0.0;
  while (steps < min_steps || elapsed < min_seconds) {
    step();
    ++steps;
    elapsed = now_seconds() - start;
    if (steps >= 1000000) break;
  }
  return elapsed / steps;
}

}  // namespace

std::vector<BenchRow> bench(const std::vector<std::string>& methods,
                            const std::vector<int>& antenna_counts, std::uint64_t seed) {
  require(!methods.empty() && !antenna_counts.empty(), "bench needs methods and sizes");
  for (std::size_t i = 1; i < antenna_counts.size(); ++i) {
    require(antenna_counts[i] > antenna_counts[i - 1],
            "antenna counts must be ascending");
  }

  std::vector<BenchRow> rows;
  for (int m : antenna_counts) {
    RngStream rng(derive_seed(seed, static_cast<std::uint64_t>(m)));
    // Pre-generated synthetic blocks so generation cost stays out of the timing.
    const int pool_size = 64;
    std::vector<Observation> pool(pool_size);
    for (int i = 0; i < pool_size; ++i) {
      pool[i].block_index = i + 1;
      pool[i].signal.resize(m);
      for (int a = 0; a < m; ++a) pool[i].signal(a) = rng.cgaussian();
    }
    std::vector<Eigen::VectorXd> embedded;
    embedded.reserve(pool_size);
    for (const Observation& obs : pool) embedded.push_back(obs.real_embedded());

    for (const std::string& method : methods) {
      BenchRow row;
      row.method = method;
      row.antennas = m;
      if (method == "opdad") {
        TrackerState tracker = TrackerState::random_init(2 * m, 1.0, rng);
        int cursor = 0;
        row.seconds_per_block = time_per_block(
            [&]() {
              tracker.update(embedded[cursor]);
              cursor = (cursor + 1) % pool_size;
            },
            2000, 0.05);
      } else if (method == "ed") {
        EnergyDetector detector(10, std::numeric_limits<double>::infinity());
        int cursor = 0;
        row.seconds_per_block = time_per_block(
            [&]() {
              detector.step(pool[cursor]);
              cursor = (cursor + 1) % pool_size;
            },
            2000, 0.05);
      } else if (method == "sd") {
        SubspaceDetector detector(10, m + 1);
        for (int i = 0; i < 10; ++i) detector.step(pool[i]);  // fill the window
        int cursor = 10;
        row.seconds_per_block = time_per_block(
            [&]() {
              detector.step(pool[cursor]);
              cursor = (cursor + 1) % pool_size;
            },
            3, 0.2);
      } else {
        throw ValidationError("unknown bench method: " + method);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "method,M,seconds_per_block\n";
  for (const BenchRow& r : rows) {
    out << r.method << ',' << r.antennas << ',';
    format_double(out, r.seconds_per_block);
    out << '\n';
  }
}

double bench_loglog_slope(const std::vector<BenchRow>& rows, const std::string& method) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const BenchRow& r : rows) {
    if (r.method != method) continue;
    const double x = std::log(static_cast<double>(r.antennas));
    const double y = std::log(r.seconds_per_block);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  require(n >= 2, "slope fit needs at least two sizes for method " + method);
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {


// Stationary synthetic stream y = Lambda^{1/2} g in the eigenbasis; the true
// principal direction is the first canonical axis.
Eigen::VectorXd draw_spectrum_sample(const Eigen::VectorXd& sqrt_eigenvalues,
                                     RngStream& rng) {
  Eigen::VectorXd y(sqrt_eigenvalues.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = sqrt_eigenvalues(i) * rng.gaussian();
  return y;
}

}  // namespace

std::vector<BoundVerifyRow> verify_bounds(std::uint64_t seed, int trials_per_batch,
                                          int batches) {
  require(trials_per_batch >= 10 && batches >= 1, "verify_bounds needs enough trials");
  std::vector<BoundVerifyRow> rows;

  // Theorem 1: deterministic initialization at the principal axis (inside
  // the warm event), constant stepsize.
  {
    SpectrumParams spectrum;
    spectrum.eigenvalues.resize(16);
    spectrum.eigenvalues(0) = 2.0;
    for (int i = 1; i < 16; ++i) spectrum.eigenvalues(i) = 1.0;
    BoundInputs in;
    in.beta = 0.01;
    in.xi = 0.05;
    in.c = 0.5;
    in.delta = 0.25;
    const long l_eval = 600;
    const TheoremBound bound = theorem1_bound(spectrum, in, l_eval);
    Eigen::VectorXd sqrt_ev = spectrum.eigenvalues.cwiseSqrt();

    int passes = 0;
    double mean_total = 0.0;
    for (int b = 0; b < batches; ++b) {
      double batch_mean = 0.0;
      for (int t = 0; t < trials_per_batch; ++t) {
        RngStream rng(derive_seed(seed, 1000 + b * trials_per_batch + t));
        Eigen::VectorXd v = Eigen::VectorXd::Zero(16);
        v(0) = 1.0;
        for (long l = 0; l < l_eval; ++l) {
          oja_step(v, draw_spectrum_sample(sqrt_ev, rng), in.beta);
        }
        batch_mean += tan_angle_sq(v, Eigen::VectorXd::Unit(16, 0));
      }
      batch_mean /= trials_per_batch;
      mean_total += batch_mean;
      if (batch_mean <= bound.bound) ++passes;
    }
    BoundVerifyRow row;
    row.theorem = "theorem1";
    row.parameters = "2M=16,spike=2:1,beta=0.01,xi=0.05,c=0.5,l=600";
    row.bound = bound.bound;
    row.empirical_mean_tan_sq = mean_total / batches;
    row.pass_fraction = static_cast<double>(passes) / batches;
    rows.push_back(std::move(row));
  }

  // Theorem 2: uniform random initialization, constant stepsize small enough
  // for the scaling hypothesis.
  {
    SpectrumParams spectrum;
    spectrum.eigenvalues.resize(16);
    spectrum.eigenvalues(0) = 2.0;
    for (int i = 1; i < 16; ++i) spectrum.eigenvalues(i) = 1.0;
    BoundInputs in;
    in.beta = 0.001;
    in.xi = 0.05;
    in.c = 0.5;
    in.delta = 0.25;
    const long l_eval = 10000;
    const TheoremBound bound = theorem2_bound(spectrum, in, l_eval);
    Eigen::VectorXd sqrt_ev = spectrum.eigenvalues.cwiseSqrt();

    int passes = 0;
    double mean_total = 0.0;
    for (int b = 0; b < batches; ++b) {
      double batch_mean = 0.0;
      for (int t = 0; t < trials_per_batch; ++t) {
        RngStream rng(derive_seed(seed, 2000000 + b * trials_per_batch + t));
        TrackerState init = TrackerState::random_init(16, 0.0, rng);
        Eigen::VectorXd v = init.estimate();
        for (long l = 0; l < l_eval; ++l) {
          oja_step(v, draw_spectrum_sample(sqrt_ev, rng), in.beta);
        }
        batch_mean += tan_angle_sq(v, Eigen::VectorXd::Unit(16, 0));
      }
      batch_mean /= trials_per_batch;
      mean_total += batch_mean;
      if (batch_mean <= bound.bound) ++passes;
    }
    BoundVerifyRow row;
    row.theorem = "theorem2";
    row.parameters = "2M=16,spike=2:1,beta=0.001,xi=0.05,delta=0.25,l=10000";
    row.bound = bound.bound;
    row.empirical_mean_tan_sq = mean_total / batches;
    row.pass_fraction = static_cast<double>(passes) / batches;
    rows.push_back(std::move(row));
  }

  // Theorem 3: finite-sample stepsize log(L)/(gap L), random initialization;
  // pass fraction counts trials whose final tan^2 lies under psi'.
  {
    SpectrumParams spectrum;
    spectrum.eigenvalues.resize(16);
    spectrum.eigenvalues(0) = 1.0;
    for (int i = 1; i < 16; ++i) spectrum.eigenvalues(i) = 0.01;
    const long sample_size = 2000;
    const double delta = 0.25;
    const double xi = 0.05;
    const double psi_prime = theorem3_bound(spectrum, sample_size, delta, xi);
    const double beta = theorem3_stepsize(spectrum, sample_size);
    Eigen::VectorXd sqrt_ev = spectrum.eigenvalues.cwiseSqrt();

    int below = 0;
    double mean_total = 0.0;
    const int total_trials = trials_per_batch * batches;
    for (int t = 0; t < total_trials; ++t) {
      RngStream rng(derive_seed(seed, 3000000 + t));
      TrackerState init = TrackerState::random_init(16, 0.0, rng);
      Eigen::VectorXd v = init.estimate();
      for (long l = 0; l < sample_size; ++l) {
        oja_step(v, draw_spectrum_sample(sqrt_ev, rng), beta);
      }
      const double tan_sq = tan_angle_sq(v, Eigen::VectorXd::Unit(16, 0));
      mean_total += tan_sq;
      if (tan_sq <= psi_prime) ++below;
    }
    BoundVerifyRow row;
    row.theorem = "theorem3";
    row.parameters = "2M=16,spike=1:0.01,L=2000,delta=0.25,xi=0.05";
    row.bound = psi_prime;
    row.empirical_mean_tan_sq = mean_total / total_trials;
    row.pass_fraction = static_cast<double>(below) / total_trials;
    rows.push_back(std::move(row));
  }

  return rows;
}

void write_bounds_csv(std::ostream& out, const std::vector<BoundVerifyRow>& rows) {
  out << "theorem,parameters,bound,empirical_mean_tan_sq,pass_fraction\n";
  for (const BoundVerifyRow& r : rows) {
    out << r.theorem << ',' << r.parameters << ',';
    format_double(out, r.bound);
    out << ',';
    format_double(out, r.empirical_mean_tan_sq);
    out << ',';
    format_double(out, r.pass_fraction);
    out << '\n';
  }
}

std::vector<OracleCompareRow> oracle_compare(const ExperimentConfig& cfg, int seeds,
                                             int blocks) {
  require(seeds >= 1, "oracle_compare needs at least one seed");
  ExperimentConfig local = cfg;
  local.sweep.reset();
  if (blocks > 0) {
    local.scenario.blocks = blocks;
    local.scenario.window_end = std::min(local.scenario.window_end, blocks);
    local.scenario.window_start = std::min(local.scenario.window_start,
                                           local.scenario.window_end);
    local.scenario.burst_count = std::min(
        local.scenario.burst_count,
        local.scenario.window_end - local.scenario.window_start + 1);
  }
  local.validate();

  std::vector<OracleCompareRow> rows;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(derive_seed(local.seed, static_cast<std::uint64_t>(s)));
    const Scenario scenario(local.scenario, rng);
    const std::vector<Observation> online = scenario.online_phase(rng);

    const double kappa = kappa_for_stream(scenario.population_covariance(false));
    TrackerState tracker =
        TrackerState::random_init(2 * local.scenario.antennas, kappa, rng);

    const ComplexPrincipal reference =
        complex_principal(complex_sample_covariance(online));
    const EmbeddedReference plane(reference.vector);

    for (const Observation& obs : online) {
      tracker.update(obs.real_embedded());
      OracleCompareRow row;
      row.seed_index = s;
      row.block = obs.block_index;
      row.gap = plane.gap_to(tracker.estimate());
      row.angle = plane.angle_to(tracker.estimate());
      rows.push_back(row);
    }
  }
  return rows;
}

void write_oracle_csv(std::ostream& out, const std::vector<OracleCompareRow>& rows) {
  out << "seed,block,gap,angle\n";
  for (const OracleCompareRow& r : rows) {
    out << r.seed_index << ',' << r.block << ',';
    format_double(out, r.gap);
    out << ',';
    format_double(out, r.angle);
    out << '\n';
  }
}

void write_events_csv(std::ostream& out, const std::vector<DetectionEvent>& events,
                      const std::vector<int>& truth_override) {
  out << "block,decision,ratio,deviation,truth\n";
  for (std::size_t i = 0; i < events.size(); ++i) {
    const DetectionEvent& e = events[i];
    out << e.block_index << ','
        << (e.decision == Decision::jamming ? "jamming" : "normal") << ',';
    format_double(out, e.ratio);
    out << ',';
    format_double(out, e.deviation);
    out << ',';
    if (!truth_override.empty()) {
      out << truth_override[i];
    } else {
      out << (e.truth_attacked ? 1 : 0);
    }
    out << '\n';
  }
}

double spearman_rho(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "spearman needs matched series");
  auto ranks = [](const std::vector<double>& v) {
    const auto n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return v[a] < v[b];
    });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * (i + j) + 1.0;  // average rank for ties
      for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
      i = j + 1;
    }
    return rank;
  };
  const std::vector<double> rx = ranks(x);
  const std::vector<double> ry = ranks(y);
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  require(sxx > 0.0 && syy > 0.0, "spearman: constant series");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace opdad
