#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "softshock/quadops.hpp"
#include "softshock/stats.hpp"

namespace softshock {

enum class Experiment {
  Tw1Table,
  SoftShockCdf,
  Theorem1Sweep,
  Prop1Sweep,
  TasepShock,
  BurgersFront,
  ReflectionMc,
  TraceNormDecay,
  LimitSampler,
};

std::string to_string(Experiment e);
/// Accepts the CLI names (tw1-table, softshock-cdf, ...).
Experiment experiment_from_string(const std::string& name);
const std::vector<Experiment>& all_experiments();

/// Everything one experiment run depends on. Empty arrays select the
/// experiment's defaults (documented in the README).
struct ExperimentConfig {
  Experiment experiment = Experiment::Tw1Table;
  double t = 2000.0;
  double beta = 1.0;
  std::vector<double> betas;
  std::vector<double> x_values;
  std::vector<double> a_grid;
  std::vector<double> u_values;
  std::vector<double> v_values;
  double rho_minus = 0.25;
  double rho_plus = 0.75;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  std::int64_t paths = 100000;
  double dt = 1e-3;
  double horizon = 20.0;
  QuadConfig quad{};
  int threads = 0;  // 0: SOFTSHOCK_THREADS or 1
  std::string out;  // empty: nothing is written

  bool operator==(const ExperimentConfig&) const;
};

/// JSON text of the config (stable key order, lossless doubles).
std::string config_to_json(const ExperimentConfig& cfg);
/// Parses JSON produced by config_to_json or written by hand; keys that are
/// absent keep their defaults, unknown keys are rejected.
ExperimentConfig config_from_json(const std::string& text);
/// Same, but fields absent from `text` keep their values in `base`.
ExperimentConfig apply_config_json(const ExperimentConfig& base, const std::string& text);
/// Reads a JSON config file on top of `base`.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base = {});

/// Throws std::invalid_argument describing the first invalid field or
/// combination (e.g. x != 0 with beta == 0). Called before any compute.
void validate_config(const ExperimentConfig& cfg);

/// Empirical versus theoretical CDF on a level grid.
struct KsReport {
  std::int64_t sample_size = 0;
  double ks_distance = 0.0;
  std::vector<double> grid;
  std::vector<double> empirical;
  std::vector<double> theoretical;
  std::string meta;  // config JSON
};

/// Builds a report; ks_distance is computed from the two arrays.
KsReport make_ks_report(const std::vector<double>& sample, const std::vector<double>& grid,
                        const std::vector<double>& theoretical, const std::string& meta);

struct ExperimentResult {
  std::string report_json;
  std::vector<TrialRecord> trials;
  std::optional<KsReport> ks;
  /// Headline numbers (e.g. "ks_distance", "delta_beta_4"), also in the report.
  std::map<std::string, double> summary;
  /// Files written (empty when cfg.out is empty).
  std::vector<std::filesystem::path> files;
};

/// Runs one experiment. Output is a deterministic function of the config
/// (thread count included or not). When cfg.out is set, writes report.json
/// and the experiment's CSV files into that directory; I/O failures throw
/// std::runtime_error naming the path.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes trials CSV `trial,seed,observable`.
void write_trials_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path);
/// Writes CSV `level,empirical,theoretical`.
void write_ks_csv(const KsReport& report, const std::filesystem::path& path);

}  // namespace softshock
