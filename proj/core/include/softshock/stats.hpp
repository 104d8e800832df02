#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace softshock {

/// Observable of one Monte Carlo trial.
struct TrialRecord {
  std::int64_t trial = 0;
  std::uint64_t seed = 0;
  double observable = 0.0;
  std::map<std::string, double> aux;
};

/// max_i |empirical[i] - theoretical[i]|.
/// Throws std::invalid_argument on a length mismatch.
double ks_distance(const std::vector<double>& empirical, const std::vector<double>& theoretical);

/// Fraction of values <= each grid point. Throws std::invalid_argument for
/// empty input.
std::vector<double> empirical_cdf(std::vector<double> values, const std::vector<double>& grid);
std::vector<double> empirical_cdf(const std::vector<TrialRecord>& records,
                                  const std::vector<double>& grid);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b| over all reals.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct MeanStd {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Sample mean and its standard error (0 for a single value).
MeanStd mean_std(const std::vector<double>& values);

}  // namespace softshock
