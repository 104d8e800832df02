#include "softshock/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace softshock {

double ks_distance(const std::vector<double>& empirical, const std::vector<double>& theoretical) {
  if (empirical.size() != theoretical.size()) {
    throw std::invalid_argument("ks_distance: arrays differ in length (" +
                                std::to_string(empirical.size()) + " vs " +
                                std::to_string(theoretical.size()) + ")");
  }
  double d = 0.0;
  for (std::size_t i = 0; i < empirical.size(); ++i) {
    d = std::max(d, std::abs(empirical[i] - theoretical[i]));
  }
  return d;
}

std::vector<double> empirical_cdf(std::vector<double> values, const std::vector<double>& grid) {
  if (values.empty()) throw std::invalid_argument("empirical_cdf: no observations");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto it = std::upper_bound(values.begin(), values.end(), grid[i]);
    out[i] = static_cast<double>(it - values.begin()) / n;
  }
  return out;
}

std::vector<double> empirical_cdf(const std::vector<TrialRecord>& records,
                                  const std::vector<double>& grid) {
  std::vector<double> values;
  values.reserve(records.size());
  for (const auto& r : records) values.push_back(r.observable);
  return empirical_cdf(std::move(values), grid);
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

MeanStd mean_std(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean_std: no values");
  const auto n = static_cast<double>(values.size());
  double m = 0.0;
  for (double v : values) m += v;
  m /= n;
  if (values.size() == 1) return {m, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace softshock
