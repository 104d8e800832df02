#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "softshock/effective.hpp"
#include "softshock/quadops.hpp"

namespace softshock {

/// F1(2^{2/3} a) = det(I - A) on L^2(a, infinity), i.e. the GOE Tracy-Widom
/// distribution function on the "a" scale.
double f1(double a, const QuadConfig& cfg = {});

/// GOE Tracy-Widom distribution function on its usual scale: F1(s).
double tw1_cdf(double s, const QuadConfig& cfg = {});

/// F1(2a)^2 = f1(2^{1/3} a)^2.
double theorem1_limit(double a, const QuadConfig& cfg = {});

/// F1(2^{2/3}(a + x)) F1(2^{2/3}(a - x)) = f1(a + x) f1(a - x).
double prop1_limit(double x, double a, const QuadConfig& cfg = {});

/// P(h(1, x / (2 beta); 2 beta |y|) - beta^2 <= a), clamped to [0, 1].
/// Throws std::domain_error for beta < 0 or (beta == 0, x != 0).
double softshock_cdf(double beta, double x, double a, const QuadConfig& cfg = {});

/// Which distribution function a table holds, and on which scale.
enum class Law {
  Tw1,            // F1(s), levels on the s scale
  Theorem1Limit,  // F1(2a)^2
  SoftShock,      // softshock_cdf(beta, x, a)
  Prop1Limit,     // f1(a + x) f1(a - x)
};

std::string to_string(Law law);
Law law_from_string(const std::string& name);

struct LawSpec {
  Law law = Law::Tw1;
  double beta = 0.0;
  double x = 0.0;
  QuadConfig quad{};
};

/// Monotone tabulated distribution function.
struct CdfTable {
  std::vector<double> levels;  // strictly increasing
  std::vector<double> probs;   // clamped to [0, 1] and rectified to be nondecreasing
  std::vector<double> raw;     // unrectified values (empty for imported tables)
  LawSpec meta{};

  /// Piecewise-linear interpolation; 0 below the first level, 1 at or above
  /// the last (the tails beyond the table are point masses at the ends).
  double cdf(double level) const;
  /// int_{-inf}^{z} cdf(t) dt for the same piecewise-linear law.
  double cdf_integral(double z) const;
  /// Mean of the piecewise-linear law including the end atoms.
  double mean() const;
  /// Throws std::invalid_argument unless sizes match, there are at least two
  /// levels, levels increase strictly and probs are nondecreasing in [0, 1].
  void validate() const;
};

/// Evaluates the law at each level (in parallel over levels).
/// Throws std::invalid_argument for empty or non-increasing levels.
CdfTable build_cdf_table(const LawSpec& law, const std::vector<double>& levels, int threads = 1);

/// Levels lo, lo + step, ..., hi (hi included up to rounding).
std::vector<double> level_grid(double lo, double hi, double step);

/// F1 table on s in [-6, 4], step 0.05, default quadrature; built once.
const CdfTable& default_tw1_table();

/// Inverse of the table CDF by linear interpolation; u outside
/// [probs.front(), probs.back()] clamps to the end levels.
double sample_tw1(const CdfTable& table, double u);

struct LimitProcessSample {
  double x_tw = 0.0;        // draw of X_TW1 (TW scale)
  double x_tw_prime = 0.0;  // independent draw of X'_TW1
  double shock_location = 0.0;  // (X - X') / 2^{5/3}
  double min_value = 0.0;       // (X + X') / 2^{5/3}
};

/// max{2^{-2/3} X - x, 2^{-2/3} X' + x} at each x.
std::vector<double> limit_process_values(double x_tw, double x_tw_prime,
                                         const std::vector<double>& xs);

LimitProcessSample make_limit_sample(double x_tw, double x_tw_prime);

/// One draw of the limit process using two uniforms from `rng`.
std::pair<LimitProcessSample, std::vector<double>> sample_limit_process(
    const CdfTable& table, std::mt19937_64& rng, const std::vector<double>& xs);

/// Seeded convenience form using the default F1 table.
std::pair<LimitProcessSample, std::vector<double>> sample_limit_process(
    std::uint64_t seed, const std::vector<double>& xs);

/// Exact CDF of (X + X') / 2^{5/3} for X, X' iid with the table's
/// piecewise-linear law, at level m.
double min_value_cdf(const CdfTable& table, double m);

/// CSV with header `level,prob`, 17 significant digits.
void write_cdf_csv(const CdfTable& table, const std::filesystem::path& path);
CdfTable read_cdf_csv(const std::filesystem::path& path);

}  // namespace softshock
