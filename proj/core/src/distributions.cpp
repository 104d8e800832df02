#include "softshock/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "softshock/kernels.hpp"
#include "softshock/parallel.hpp"

namespace softshock {

namespace {

const double kTwoThirdsRoot = std::cbrt(4.0);  // 2^{2/3}
const double kCbrtTwo = std::cbrt(2.0);        // 2^{1/3}
const double kFiveThirdsRoot = 2.0 * std::cbrt(4.0);  // 2^{5/3}

double eval_law(const LawSpec& law, double level) {
  switch (law.law) {
    case Law::Tw1:
      return tw1_cdf(level, law.quad);
    case Law::Theorem1Limit:
      return theorem1_limit(level, law.quad);
    case Law::SoftShock:
      return softshock_cdf(law.beta, law.x, level, law.quad);
    case Law::Prop1Limit:
      return prop1_limit(law.x, level, law.quad);
  }
  throw std::invalid_argument("unknown law");
}

}  // namespace

double f1(double a, const QuadConfig& cfg) {
  if (!std::isfinite(a)) throw std::domain_error("f1: level must be finite");
  return fredholm_det(goe_operator(make_grid(a, cfg.length, cfg.nodes)));
}

double tw1_cdf(double s, const QuadConfig& cfg) { return f1(s / kTwoThirdsRoot, cfg); }

double theorem1_limit(double a, const QuadConfig& cfg) {
  const double v = f1(kCbrtTwo * a, cfg);
  return v * v;
}

double prop1_limit(double x, double a, const QuadConfig& cfg) {
  return f1(a + x, cfg) * f1(a - x, cfg);
}

double softshock_cdf(double beta, double x, double a, const QuadConfig& cfg) {
  return softshock_determinant({beta, x, a}, cfg).value;
}

std::string to_string(Law law) {
  switch (law) {
    case Law::Tw1:
      return "tw1";
    case Law::Theorem1Limit:
      return "theorem1-limit";
    case Law::SoftShock:
      return "softshock";
    case Law::Prop1Limit:
      return "prop1-limit";
  }
  return "unknown";
}

Law law_from_string(const std::string& name) {
  for (Law l : {Law::Tw1, Law::Theorem1Limit, Law::SoftShock, Law::Prop1Limit}) {
    if (to_string(l) == name) return l;
  }
  throw std::invalid_argument("unknown law '" + name + "'");
}

double CdfTable::cdf(double level) const {
  if (level < levels.front()) return 0.0;
  if (level >= levels.back()) return 1.0;
  const auto it = std::upper_bound(levels.begin(), levels.end(), level);
  const auto k = static_cast<std::size_t>(it - levels.begin());
  const double t = (level - levels[k - 1]) / (levels[k] - levels[k - 1]);
  return probs[k - 1] + t * (probs[k] - probs[k - 1]);
}

double CdfTable::cdf_integral(double z) const {
  if (z <= levels.front()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    const double l0 = levels[k];
    const double l1 = levels[k + 1];
    if (z <= l1) {
      const double t = z - l0;
      return acc + probs[k] * t + (probs[k + 1] - probs[k]) * t * t / (2.0 * (l1 - l0));
    }
    acc += 0.5 * (l1 - l0) * (probs[k] + probs[k + 1]);
  }
  return acc + (z - levels.back());
}

double CdfTable::mean() const {
  double m = probs.front() * levels.front();
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    m += (probs[k + 1] - probs[k]) * 0.5 * (levels[k] + levels[k + 1]);
  }
  return m + (1.0 - probs.back()) * levels.back();
}

void CdfTable::validate() const {
  if (levels.size() != probs.size()) throw std::invalid_argument("CdfTable: size mismatch");
  if (levels.size() < 2) throw std::invalid_argument("CdfTable: need at least two levels");
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!std::isfinite(levels[k]) || !(probs[k] >= 0.0 && probs[k] <= 1.0)) {
      throw std::invalid_argument("CdfTable: entries must be finite with probs in [0, 1]");
    }
    if (k > 0 && !(levels[k] > levels[k - 1])) {
      throw std::invalid_argument("CdfTable: levels must increase strictly");
    }
    if (k > 0 && probs[k] < probs[k - 1]) {
      throw std::invalid_argument("CdfTable: probs must be nondecreasing");
    }
  }
}

std::vector<double> level_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("level_grid: bad range");
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = lo + step * static_cast<double>(i);
  return out;
}

CdfTable build_cdf_table(const LawSpec& law, const std::vector<double>& levels, int threads) {
  if (levels.empty()) throw std::invalid_argument("build_cdf_table: empty level grid");
  for (std::size_t k = 1; k < levels.size(); ++k) {
    if (!(levels[k] > levels[k - 1])) {
      throw std::invalid_argument("build_cdf_table: levels must increase strictly");
    }
  }
  if (law.law == Law::SoftShock) {
    // Surface parameter errors before any work is scheduled.
    if (!(law.beta >= 0.0) || (law.beta == 0.0 && law.x != 0.0)) {
      throw std::domain_error("build_cdf_table: invalid soft-shock parameters");
    }
  }
  CdfTable t;
  t.meta = law;
  t.levels = levels;
  t.raw.assign(levels.size(), 0.0);
  parallel_for(levels.size(), threads, [&](std::size_t i) { t.raw[i] = eval_law(law, levels[i]); });
  t.probs.resize(levels.size());
  double running = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    running = std::max(running, std::clamp(t.raw[i], 0.0, 1.0));
    t.probs[i] = running;
  }
  return t;
}

const CdfTable& default_tw1_table() {
  static const CdfTable table = build_cdf_table({Law::Tw1}, level_grid(-6.0, 4.0, 0.05));
  return table;
}

double sample_tw1(const CdfTable& table, double u) {
  if (table.levels.size() < 2 || table.levels.size() != table.probs.size()) {
    throw std::invalid_argument("sample_tw1: malformed table");
  }
  if (!(u == u)) throw std::invalid_argument("sample_tw1: u is NaN");
  const auto& p = table.probs;
  const auto& l = table.levels;
  if (u <= p.front()) return l.front();
  if (u >= p.back()) return l.back();
  const auto it = std::lower_bound(p.begin(), p.end(), u);
  const auto k = static_cast<std::size_t>(it - p.begin());
  if (p[k] == u) return l[k];
  const double t = (u - p[k - 1]) / (p[k] - p[k - 1]);
  return l[k - 1] + t * (l[k] - l[k - 1]);
}

std::vector<double> limit_process_values(double x_tw, double x_tw_prime,
                                         const std::vector<double>& xs) {
  const double left = x_tw / kTwoThirdsRoot;
  const double right = x_tw_prime / kTwoThirdsRoot;
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i] = std::max(left - xs[i], right + xs[i]);
  }
  return out;
}

LimitProcessSample make_limit_sample(double x_tw, double x_tw_prime) {
  LimitProcessSample s;
  s.x_tw = x_tw;
  s.x_tw_prime = x_tw_prime;
  s.shock_location = (x_tw - x_tw_prime) / kFiveThirdsRoot;
  s.min_value = (x_tw + x_tw_prime) / kFiveThirdsRoot;
  return s;
}

std::pair<LimitProcessSample, std::vector<double>> sample_limit_process(
    const CdfTable& table, std::mt19937_64& rng, const std::vector<double>& xs) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double x = sample_tw1(table, unif(rng));
  const double xp = sample_tw1(table, unif(rng));
  return {make_limit_sample(x, xp), limit_process_values(x, xp, xs)};
}

std::pair<LimitProcessSample, std::vector<double>> sample_limit_process(
    std::uint64_t seed, const std::vector<double>& xs) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  return sample_limit_process(default_tw1_table(), rng, xs);
}

double min_value_cdf(const CdfTable& table, double m) {
  const double s = kFiveThirdsRoot * m;
  const auto& l = table.levels;
  const auto& p = table.probs;
  double out = p.front() * table.cdf(s - l.front());
  for (std::size_t k = 0; k + 1 < l.size(); ++k) {
    const double mass = p[k + 1] - p[k];
    if (mass <= 0.0) continue;
    const double avg =
        (table.cdf_integral(s - l[k]) - table.cdf_integral(s - l[k + 1])) / (l[k + 1] - l[k]);
    out += mass * avg;
  }
  out += (1.0 - p.back()) * table.cdf(s - l.back());
  return std::clamp(out, 0.0, 1.0);
}

void write_cdf_csv(const CdfTable& table, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "level,prob\n";
  char buf[96];
  for (std::size_t i = 0; i < table.levels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", table.levels[i], table.probs[i]);
    f << buf;
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

CdfTable read_cdf_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(f, line) || line.rfind("level,prob", 0) != 0) {
    throw std::invalid_argument(path.string() + ": expected header 'level,prob'");
  }
  CdfTable t;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument(path.string() + ": malformed row '" + line + "'");
    }
    t.levels.push_back(std::stod(line.substr(0, comma)));
    t.probs.push_back(std::stod(line.substr(comma + 1)));
  }
  t.validate();
  return t;
}

}  // namespace softshock
