#include "softshock/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "softshock/distributions.hpp"
#include "softshock/effective.hpp"
#include "softshock/kernels.hpp"
#include "softshock/parallel.hpp"
#include "softshock/tasep.hpp"
#include "softshock/version.hpp"

namespace softshock {

using Json = nlohmann::ordered_json;

namespace {

const std::vector<std::pair<Experiment, const char*>>& experiment_names() {
  static const std::vector<std::pair<Experiment, const char*>> names = {
      {Experiment::Tw1Table, "tw1-table"},
      {Experiment::SoftShockCdf, "softshock-cdf"},
      {Experiment::Theorem1Sweep, "theorem1-sweep"},
      {Experiment::Prop1Sweep, "prop1-sweep"},
      {Experiment::TasepShock, "tasep-shock"},
      {Experiment::BurgersFront, "burgers-front"},
      {Experiment::ReflectionMc, "reflection-mc"},
      {Experiment::TraceNormDecay, "tracenorm-decay"},
      {Experiment::LimitSampler, "limit-sampler"},
  };
  return names;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string key_of(const char* prefix, double v) {
  std::ostringstream s;
  s << prefix << v;
  return s.str();
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> fallback) {
  return v.empty() ? fallback : v;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("invalid config: " + what);
}

bool strictly_increasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) return false;
  }
  return true;
}

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
}

// Collects output files under cfg.out.
class Outputs {
 public:
  explicit Outputs(const std::string& dir) : dir_(dir) {
    if (dir_.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir_.string() + ": " +
                                     ec.message());
  }
  bool enabled() const { return !dir_.empty(); }

  // Writes `header` then one row per entry, every number with 17 digits.
  void csv(const std::string& name, const std::string& header,
           const std::vector<std::vector<double>>& rows) {
    if (!enabled()) return;
    const auto path = dir_ / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << header << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << fmt(row[i]);
      f << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
    files_.push_back(path);
  }

  void trials(const std::vector<TrialRecord>& records) {
    if (!enabled()) return;
    write_trials_csv(records, dir_ / "trials.csv");
    files_.push_back(dir_ / "trials.csv");
  }

  void ks(const KsReport& report) {
    if (!enabled()) return;
    write_ks_csv(report, dir_ / "cdf.csv");
    files_.push_back(dir_ / "cdf.csv");
  }

  void text(const std::string& name, const std::string& body) {
    if (!enabled()) return;
    const auto path = dir_ / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
    f << body;
    if (!f) throw std::runtime_error("write failed: " + path.string());
    files_.push_back(path);
  }

  std::vector<std::filesystem::path> files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
};

Json ks_json(const KsReport& r) {
  Json j;
  j["sample_size"] = r.sample_size;
  j["ks_distance"] = r.ks_distance;
  j["grid"] = r.grid;
  j["empirical"] = r.empirical;
  j["theoretical"] = r.theoretical;
  return j;
}

struct Run {
  const ExperimentConfig& cfg;
  int threads;
  Outputs out;
  Json body = Json::object();
  ExperimentResult result;
};

LawSpec law_of(Law law, double beta, double x, const QuadConfig& q) {
  LawSpec s;
  s.law = law;
  s.beta = beta;
  s.x = x;
  s.quad = q;
  return s;
}

void run_tw1_table(Run& r) {
  const auto levels = or_default(r.cfg.a_grid, level_grid(-6.0, 4.0, 0.05));
  const CdfTable table = build_cdf_table(law_of(Law::Tw1, 0, 0, r.cfg.quad), levels, r.threads);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < levels.size(); ++i) rows.push_back({levels[i], table.probs[i]});
  r.out.csv("table.csv", "level,prob", rows);
  r.body["scale"] = "F1(s), GOE Tracy-Widom on the s scale";
  r.body["levels"] = table.levels;
  r.body["probs"] = table.probs;
  r.body["raw"] = table.raw;
  r.body["mean"] = table.mean();
  r.result.summary["mean"] = table.mean();
}

void run_softshock_cdf(Run& r) {
  const auto levels = or_default(r.cfg.a_grid, level_grid(-4.0, 3.0, 0.1));
  const auto xs = or_default(r.cfg.x_values, {0.0});
  Json tables = Json::array();
  double worst_drop = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const CdfTable table = build_cdf_table(law_of(Law::SoftShock, r.cfg.beta, xs[k], r.cfg.quad),
                                           levels, r.threads);
    for (std::size_t i = 1; i < table.raw.size(); ++i) {
      worst_drop = std::max(worst_drop, table.raw[i - 1] - table.raw[i]);
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      rows.push_back({levels[i], table.probs[i], table.raw[i]});
    }
    r.out.csv("softshock_" + std::to_string(k) + ".csv", "level,prob,raw", rows);
    Json t;
    t["x"] = xs[k];
    t["levels"] = table.levels;
    t["probs"] = table.probs;
    t["raw"] = table.raw;
    tables.push_back(t);
  }
  r.body["scale"] = "P(h(1, x/(2 beta); 2 beta |y|) - beta^2 <= a)";
  r.body["tables"] = tables;
  r.body["max_monotonicity_violation"] = worst_drop;
  r.result.summary["max_monotonicity_violation"] = worst_drop;
}

// One (beta, level) pair evaluated in parallel across all pairs.
std::vector<double> sweep_values(const std::vector<double>& betas, const std::vector<double>& levels,
                                 double x, const QuadConfig& q, int threads) {
  std::vector<double> v(betas.size() * levels.size());
  parallel_for(v.size(), threads, [&](std::size_t i) {
    v[i] = softshock_cdf(betas[i / levels.size()], x, levels[i % levels.size()], q);
  });
  return v;
}

void run_theorem1_sweep(Run& r) {
  const auto betas = or_default(r.cfg.betas, {2.0, 4.0, 8.0});
  const auto levels = or_default(r.cfg.a_grid, {-0.5, 0.0, 0.5});
  const auto vals = sweep_values(betas, levels, 0.0, r.cfg.quad, r.threads);
  std::vector<double> limit(levels.size());
  // The law is on the (t/2)^{1/3} scale, F1(2b)^2 on the t^{1/3} scale: b = 2^{-1/3} a.
  for (std::size_t j = 0; j < levels.size(); ++j) {
    limit[j] = theorem1_limit(levels[j] / std::cbrt(2.0), r.cfg.quad);
  }
  std::vector<std::vector<double>> rows;
  Json deltas = Json::array();
  for (std::size_t i = 0; i < betas.size(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      const double v = vals[i * levels.size() + j];
      d = std::max(d, std::abs(v - limit[j]));
      rows.push_back({betas[i], levels[j], v, limit[j]});
    }
    deltas.push_back({{"beta", betas[i]}, {"delta", d}});
    r.result.summary[key_of("delta_beta_", betas[i])] = d;
  }
  r.out.csv("sweep.csv", "beta,level,softshock,limit", rows);
  r.body["limit"] = "F1(2b)^2 with b = 2^{-1/3} a";
  r.body["levels"] = levels;
  r.body["limit_values"] = limit;
  r.body["deltas"] = deltas;
}

void run_prop1_sweep(Run& r) {
  const auto betas = or_default(r.cfg.betas, {2.0, 4.0, 8.0});
  const auto levels = or_default(r.cfg.a_grid, {-0.5, 0.0, 0.5});
  const auto xs = or_default(r.cfg.x_values, {0.5});
  std::vector<std::vector<double>> rows;
  Json entries = Json::array();
  for (double x : xs) {
    const auto plus = sweep_values(betas, levels, x, r.cfg.quad, r.threads);
    const auto minus = sweep_values(betas, levels, -x, r.cfg.quad, r.threads);
    std::vector<double> limit(levels.size());
    for (std::size_t j = 0; j < levels.size(); ++j) limit[j] = prop1_limit(x, levels[j], r.cfg.quad);
    for (std::size_t i = 0; i < betas.size(); ++i) {
      double d = 0.0;
      double sym = 0.0;
      for (std::size_t j = 0; j < levels.size(); ++j) {
        const std::size_t k = i * levels.size() + j;
        d = std::max(d, std::abs(plus[k] - limit[j]));
        sym = std::max(sym, std::abs(plus[k] - minus[k]));
        rows.push_back({betas[i], x, levels[j], plus[k], minus[k], limit[j]});
      }
      entries.push_back({{"beta", betas[i]}, {"x", x}, {"delta", d}, {"symmetry_error", sym}});
      r.result.summary[key_of("delta_beta_", betas[i]) + key_of("_x_", x)] = d;
      r.result.summary[key_of("symmetry_beta_", betas[i]) + key_of("_x_", x)] = sym;
    }
  }
  r.out.csv("sweep.csv", "beta,x,level,softshock_plus,softshock_minus,limit", rows);
  r.body["limit"] = "F1(2^{2/3}(a + x)) F1(2^{2/3}(a - x))";
  r.body["levels"] = levels;
  r.body["entries"] = entries;
}

void run_tasep_shock(Run& r) {
  const double x = r.cfg.x_values.empty() ? 0.0 : r.cfg.x_values.front();
  const auto levels = or_default(r.cfg.a_grid, level_grid(-4.0, 4.0, 0.05));
  const auto n = static_cast<std::size_t>(r.cfg.trials);
  std::vector<TrialRecord> records(n);
  parallel_for(n, r.threads, [&](std::size_t i) {
    const ShockTrial s = simulate_shock_trial(r.cfg.t, r.cfg.beta, x, r.cfg.seed, i);
    TrialRecord& rec = records[i];
    rec.trial = static_cast<std::int64_t>(i);
    rec.seed = derive_trial_seed(r.cfg.seed, i);
    rec.observable = s.observable;
    rec.aux = {{"n", static_cast<double>(s.n)},
               {"position", static_cast<double>(s.position)},
               {"m", s.m},
               {"events", static_cast<double>(s.events)}};
  });
  std::vector<double> sample;
  for (const auto& rec : records) sample.push_back(rec.observable);

  const CdfTable table =
      build_cdf_table(law_of(Law::SoftShock, r.cfg.beta, x, r.cfg.quad), levels, r.threads);
  const std::string meta = config_to_json(r.cfg);
  KsReport ks = make_ks_report(sample, levels, table.probs, meta);

  // Finite-t centering: shift the sample so its mean matches the law's.
  const MeanStd ms = mean_std(sample);
  const double shift = table.mean() - ms.mean;
  std::vector<double> shifted(sample);
  for (double& v : shifted) v += shift;
  const KsReport recentered = make_ks_report(shifted, levels, table.probs, meta);

  r.out.trials(records);
  r.out.ks(ks);
  r.body["observable"] = "(m(t,x) - X_t(n(t,x))) / (t/2)^{1/3}";
  r.body["theoretical"] = "P(h(1, x/(2 beta); 2 beta |y|) - beta^2 <= a)";
  const ShockIndices idx = shock_indices(r.cfg.t, r.cfg.beta, x);
  r.body["indices"] = {{"n_shk", idx.n_shk}, {"n", idx.n}, {"m", idx.m}};
  r.body["sample_mean"] = ms.mean;
  r.body["sample_mean_std_error"] = ms.std_error;
  r.body["law_mean"] = table.mean();
  r.body["ks"] = ks_json(ks);
  r.body["ks_recentered"] = ks_json(recentered);
  r.body["recentering_shift"] = shift;
  r.result.summary["ks_distance"] = ks.ks_distance;
  r.result.summary["ks_recentered"] = recentered.ks_distance;
  r.result.summary["sample_mean"] = ms.mean;
  if (x == 0.0) {
    // F1(2b)^2 at b = 2^{-1/3} a, i.e. f1(a)^2.
    const CdfTable lim = build_cdf_table(law_of(Law::Prop1Limit, 0, 0, r.cfg.quad), levels,
                                         r.threads);
    const KsReport vs_limit = make_ks_report(sample, levels, lim.probs, meta);
    r.body["ks_theorem1_limit"] = ks_json(vs_limit);
    r.result.summary["ks_theorem1_limit"] = vs_limit.ks_distance;
  }
  r.result.trials = std::move(records);
  r.result.ks = std::move(ks);
}

// Entropy solution of Burgers' equation for step data, at speed z = site / t.
double burgers_density(double rm, double rp, double z) {
  if (rm <= rp) return z < 1.0 - rm - rp ? rm : rp;
  if (z <= 1.0 - 2.0 * rm) return rm;
  if (z >= 1.0 - 2.0 * rp) return rp;
  return 0.5 * (1.0 - z);
}

void run_burgers_front(Run& r) {
  const double t = r.cfg.t;
  const double rm = r.cfg.rho_minus;
  const double rp = r.cfg.rho_plus;
  const double margin = t + 8.0 * std::sqrt(t) + 32.0;
  const auto half = static_cast<std::int64_t>(std::ceil(0.5 * t));
  TasepWindow w;
  w.lo = -half - static_cast<std::int64_t>(std::ceil(margin));
  w.right_cut = half + static_cast<std::int64_t>(std::ceil(margin));
  w.hi = w.right_cut + static_cast<std::int64_t>(std::ceil(margin)) + 1;

  // Bins of width 0.05 t over [-0.5 t, 0.5 t).
  const int bins = 20;
  const double width = 0.05 * t;
  std::vector<std::int64_t> edges(bins + 1);
  for (int b = 0; b <= bins; ++b) {
    edges[b] = static_cast<std::int64_t>(std::llround(-0.5 * t + width * b));
  }
  const double shock = rm < rp ? 1.0 - rm - rp : 0.0;
  std::vector<bool> used(bins);
  std::vector<double> theory(bins);
  std::vector<double> centers(bins);
  for (int b = 0; b < bins; ++b) {
    const double z0 = static_cast<double>(edges[b]) / t;
    const double z1 = static_cast<double>(edges[b + 1]) / t;
    centers[b] = 0.5 * (z0 + z1);
    used[b] = !(rm < rp) || z1 <= shock - 0.05 || z0 >= shock + 0.05;
    double acc = 0.0;
    const int sub = 200;
    for (int k = 0; k < sub; ++k) acc += burgers_density(rm, rp, z0 + (z1 - z0) * (k + 0.5) / sub);
    theory[b] = acc / sub;
  }

  const auto n = static_cast<std::size_t>(r.cfg.trials);
  std::vector<std::vector<double>> per_trial(n);
  std::vector<TrialRecord> records(n);
  const InitialProfile prof = InitialProfile::explicit_densities(rm, rp);
  parallel_for(n, r.threads, [&](std::size_t i) {
    TasepState s = build_initial(prof, w);
    auto rng = trial_rng(r.cfg.seed, i);
    evolve(s, t, rng);
    std::vector<double> dens(bins);
    double worst = 0.0;
    for (int b = 0; b < bins; ++b) {
      std::int64_t count = 0;
      for (std::int64_t z = edges[b]; z < edges[b + 1]; ++z) count += s.occupied(z) ? 1 : 0;
      dens[b] = static_cast<double>(count) / static_cast<double>(edges[b + 1] - edges[b]);
      if (used[b]) worst = std::max(worst, std::abs(dens[b] - theory[b]));
    }
    per_trial[i] = std::move(dens);
    records[i].trial = static_cast<std::int64_t>(i);
    records[i].seed = derive_trial_seed(r.cfg.seed, i);
    records[i].observable = worst;
    records[i].aux = {{"events", static_cast<double>(s.events())}};
  });
  std::vector<double> mean(bins, 0.0);
  for (const auto& d : per_trial) {
    for (int b = 0; b < bins; ++b) mean[b] += d[b];
  }
  double max_dev = 0.0;
  std::vector<std::vector<double>> rows;
  for (int b = 0; b < bins; ++b) {
    mean[b] /= static_cast<double>(n);
    if (used[b]) max_dev = std::max(max_dev, std::abs(mean[b] - theory[b]));
    rows.push_back({centers[b], mean[b], theory[b], used[b] ? 1.0 : 0.0});
  }
  r.out.trials(records);
  r.out.csv("profile.csv", "x,empirical,theoretical,compared", rows);
  r.body["shock_speed"] = shock;
  r.body["bin_centers"] = centers;
  r.body["empirical"] = mean;
  r.body["theoretical"] = theory;
  r.body["max_deviation"] = max_dev;
  r.result.summary["max_deviation"] = max_dev;
  r.result.trials = std::move(records);
}

void run_reflection_mc(Run& r) {
  const auto us = or_default(r.cfg.u_values, {0.25, 0.5, 1.0});
  const auto vs = or_default(r.cfg.v_values, {0.0, 0.3, 1.0});
  std::vector<std::vector<double>> rows;
  Json entries = Json::array();
  double worst = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const auto est = brownian_hypo_estimates(r.cfg.beta, us[i], vs, r.cfg.paths, r.cfg.dt,
                                             r.cfg.horizon, derive_trial_seed(r.cfg.seed, i),
                                             r.threads);
    for (std::size_t j = 0; j < vs.size(); ++j) {
      const double cf = hypo_closed_form(r.cfg.beta, us[i], vs[j]);
      const double z = est[j].std_error > 0.0 ? (est[j].mean - cf) / est[j].std_error : 0.0;
      worst = std::max(worst, std::abs(z));
      rows.push_back({us[i], vs[j], est[j].mean, est[j].std_error, cf, z});
      entries.push_back({{"u", us[i]}, {"v", vs[j]}, {"estimate", est[j].mean},
                         {"std_error", est[j].std_error}, {"closed_form", cf}, {"z", z}});
    }
  }
  r.out.csv("mc.csv", "u,v,estimate,std_error,closed_form,z", rows);
  r.body["closed_form"] = "e^{2 beta u} Ai(v + u)";
  r.body["entries"] = entries;
  r.body["max_abs_z"] = worst;
  r.result.summary["max_abs_z"] = worst;
}

void run_tracenorm_decay(Run& r) {
  const auto betas = or_default(r.cfg.betas, {1.0, 1.5, 2.0, 2.5});
  const double a = r.cfg.a_grid.empty() ? 0.0 : r.cfg.a_grid.front();
  std::vector<double> norms(betas.size());
  parallel_for(betas.size(), r.threads,
               [&](std::size_t i) { norms[i] = e_beta_trace_norm(betas[i], a, r.cfg.quad); });
  std::vector<std::vector<double>> rows;
  std::vector<double> logs;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    logs.push_back(std::log(norms[i]));
    rows.push_back({betas[i], norms[i], logs.back()});
  }
  const double drop = logs.front() - logs.back();
  r.out.csv("tracenorm.csv", "beta,trace_norm,log_trace_norm", rows);
  r.body["a"] = a;
  r.body["betas"] = betas;
  r.body["trace_norms"] = norms;
  r.body["log_trace_norms"] = logs;
  r.body["log_drop"] = drop;
  r.result.summary["log_drop"] = drop;
}

void run_limit_sampler(Run& r) {
  const auto xs = or_default(r.cfg.x_values, level_grid(-2.0, 2.0, 0.25));
  const auto levels = or_default(r.cfg.a_grid, level_grid(-4.0, 2.0, 0.02));
  const CdfTable& table = default_tw1_table();
  const auto n = static_cast<std::size_t>(r.cfg.trials);
  std::vector<TrialRecord> records(n);
  std::vector<int> convex_ok(n, 1);
  parallel_for(n, r.threads, [&](std::size_t i) {
    auto rng = trial_rng(r.cfg.seed, i);
    const auto [s, values] = sample_limit_process(table, rng, xs);
    // Convex piecewise-linear with slopes -1 then +1.
    for (std::size_t k = 1; k < xs.size(); ++k) {
      const double slope = (values[k] - values[k - 1]) / (xs[k] - xs[k - 1]);
      const bool left = xs[k] <= s.shock_location;
      const bool right = xs[k - 1] >= s.shock_location;
      if ((left && std::abs(slope + 1.0) > 1e-9) || (right && std::abs(slope - 1.0) > 1e-9) ||
          slope < -1.0 - 1e-9 || slope > 1.0 + 1e-9) {
        convex_ok[i] = 0;
      }
    }
    records[i].trial = static_cast<std::int64_t>(i);
    records[i].seed = derive_trial_seed(r.cfg.seed, i);
    records[i].observable = s.min_value;
    records[i].aux = {{"shock_location", s.shock_location}};
  });
  std::vector<double> mins;
  std::vector<double> locs;
  std::vector<double> neg_locs;
  for (const auto& rec : records) {
    mins.push_back(rec.observable);
    locs.push_back(rec.aux.at("shock_location"));
    neg_locs.push_back(-locs.back());
  }
  std::vector<double> theory(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) theory[i] = min_value_cdf(table, levels[i]);
  KsReport ks = make_ks_report(mins, levels, theory, config_to_json(r.cfg));
  const double sym = ks_two_sample(locs, neg_locs);
  const auto bad = static_cast<double>(std::count(convex_ok.begin(), convex_ok.end(), 0));
  r.out.trials(records);
  r.out.ks(ks);
  r.body["observable"] = "min_value = (X + X') / 2^{5/3}";
  r.body["theoretical"] = "self-convolution of the tabulated F1 law";
  r.body["ks"] = ks_json(ks);
  r.body["shock_location_symmetry_ks"] = sym;
  r.body["non_convex_paths"] = bad;
  r.result.summary["ks_distance"] = ks.ks_distance;
  r.result.summary["shock_location_symmetry_ks"] = sym;
  r.result.summary["non_convex_paths"] = bad;
  r.result.trials = std::move(records);
  r.result.ks = std::move(ks);
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& [k, name] : experiment_names()) {
    if (k == e) return name;
  }
  return "unknown";
}

Experiment experiment_from_string(const std::string& name) {
  for (const auto& [k, n] : experiment_names()) {
    if (name == n) return k;
  }
  throw std::invalid_argument("unknown experiment '" + name + "'");
}

const std::vector<Experiment>& all_experiments() {
  static const std::vector<Experiment> all = [] {
    std::vector<Experiment> v;
    for (const auto& p : experiment_names()) v.push_back(p.first);
    return v;
  }();
  return all;
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
  return experiment == o.experiment && t == o.t && beta == o.beta && betas == o.betas &&
         x_values == o.x_values && a_grid == o.a_grid && u_values == o.u_values &&
         v_values == o.v_values && rho_minus == o.rho_minus && rho_plus == o.rho_plus &&
         trials == o.trials && seed == o.seed && paths == o.paths && dt == o.dt &&
         horizon == o.horizon && quad.nodes == o.quad.nodes && quad.length == o.quad.length &&
         quad.aux_panel == o.quad.aux_panel && quad.aux_order == o.quad.aux_order &&
         threads == o.threads && out == o.out;
}

std::string config_to_json(const ExperimentConfig& c) {
  Json j;
  j["experiment"] = to_string(c.experiment);
  j["t"] = c.t;
  j["beta"] = c.beta;
  j["betas"] = c.betas;
  j["x_values"] = c.x_values;
  j["a_grid"] = c.a_grid;
  j["u_values"] = c.u_values;
  j["v_values"] = c.v_values;
  j["rho_minus"] = c.rho_minus;
  j["rho_plus"] = c.rho_plus;
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["paths"] = c.paths;
  j["dt"] = c.dt;
  j["horizon"] = c.horizon;
  j["quadrature"] = {{"nodes", c.quad.nodes},
                     {"length", c.quad.length},
                     {"aux_panel", c.quad.aux_panel},
                     {"aux_order", c.quad.aux_order}};
  j["threads"] = c.threads;
  j["out"] = c.out;
  return j.dump(2);
}

ExperimentConfig config_from_json(const std::string& text) {
  return apply_config_json(ExperimentConfig{}, text);
}

ExperimentConfig apply_config_json(const ExperimentConfig& base, const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig c = base;
  auto get = [&](const Json& obj, const char* key, auto& field) {
    if (!obj.contains(key)) return;
    try {
      obj.at(key).get_to(field);
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("config field '") + key + "': " + e.what());
    }
  };
  static const std::vector<std::string> known = {
      "experiment", "t",     "beta",  "betas", "x_values", "a_grid",  "u_values",
      "v_values",   "rho_minus", "rho_plus", "trials", "seed", "paths", "dt",
      "horizon",    "quadrature", "threads", "out"};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end()) {
      throw std::invalid_argument("config: unknown field '" + item.key() + "'");
    }
  }
  if (j.contains("experiment")) {
    if (!j["experiment"].is_string()) throw std::invalid_argument("config: experiment must be a string");
    c.experiment = experiment_from_string(j["experiment"].get<std::string>());
  }
  get(j, "t", c.t);
  get(j, "beta", c.beta);
  get(j, "betas", c.betas);
  get(j, "x_values", c.x_values);
  get(j, "a_grid", c.a_grid);
  get(j, "u_values", c.u_values);
  get(j, "v_values", c.v_values);
  get(j, "rho_minus", c.rho_minus);
  get(j, "rho_plus", c.rho_plus);
  get(j, "trials", c.trials);
  get(j, "seed", c.seed);
  get(j, "paths", c.paths);
  get(j, "dt", c.dt);
  get(j, "horizon", c.horizon);
  get(j, "threads", c.threads);
  get(j, "out", c.out);
  if (j.contains("quadrature")) {
    const Json& q = j["quadrature"];
    if (!q.is_object()) throw std::invalid_argument("config: quadrature must be an object");
    for (const auto& item : q.items()) {
      const auto& k = item.key();
      if (k != "nodes" && k != "length" && k != "aux_panel" && k != "aux_order") {
        throw std::invalid_argument("config: unknown quadrature field '" + k + "'");
      }
    }
    get(q, "nodes", c.quad.nodes);
    get(q, "length", c.quad.length);
    get(q, "aux_panel", c.quad.aux_panel);
    get(q, "aux_order", c.quad.aux_order);
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return apply_config_json(base, ss.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

void validate_config(const ExperimentConfig& c) {
  require(std::isfinite(c.t) && c.t > 0.0, "t must be positive");
  require(std::isfinite(c.beta) && c.beta >= 0.0, "beta must be >= 0");
  require(all_finite(c.betas) && std::all_of(c.betas.begin(), c.betas.end(),
                                             [](double b) { return b >= 0.0; }),
          "betas must be finite and >= 0");
  require(all_finite(c.x_values), "x_values must be finite");
  require(all_finite(c.a_grid) && strictly_increasing(c.a_grid),
          "a_grid must be finite and strictly increasing");
  require(all_finite(c.u_values) && all_finite(c.v_values), "u_values/v_values must be finite");
  require(c.rho_minus >= 0.0 && c.rho_minus <= 1.0 && c.rho_plus >= 0.0 && c.rho_plus <= 1.0,
          "densities must lie in [0, 1]");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.paths >= 1, "paths must be >= 1");
  require(std::isfinite(c.dt) && c.dt > 0.0, "dt must be positive");
  require(std::isfinite(c.horizon) && c.horizon > 0.0, "horizon must be positive");
  require(c.quad.nodes >= 2, "quadrature.nodes must be >= 2");
  require(std::isfinite(c.quad.length) && c.quad.length > 0.0, "quadrature.length must be > 0");
  require(std::isfinite(c.quad.aux_panel) && c.quad.aux_panel > 0.0,
          "quadrature.aux_panel must be > 0");
  require(c.quad.aux_order >= 2, "quadrature.aux_order must be >= 2");
  require(c.threads >= 0, "threads must be >= 0");

  // x != 0 needs beta >= 1: the x-shifted determinant is only trusted there.
  auto check_x = [](double beta, const std::vector<double>& xs) {
    for (double x : xs) {
      if (x != 0.0 && beta == 0.0) {
        require(false, "x != 0 requires beta > 0 (the x / (2 beta) scale degenerates)");
      }
      if (x != 0.0 && beta < 1.0) require(false, "x != 0 requires beta >= 1");
    }
  };
  switch (c.experiment) {
    case Experiment::SoftShockCdf:
      check_x(c.beta, c.x_values);
      break;
    case Experiment::Prop1Sweep: {
      const auto xs = or_default(c.x_values, {0.5});
      for (double b : or_default(c.betas, {2.0, 4.0, 8.0})) check_x(b, xs);
      break;
    }
    case Experiment::TasepShock: {
      require(c.x_values.size() <= 1, "tasep-shock takes at most one x value");
      const double x = c.x_values.empty() ? 0.0 : c.x_values.front();
      check_x(c.beta, {x});
      require(c.t >= 2.0 * std::pow(c.beta, 3.0), "tasep-shock needs t >= 2 beta^3");
      try {
        (void)shock_indices(c.t, c.beta, x);
      } catch (const std::invalid_argument& e) {
        require(false, e.what());
      }
      break;
    }
    case Experiment::ReflectionMc:
      require(c.beta > 0.0, "reflection-mc needs beta > 0");
      require(std::all_of(c.u_values.begin(), c.u_values.end(), [](double u) { return u >= 0.0; }),
              "reflection-mc needs u >= 0");
      break;
    case Experiment::TraceNormDecay:
      require(c.a_grid.size() <= 1, "tracenorm-decay takes at most one level a");
      break;
    case Experiment::BurgersFront:
    case Experiment::Tw1Table:
    case Experiment::Theorem1Sweep:
    case Experiment::LimitSampler:
      break;
  }
}

KsReport make_ks_report(const std::vector<double>& sample, const std::vector<double>& grid,
                        const std::vector<double>& theoretical, const std::string& meta) {
  KsReport r;
  r.sample_size = static_cast<std::int64_t>(sample.size());
  r.grid = grid;
  r.empirical = empirical_cdf(sample, grid);
  r.theoretical = theoretical;
  r.ks_distance = ks_distance(r.empirical, r.theoretical);
  r.meta = meta;
  return r;
}

void write_trials_csv(const std::vector<TrialRecord>& records, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "trial,seed,observable\n";
  for (const auto& r : records) f << r.trial << ',' << r.seed << ',' << fmt(r.observable) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_ks_csv(const KsReport& report, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "level,empirical,theoretical\n";
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    f << fmt(report.grid[i]) << ',' << fmt(report.empirical[i]) << ','
      << fmt(report.theoretical[i]) << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  Run r{cfg, resolve_threads(cfg.threads), Outputs(cfg.out), Json::object(), ExperimentResult{}};
  switch (cfg.experiment) {
    case Experiment::Tw1Table:
      run_tw1_table(r);
      break;
    case Experiment::SoftShockCdf:
      run_softshock_cdf(r);
      break;
    case Experiment::Theorem1Sweep:
      run_theorem1_sweep(r);
      break;
    case Experiment::Prop1Sweep:
      run_prop1_sweep(r);
      break;
    case Experiment::TasepShock:
      run_tasep_shock(r);
      break;
    case Experiment::BurgersFront:
      run_burgers_front(r);
      break;
    case Experiment::ReflectionMc:
      run_reflection_mc(r);
      break;
    case Experiment::TraceNormDecay:
      run_tracenorm_decay(r);
      break;
    case Experiment::LimitSampler:
      run_limit_sampler(r);
      break;
  }
  Json report;
  report["version"] = kVersion;
  report["experiment"] = to_string(cfg.experiment);
  report["config"] = Json::parse(config_to_json(cfg));
  Json warnings = Json::array();
  if (cfg.seed == 0) {
    warnings.push_back("default master seed 0 in use; set an explicit seed for production runs");
  }
  report["warnings"] = warnings;
  report["summary"] = r.result.summary;
  report["results"] = r.body;
  r.result.report_json = report.dump(2) + "\n";
  r.out.text("report.json", r.result.report_json);
  r.result.files = r.out.files();
  return r.result;
}

}  // namespace softshock
