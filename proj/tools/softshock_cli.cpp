#include <cstdio>
#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "softshock/harness.hpp"
#include "softshock/tasep.hpp"
#include "softshock/version.hpp"

namespace {

using softshock::Experiment;
using softshock::ExperimentConfig;

// Options shared by every subcommand, bound straight into the config.
void add_common(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--a-grid", c.a_grid, "Levels a (comma separated)")->delimiter(',');
  sub->add_option("--nodes", c.quad.nodes, "Quadrature nodes on the main interval");
  sub->add_option("--length", c.quad.length, "Truncation length L");
  sub->add_option("--aux-panel", c.quad.aux_panel, "Panel length of inner integrals");
  sub->add_option("--aux-order", c.quad.aux_order, "Gauss-Legendre order per inner panel");
}

void add_seeded(CLI::App* sub, ExperimentConfig& c) {
  sub->add_option("--trials", c.trials, "Number of trials");
  sub->add_option("--seed", c.seed, "Master seed");
}

void print_summary(const softshock::ExperimentResult& r) {
  for (const auto& [k, v] : r.summary) std::printf("%s = %.10g\n", k.c_str(), v);
  for (const auto& f : r.files) std::printf("wrote %s\n", f.string().c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-shock TASEP laboratory: determinantal laws and simulations"};
  app.set_version_flag("--version", std::string(softshock::kVersion));
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_file;
  app.add_option("--out", cfg.out, "Output directory (nothing is written when absent)");
  app.add_option("--threads", cfg.threads,
                 "Worker threads (default: SOFTSHOCK_THREADS, else 1)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--config", config_file,
                 "JSON config; its fields override command line flags")
      ->check(CLI::ExistingFile);
  app.fallthrough();

  std::map<CLI::App*, Experiment> which;
  auto sub = [&](Experiment e, const std::string& help) {
    CLI::App* s = app.add_subcommand(softshock::to_string(e), help);
    which[s] = e;
    add_common(s, cfg);
    return s;
  };

  sub(Experiment::Tw1Table, "Tabulate the GOE Tracy-Widom distribution F1(s)");

  auto* ss = sub(Experiment::SoftShockCdf, "Tabulate the soft-shock one-point law");
  ss->add_option("--beta", cfg.beta, "Shock softness beta >= 0");
  ss->add_option("--x", cfg.x_values, "Offsets x (comma separated)")->delimiter(',');

  auto* t1 = sub(Experiment::Theorem1Sweep, "Distance to F1(2a)^2 as beta grows");
  t1->add_option("--betas", cfg.betas, "Values of beta")->delimiter(',');

  auto* p1 = sub(Experiment::Prop1Sweep, "Distance to the x-shifted limit and x symmetry");
  p1->add_option("--betas", cfg.betas, "Values of beta")->delimiter(',');
  p1->add_option("--x", cfg.x_values, "Offsets x")->delimiter(',');

  auto* ts = sub(Experiment::TasepShock, "Simulated shock fluctuations versus the law");
  ts->add_option("--t", cfg.t, "Time t");
  ts->add_option("--beta", cfg.beta, "Shock softness beta");
  ts->add_option("--x", cfg.x_values, "Offset x (one value)")->delimiter(',');
  add_seeded(ts, cfg);

  auto* bf = sub(Experiment::BurgersFront, "Density profile versus the Burgers solution");
  bf->add_option("--t", cfg.t, "Time t");
  bf->add_option("--rho-minus", cfg.rho_minus, "Density left of the origin");
  bf->add_option("--rho-plus", cfg.rho_plus, "Density right of the origin");
  add_seeded(bf, cfg);

  auto* rm = sub(Experiment::ReflectionMc, "Brownian Monte Carlo of the hitting kernel");
  rm->add_option("--beta", cfg.beta, "Barrier slope parameter beta > 0");
  rm->add_option("--u", cfg.u_values, "Starting points u")->delimiter(',');
  rm->add_option("--v", cfg.v_values, "Arguments v")->delimiter(',');
  rm->add_option("--paths", cfg.paths, "Paths per u");
  rm->add_option("--dt", cfg.dt, "Euler step");
  rm->add_option("--horizon", cfg.horizon, "Time horizon");
  rm->add_option("--seed", cfg.seed, "Master seed");

  auto* tn = sub(Experiment::TraceNormDecay, "Trace norm of the correction kernel versus beta");
  tn->add_option("--betas", cfg.betas, "Values of beta")->delimiter(',');

  auto* ls = sub(Experiment::LimitSampler, "Sampler of the large-beta limit process");
  ls->add_option("--x", cfg.x_values, "Evaluation points x")->delimiter(',');
  add_seeded(ls, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [s, e] : which) {
      if (s->parsed()) cfg.experiment = e;
    }
    if (!config_file.empty()) {
      const Experiment chosen = cfg.experiment;
      cfg = softshock::load_config(config_file, cfg);
      if (cfg.experiment != chosen) {
        throw std::invalid_argument("config file names experiment '" +
                                    softshock::to_string(cfg.experiment) +
                                    "' but the subcommand is '" + softshock::to_string(chosen) +
                                    "'");
      }
    }
    const auto result = softshock::run_experiment(cfg);
    print_summary(result);
    if (cfg.out.empty()) std::cout << result.report_json;
  } catch (const softshock::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
