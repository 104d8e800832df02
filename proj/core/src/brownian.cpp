#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <stdexcept>

#include "softshock/kernels.hpp"
#include "softshock/parallel.hpp"
#include "softshock/specfun.hpp"

namespace softshock {

namespace {

constexpr std::int64_t kBatchPaths = 4096;

struct BatchSums {
  std::vector<double> sum;
  std::vector<double> sum_sq;
};

}  // namespace

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SOFTSHOCK_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<int>(n);
  }
  return 1;
}

std::vector<McEstimate> brownian_hypo_estimates(double beta, double u,
                                                const std::vector<double>& vs,
                                                std::int64_t paths, double dt, double horizon,
                                                std::uint64_t seed, int threads) {
  if (!(beta > 0.0)) throw std::domain_error("brownian_hypo_estimate: beta must be positive");
  if (!(u >= 0.0)) {
    std::ostringstream msg;
    msg << "brownian_hypo_estimate: u must be positive (u <= 0 is the trivial branch), got "
        << u;
    throw std::domain_error(msg.str());
  }
  if (paths < 1) throw std::invalid_argument("brownian_hypo_estimate: paths must be >= 1");
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw std::invalid_argument("brownian_hypo_estimate: dt and horizon must be positive");
  }
  std::vector<McEstimate> out(vs.size());
  if (u == 0.0) {
    for (std::size_t j = 0; j < vs.size(); ++j) {
      out[j] = {hypo_closed_form(beta, 0.0, vs[j]), 0.0, paths};
    }
    return out;
  }

  const std::int64_t batches = (paths + kBatchPaths - 1) / kBatchPaths;
  std::vector<BatchSums> sums(static_cast<std::size_t>(batches));
  const double sd = std::sqrt(2.0 * dt);
  const double drift = 2.0 * beta * dt;

  parallel_for(static_cast<std::size_t>(batches), threads, [&](std::size_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), 0x68797030u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unif;
    BatchSums& acc = sums[b];
    acc.sum.assign(vs.size(), 0.0);
    acc.sum_sq.assign(vs.size(), 0.0);
    const std::int64_t first = static_cast<std::int64_t>(b) * kBatchPaths;
    const std::int64_t count = std::min(kBatchPaths, paths - first);
    for (std::int64_t p = 0; p < count; ++p) {
      // X(y) = B(y) - 2 beta y; tau is its first passage to 0.
      double x = u;
      double y = 0.0;
      double tau = -1.0;
      while (y < horizon) {
        const double x1 = x - drift + sd * normal(rng);
        if (x1 <= 0.0) {
          tau = y + dt * x / (x - x1);
          break;
        }
        // Bridge correction: chance the path dipped below 0 between grid points.
        if (unif(rng) < std::exp(-x * x1 / dt)) {
          tau = y + dt * x / (x + x1);
          break;
        }
        x = x1;
        y += dt;
      }
      if (tau < 0.0 || tau > horizon) continue;
      for (std::size_t j = 0; j < vs.size(); ++j) {
        const double f = s_kernel(-tau, 2.0 * beta * tau, vs[j]);
        acc.sum[j] += f;
        acc.sum_sq[j] += f * f;
      }
    }
  });

  const double n = static_cast<double>(paths);
  for (std::size_t j = 0; j < vs.size(); ++j) {
    double s = 0.0, s2 = 0.0;
    for (const auto& acc : sums) {
      s += acc.sum[j];
      s2 += acc.sum_sq[j];
    }
    const double mean = s / n;
    const double var = paths > 1 ? std::max(s2 / n - mean * mean, 0.0) * n / (n - 1.0) : 0.0;
    out[j] = {mean, std::sqrt(var / n), paths};
  }
  return out;
}

McEstimate brownian_hypo_estimate(double beta, double u, double v, std::int64_t paths,
                                  double dt, double horizon, std::uint64_t seed, int threads) {
  return brownian_hypo_estimates(beta, u, {v}, paths, dt, horizon, seed, threads).front();
}

}  // namespace softshock
