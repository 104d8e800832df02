#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "softshock/parallel.hpp"
#include "softshock/tasep.hpp"

using namespace softshock;

TEST(Initial, HalfDensityAlternates) {
  const auto s = build_initial(InitialProfile{0.5, 0.5}, 40);
  for (std::int64_t z = -40; z <= 20; ++z) {
    const std::int64_t k = z >= 0 ? z : -1 - z;
    EXPECT_EQ(s.occupied(z), k % 2 == 1) << z;
  }
}

TEST(Initial, StepDataNumbering) {
  TasepWindow w;
  w.lo = -30;
  w.hi = 30;
  w.right_cut = 10;
  const auto s = build_initial(InitialProfile::explicit_densities(1.0, 0.0), w);
  EXPECT_EQ(s.first_label(), 1);
  for (std::int64_t n = 1; n <= 30; ++n) EXPECT_EQ(s.initial_position_of(n), -n);
}

TEST(Initial, BalancedWordThreeFifths) {
  TasepWindow w;
  w.lo = -200;
  w.hi = 400;
  w.right_cut = 199;
  const auto s = build_initial(InitialProfile{0.6, 0.6}, w);
  for (std::int64_t b = 0; b < 40; ++b) {
    int right = 0, left = 0;
    for (std::int64_t k = 5 * b; k < 5 * b + 5; ++k) {
      right += s.occupied(k);
      left += s.occupied(-1 - k);
    }
    EXPECT_EQ(right, 3);
    EXPECT_EQ(left, 3);
  }
}

TEST(Initial, EmpiricalDensityCloseToProfile) {
  const auto prof = InitialProfile::soft_shock(1.0, 2000.0);
  const std::int64_t W = 1000;
  TasepWindow w;
  w.lo = -W;
  w.hi = W + 10;
  w.right_cut = W;
  const auto s = build_initial(prof, w);
  int right = 0, left = 0;
  for (std::int64_t z = 0; z < W; ++z) right += s.occupied(z);
  for (std::int64_t z = -W; z < 0; ++z) left += s.occupied(z);
  EXPECT_NEAR(right / double(W), prof.rho_plus, 2.0 / W);
  EXPECT_NEAR(left / double(W), prof.rho_minus, 2.0 / W);
}

TEST(Initial, ProfileValidation) {
  EXPECT_THROW(InitialProfile::explicit_densities(1.2, 0.5), std::invalid_argument);
  EXPECT_THROW(InitialProfile::soft_shock(3.0, 10.0), std::invalid_argument);
  const auto p = InitialProfile::soft_shock(1.0, 2000.0);
  EXPECT_NEAR(p.rho_minus, 0.45, 1e-12);
  EXPECT_NEAR(p.rho_plus, 0.55, 1e-12);
}

TEST(Evolve, SingleParticleIsPoisson) {
  TasepWindow w;
  w.lo = -2;
  w.hi = 100;
  w.right_cut = 0;
  w.max_label = 0;
  double sum = 0.0, sq = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    auto s = build_initial(InitialProfile{0.0, 1.0}, w);
    ASSERT_EQ(s.particle_count(), 1u);
    auto rng = trial_rng(3, i);
    evolve(s, 10.0, rng);
    const double d = static_cast<double>(s.position_of(0));
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 10.0, 4.0 * std::sqrt(10.0 / n));
  EXPECT_NEAR(var, 10.0, 1.5);
}

TEST(Evolve, AdjacentParticlesKeepOrder) {
  TasepWindow w;
  w.lo = -3;
  w.hi = 200;
  w.right_cut = 1;
  auto s = build_initial(InitialProfile{0.0, 1.0}, w);
  ASSERT_EQ(s.particle_count(), 2u);
  auto rng = trial_rng(1, 0);
  EvolveOptions o;
  o.check_every = 1;
  for (double t = 1.0; t <= 40.0; t += 1.0) {
    evolve(s, t, rng, o);
    EXPECT_GT(s.position_of(-1), s.position_of(0));
  }
}

TEST(Evolve, InvariantsAndFluxConservation) {
  const std::int64_t W = 300;
  auto s = build_initial(InitialProfile{0.3, 0.7}, W);
  const auto before = s.positions();
  auto rng = trial_rng(11, 0);
  EvolveOptions o;
  o.check_every = 97;
  evolve(s, 60.0, rng, o);
  s.check_invariants();
  // Count change on [z0, z1] equals inflow across z0 - 1 minus outflow across z1.
  for (std::int64_t z0 : {-100, -7, 0, 40}) {
    const std::int64_t z1 = z0 + 50;
    std::int64_t c0 = 0, c1 = 0;
    for (auto p : before) c0 += (p >= z0 && p <= z1);
    for (auto p : s.positions()) c1 += (p >= z0 && p <= z1);
    const auto in = static_cast<std::int64_t>(s.bond_flux(z0 - 1));
    const auto out = static_cast<std::int64_t>(s.bond_flux(z1));
    EXPECT_EQ(c1 - c0, in - out) << z0;
  }
  // Every jump is recorded once.
  std::uint64_t total = 0;
  for (std::int64_t z = s.lo(); z < s.hi(); ++z) total += s.bond_flux(z);
  EXPECT_EQ(total, s.events());
}

TEST(Evolve, DeterministicGivenSeed) {
  auto a = build_initial(InitialProfile{0.4, 0.6}, 200);
  auto b = build_initial(InitialProfile{0.4, 0.6}, 200);
  evolve(a, 30.0, std::uint64_t{77});
  evolve(b, 30.0, std::uint64_t{77});
  EXPECT_EQ(a.positions(), b.positions());
  EXPECT_EQ(a.events(), b.events());
}

TEST(Evolve, TrialsIndependentOfThreadCount) {
  auto run = [](int threads) {
    std::vector<std::int64_t> out(6);
    parallel_for(out.size(), threads, [&](std::size_t i) {
      out[i] = simulate_shock_trial(200.0, 1.0, 0.0, 5, i).position;
    });
    return out;
  };
  EXPECT_EQ(run(1), run(4));
}

TEST(Evolve, WindowBreachIsReported) {
  TasepWindow w;
  w.lo = -5;
  w.hi = 6;
  w.right_cut = 0;
  auto s = build_initial(InitialProfile{0.5, 1.0}, w);
  EXPECT_THROW(evolve(s, 100.0, std::uint64_t{1}), SimulationError);
}

TEST(Evolve, RejectsPastTarget) {
  auto s = build_initial(InitialProfile{0.5, 0.5}, 20);
  evolve(s, 1.0, std::uint64_t{1});
  EXPECT_THROW(evolve(s, 0.5, std::uint64_t{1}), std::invalid_argument);
}

TEST(ShockIndices, Values) {
  const auto a = shock_indices(2000.0, 1.0, 0.0);
  EXPECT_EQ(a.n, 495);
  EXPECT_EQ(a.m, 0.0);
  const auto b = shock_indices(2000.0, 0.0, 0.0);
  EXPECT_EQ(b.n_shk, 500);
  EXPECT_EQ(b.n, 500);
  const auto c = shock_indices(2000.0, 0.0, 0.5);
  EXPECT_EQ(c.n, static_cast<std::int64_t>(std::nearbyint(500.0 - 0.5 * 100.0)));
  EXPECT_NEAR(c.m, 2.0 * 0.5 * 100.0, 1e-9);
  EXPECT_THROW(shock_indices(2000.0, 1.0, 40.0), std::invalid_argument);
  EXPECT_THROW(shock_indices(10.0, 3.0, 0.0), std::invalid_argument);
}

TEST(ShockFluctuation, SignConvention) {
  // Unevolved state: X_0(n) = -2n + O(1) < m = 0 gives a positive value.
  const auto idx = shock_indices(2000.0, 1.0, 0.0);
  const auto prof = InitialProfile::soft_shock(1.0, 2000.0);
  const auto s = build_initial(prof, light_cone_window(prof, idx.n, 2000.0, idx.m));
  const double f = shock_fluctuation(s, 2000.0, 1.0, 0.0);
  EXPECT_NEAR(f, -static_cast<double>(s.position_of(idx.n)) / 10.0, 1e-12);
  EXPECT_GT(f, 0.0);
}

TEST(Height, GradientAndOrigin) {
  auto s = build_initial(InitialProfile{0.5, 0.5}, 60);
  auto h = height_snapshot(s, -20, 20);
  for (std::size_t i = 1; i < h.values.size(); ++i) {
    EXPECT_EQ(std::abs(h.values[i] - h.values[i - 1]), 1);
  }
  EXPECT_EQ(h.origin_offset, 1);
  for (std::int64_t z = -20; z <= 20; ++z) {
    const auto v = h.values[static_cast<std::size_t>(z + 20)];
    EXPECT_TRUE(v == 0 || v == -1 || v == 1) << z << " " << v;
  }
}

TEST(Height, SingleJumpLowersOneSiteByTwo) {
  auto s = build_initial(InitialProfile{0.5, 0.5}, 60);
  const auto before = height_snapshot(s, -30, 30);
  ASSERT_TRUE(s.is_active(5));
  const std::int64_t from = s.positions()[5];
  s.apply_jump(5, 0.1);
  const auto after = height_snapshot(s, -30, 30);
  int changed = 0;
  for (std::size_t i = 0; i < before.values.size(); ++i) {
    if (before.values[i] != after.values[i]) {
      ++changed;
      EXPECT_EQ(after.values[i] - before.values[i], -2);
      EXPECT_EQ(static_cast<std::int64_t>(i) - 30, from + 1);
    }
  }
  EXPECT_EQ(changed, 1);
}

TEST(Height, RangeChecked) {
  auto s = build_initial(InitialProfile{0.5, 0.5}, 20);
  EXPECT_THROW(height_snapshot(s, -20, 5), std::out_of_range);
  EXPECT_THROW(height_snapshot(s, 0, 30), std::out_of_range);
  EXPECT_THROW(height_snapshot(s, 3, 2), std::invalid_argument);
}

TEST(Height, FlatKpzRescaledIsOrderOne) {
  double sum = 0.0;
  const int n = 200;
  TasepWindow w;
  w.lo = -1200;
  w.right_cut = 1100;
  w.hi = 2400;
  for (int i = 0; i < n; ++i) {
    auto s = build_initial(InitialProfile{0.5, 0.5}, w);
    auto rng = trial_rng(21, i);
    evolve(s, 1000.0, rng);
    const double v = kpz_rescaled_height(s, 1000.0, 0.0);
    EXPECT_TRUE(std::isfinite(v));
    sum += v;
  }
  EXPECT_LT(std::abs(sum / n), 3.0);
}

TEST(Height, SnapshotCsv) {
  auto s = build_initial(InitialProfile{0.5, 0.5}, 20);
  const auto path = std::filesystem::temp_directory_path() / "softshock_snapshot.csv";
  write_snapshot_csv(s, -3, 3, path);
  std::ifstream f(path);
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "site,occupied,height");
  int rows = 0;
  while (std::getline(f, line)) ++rows;
  EXPECT_EQ(rows, 7);
  std::filesystem::remove(path);
}
