#include "softshock/tasep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace softshock {

namespace {

// Uniform integer in [0, n) (Lemire's multiply-shift with rejection).
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  std::uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = rng();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

// Uniform double in (0, 1].
inline double open_unit(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

InitialProfile InitialProfile::explicit_densities(double rho_minus, double rho_plus) {
  auto ok = [](double r) { return r >= 0.0 && r <= 1.0; };
  if (!ok(rho_minus) || !ok(rho_plus)) {
    std::ostringstream msg;
    msg << "InitialProfile: densities must lie in [0, 1], got " << rho_minus << ", " << rho_plus;
    throw std::invalid_argument(msg.str());
  }
  return {rho_minus, rho_plus};
}

InitialProfile InitialProfile::soft_shock(double beta, double t) {
  if (!(t > 0.0) || t < 2.0 * std::pow(std::abs(beta), 3.0)) {
    std::ostringstream msg;
    msg << "InitialProfile::soft_shock: need t >= 2|beta|^3 (t=" << t << ", beta=" << beta << ")";
    throw std::invalid_argument(msg.str());
  }
  const double d = beta * std::cbrt(2.0 / t);
  return explicit_densities(0.5 * (1.0 - d), 0.5 * (1.0 + d));
}

bool balanced_occupied(double rho, std::int64_t k) {
  // The tiny offset keeps exact rationals such as 3/5 from flickering with
  // the binary representation of rho.
  const long double r = rho;
  const auto lo = std::floor(static_cast<long double>(k) * r + 1e-12L);
  const auto hi = std::floor(static_cast<long double>(k + 1) * r + 1e-12L);
  return hi > lo;
}

TasepWindow TasepWindow::symmetric(std::int64_t w) {
  if (w < 1) throw std::invalid_argument("TasepWindow: half-width must be >= 1");
  TasepWindow win;
  win.lo = -w;
  win.hi = w + 1;
  win.right_cut = w / 2;
  return win;
}

TasepState build_initial(const InitialProfile& profile, const TasepWindow& window) {
  if (window.hi <= window.lo + 1 || window.right_cut >= window.hi) {
    throw std::invalid_argument("build_initial: inconsistent window");
  }
  (void)InitialProfile::explicit_densities(profile.rho_minus, profile.rho_plus);
  TasepState s;
  s.lo_ = window.lo;
  s.hi_ = window.hi;

  // Right side, from the far end towards the origin, numbered 0, -1, -2, ...
  // from the origin outwards.
  std::vector<std::int64_t> right;
  for (std::int64_t k = 0; k <= window.right_cut; ++k) {
    if (k >= window.lo && balanced_occupied(profile.rho_plus, k)) right.push_back(k);
  }
  std::vector<std::int64_t> left;
  for (std::int64_t k = 0;; ++k) {
    const std::int64_t site = -1 - k;
    if (site < window.lo) break;
    if (site >= window.hi) continue;
    if (balanced_occupied(profile.rho_minus, k)) {
      const auto label = static_cast<std::int64_t>(left.size()) + 1;
      if (window.max_label && label > *window.max_label) break;
      left.push_back(site);
    }
  }
  const auto n_right = static_cast<std::int64_t>(right.size());
  std::vector<std::int64_t> pos(right.rbegin(), right.rend());
  pos.insert(pos.end(), left.begin(), left.end());
  s.first_label_ = 1 - n_right;
  if (window.max_label) {
    const std::int64_t keep = *window.max_label - s.first_label_ + 1;
    if (keep <= 0) throw std::invalid_argument("build_initial: max_label drops every particle");
    if (static_cast<std::int64_t>(pos.size()) > keep) pos.resize(static_cast<std::size_t>(keep));
  }
  if (pos.empty()) throw std::invalid_argument("build_initial: no particles in window");
  s.positions_ = pos;
  s.initial_ = pos;

  const auto width = static_cast<std::size_t>(s.hi_ - s.lo_);
  s.occupancy_.assign(width, 0);
  s.flux_.assign(width, 0);
  for (auto p : pos) s.occupancy_[static_cast<std::size_t>(p - s.lo_)] = 1;
  s.slot_.assign(pos.size(), -1);
  s.active_.reserve(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i) s.refresh_activity(i);
  return s;
}

TasepState build_initial(const InitialProfile& profile, std::int64_t w) {
  return build_initial(profile, TasepWindow::symmetric(w));
}

std::int64_t TasepState::position_of(std::int64_t n) const {
  if (!has_label(n)) {
    throw std::out_of_range("TasepState: particle " + std::to_string(n) + " is not tracked");
  }
  return positions_[static_cast<std::size_t>(n - first_label_)];
}

std::int64_t TasepState::initial_position_of(std::int64_t n) const {
  if (!has_label(n)) {
    throw std::out_of_range("TasepState: particle " + std::to_string(n) + " is not tracked");
  }
  return initial_[static_cast<std::size_t>(n - first_label_)];
}

bool TasepState::occupied(std::int64_t site) const {
  if (site < lo_ || site >= hi_) throw std::out_of_range("TasepState: site outside window");
  return occupancy_[static_cast<std::size_t>(site - lo_)] != 0;
}

std::uint64_t TasepState::bond_flux(std::int64_t site) const {
  if (site < lo_ || site >= hi_) throw std::out_of_range("TasepState: bond outside window");
  return flux_[static_cast<std::size_t>(site - lo_)];
}

std::int64_t TasepState::inverse_position(std::int64_t u) const {
  // positions_ is strictly decreasing; first index with position <= u.
  const auto it = std::lower_bound(positions_.begin(), positions_.end(), u,
                                   [](std::int64_t p, std::int64_t v) { return p > v; });
  if (it == positions_.end()) {
    throw std::out_of_range("inverse_position: site " + std::to_string(u) +
                            " lies left of every tracked particle");
  }
  return first_label_ + (it - positions_.begin());
}

void TasepState::set_active(std::size_t index, bool on) {
  const bool was = slot_[index] >= 0;
  if (on == was) return;
  if (on) {
    slot_[index] = static_cast<std::int32_t>(active_.size());
    active_.push_back(static_cast<std::uint32_t>(index));
  } else {
    const auto s = static_cast<std::size_t>(slot_[index]);
    const std::uint32_t moved = active_.back();
    active_[s] = moved;
    slot_[moved] = static_cast<std::int32_t>(s);
    active_.pop_back();
    slot_[index] = -1;
  }
}

void TasepState::refresh_activity(std::size_t index) {
  const std::int64_t target = positions_[index] + 1;
  bool free;
  if (index == 0) {
    free = target < hi_;
  } else {
    free = positions_[index - 1] != target;
  }
  set_active(index, free);
}

void TasepState::apply_jump(std::size_t index, double when) {
  const std::int64_t from = positions_[index];
  if (index == 0 && from + 1 >= hi_ - 1) {
    std::ostringstream msg;
    msg << "window breach: particle " << first_label_ << " reached site " << from + 1
        << " at the right end of [" << lo_ << ", " << hi_ << "); enlarge the window";
    throw SimulationError(msg.str());
  }
  occupancy_[static_cast<std::size_t>(from - lo_)] = 0;
  occupancy_[static_cast<std::size_t>(from + 1 - lo_)] = 1;
  flux_[static_cast<std::size_t>(from - lo_)] += 1;
  positions_[index] = from + 1;
  time_ = when;
  ++events_;
  refresh_activity(index);
  if (index + 1 < positions_.size()) refresh_activity(index + 1);
}

void TasepState::check_invariants() const {
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const auto p = positions_[i];
    if (p < lo_ || p >= hi_) throw std::logic_error("particle outside window");
    if (i > 0 && !(positions_[i - 1] > p)) {
      throw std::logic_error("ordering/exclusion violated at index " + std::to_string(i));
    }
  }
  std::size_t count = 0;
  for (auto o : occupancy_) count += o;
  if (count != positions_.size()) throw std::logic_error("occupancy count mismatch");
  for (auto p : positions_) {
    if (!occupancy_[static_cast<std::size_t>(p - lo_)]) {
      throw std::logic_error("occupancy missing a particle");
    }
  }
  std::size_t expected_active = 0;
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    const std::int64_t target = positions_[i] + 1;
    const bool free = i == 0 ? target < hi_ : positions_[i - 1] != target;
    if (free != (slot_[i] >= 0)) {
      throw std::logic_error("active set wrong for index " + std::to_string(i));
    }
    if (free) {
      ++expected_active;
      if (active_[static_cast<std::size_t>(slot_[i])] != i) {
        throw std::logic_error("active slot table corrupted");
      }
    }
  }
  if (expected_active != active_.size()) throw std::logic_error("active set size mismatch");
}

void evolve(TasepState& state, double until, std::mt19937_64& rng, const EvolveOptions& opts) {
  if (until < state.time()) throw std::invalid_argument("evolve: until precedes current time");
  double now = state.time();
  std::uint64_t since_check = 0;
  for (;;) {
    const std::size_t k = state.active_count();
    if (k == 0) break;
    now += -std::log(open_unit(rng)) / static_cast<double>(k);
    if (now > until) break;
    const auto slot = static_cast<std::size_t>(bounded(rng, k));
    state.apply_jump(state.active_particle(slot), now);
    if (opts.check_every && ++since_check >= opts.check_every) {
      state.check_invariants();
      since_check = 0;
    }
  }
  // Memorylessness: the overshooting waiting time is simply discarded.
  state.advance_to(until);
}

void evolve(TasepState& state, double until, std::uint64_t seed, const EvolveOptions& opts) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::mt19937_64 rng(seq);
  evolve(state, until, rng, opts);
}

std::uint64_t derive_trial_seed(std::uint64_t seed, std::uint64_t trial) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ (trial * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial) {
  const std::uint64_t s = derive_trial_seed(seed, trial);
  std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32)};
  return std::mt19937_64(seq);
}

ShockIndices shock_indices(double t, double beta, double x) {
  const InitialProfile prof = InitialProfile::soft_shock(beta, t);
  const double scale = std::cbrt(t / 2.0);
  ShockIndices out;
  out.n_shk = static_cast<std::int64_t>(std::nearbyint(prof.rho_minus * prof.rho_plus * t));
  out.n = static_cast<std::int64_t>(
      std::nearbyint(t / 4.0 - 0.5 * beta * beta * scale - x * scale * scale));
  out.m = 2.0 * x * scale * scale / (1.0 - beta / scale);
  if (out.n <= 0 || out.n_shk <= 0) {
    std::ostringstream msg;
    msg << "shock_indices: particle number " << out.n << " is not positive (t=" << t
        << ", beta=" << beta << ", x=" << x << ")";
    throw std::invalid_argument(msg.str());
  }
  return out;
}

double shock_fluctuation(const TasepState& state, double t, double beta, double x) {
  const ShockIndices idx = shock_indices(t, beta, x);
  return (idx.m - static_cast<double>(state.position_of(idx.n))) / std::cbrt(t / 2.0);
}

TasepWindow light_cone_window(const InitialProfile& profile, std::int64_t max_label, double t,
                              double observe_right) {
  if (!(t >= 0.0)) throw std::invalid_argument("light_cone_window: negative time");
  if (max_label < 1) throw std::invalid_argument("light_cone_window: max_label must be >= 1");
  if (!(profile.rho_minus > 0.0)) {
    throw std::invalid_argument("light_cone_window: needs rho_minus > 0");
  }
  const double spread = t + 8.0 * std::sqrt(t) + 32.0;
  TasepWindow w;
  w.lo = -static_cast<std::int64_t>(std::ceil(static_cast<double>(max_label + 2) /
                                              profile.rho_minus)) - 4;
  w.right_cut = static_cast<std::int64_t>(std::ceil(std::max(observe_right, 0.0) + spread));
  w.hi = w.right_cut + static_cast<std::int64_t>(std::ceil(t + 10.0 * std::sqrt(t) + 64.0));
  w.max_label = max_label;
  return w;
}

ShockTrial simulate_shock_trial(double t, double beta, double x, std::uint64_t seed,
                                std::uint64_t trial) {
  const ShockIndices idx = shock_indices(t, beta, x);
  const InitialProfile prof = InitialProfile::soft_shock(beta, t);
  TasepState state = build_initial(prof, light_cone_window(prof, idx.n, t, idx.m));
  auto rng = trial_rng(seed, trial);
  evolve(state, t, rng);
  ShockTrial out;
  out.n = idx.n;
  out.m = idx.m;
  out.position = state.position_of(idx.n);
  out.observable = (idx.m - static_cast<double>(out.position)) / std::cbrt(t / 2.0);
  out.events = state.events();
  return out;
}

namespace {

std::int64_t origin_offset(const TasepState& state) {
  // X_0^{-1}(-1): the first particle left of the origin is number 1.
  const auto& init = state.initial_positions();
  for (std::size_t i = 0; i < init.size(); ++i) {
    if (init[i] <= -1) return state.first_label() + static_cast<std::int64_t>(i);
  }
  return 1;
}

}  // namespace

HeightSnapshot height_snapshot(const TasepState& state, std::int64_t z0, std::int64_t z1) {
  if (z1 < z0) throw std::invalid_argument("height_snapshot: empty site range");
  if (z0 - 1 < state.lo() || z1 >= state.hi()) {
    throw std::out_of_range("height_snapshot: range outside the simulated window");
  }
  HeightSnapshot snap;
  snap.time = state.time();
  snap.first_site = z0;
  snap.origin_offset = origin_offset(state);
  snap.values.reserve(static_cast<std::size_t>(z1 - z0 + 1));
  std::int64_t h = -2 * (state.inverse_position(z0 - 1) - snap.origin_offset) - z0;
  snap.values.push_back(h);
  for (std::int64_t z = z0; z < z1; ++z) {
    h += state.occupied(z) ? 1 : -1;
    snap.values.push_back(h);
  }
  return snap;
}

double kpz_rescaled_height(const TasepState& state, double t, double x) {
  const double eps = std::pow(t / 2.0, -2.0 / 3.0);
  const auto z = static_cast<std::int64_t>(std::nearbyint(2.0 * x / eps));
  const HeightSnapshot snap = height_snapshot(state, z, z);
  return std::sqrt(eps) * (static_cast<double>(snap.values.front()) + 0.5 * t);
}

void write_snapshot_csv(const TasepState& state, std::int64_t z0, std::int64_t z1,
                        const std::filesystem::path& path) {
  const HeightSnapshot snap = height_snapshot(state, z0, z1);
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << "site,occupied,height\n";
  for (std::int64_t z = z0; z <= z1; ++z) {
    f << z << ',' << (state.occupied(z) ? 1 : 0) << ','
      << snap.values[static_cast<std::size_t>(z - z0)] << '\n';
  }
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace softshock
