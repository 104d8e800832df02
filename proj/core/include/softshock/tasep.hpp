#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace softshock {

/// Raised when the simulated window is too small for the requested run.
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Macroscopic initial densities left (rho_minus) and right (rho_plus) of
/// the origin.
struct InitialProfile {
  double rho_minus = 0.5;
  double rho_plus = 0.5;

  /// Throws std::invalid_argument unless both densities lie in [0, 1].
  static InitialProfile explicit_densities(double rho_minus, double rho_plus);
  /// rho_{+-} = (1 +- beta (t/2)^{-1/3}) / 2; requires t >= 2 |beta|^3.
  static InitialProfile soft_shock(double beta, double t);
};

/// True iff site index k (counted away from the origin) is occupied in the
/// balanced word of density rho: floor((k+1) rho) > floor(k rho).
bool balanced_occupied(double rho, std::int64_t k);

/// Lattice region and particle selection of a simulation.
///
/// Sites [lo, hi) are represented. Right of the origin only particles
/// initially at sites <= right_cut are kept; when max_label is set, particles
/// numbered above it (they sit further left and can never affect lower
/// numbered ones) are dropped.
struct TasepWindow {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t right_cut = 0;
  std::optional<std::int64_t> max_label;

  /// Sites [-w, w]; particles right of w / 2 are dropped so that the
  /// leading particle has room to run.
  static TasepWindow symmetric(std::int64_t w);
};

/// One TASEP configuration. Particles are stored right to left: index 0 is
/// the rightmost particle and carries number `first_label`; index i carries
/// number first_label + i.
class TasepState {
 public:
  TasepState() = default;

  double time() const { return time_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  std::int64_t first_label() const { return first_label_; }
  std::int64_t last_label() const {
    return first_label_ + static_cast<std::int64_t>(positions_.size()) - 1;
  }
  std::size_t particle_count() const { return positions_.size(); }
  const std::vector<std::int64_t>& positions() const { return positions_; }
  const std::vector<std::int64_t>& initial_positions() const { return initial_; }
  std::uint64_t events() const { return events_; }

  bool has_label(std::int64_t n) const { return n >= first_label_ && n <= last_label(); }
  /// X_t(n). Throws std::out_of_range for untracked n.
  std::int64_t position_of(std::int64_t n) const;
  /// X_0(n).
  std::int64_t initial_position_of(std::int64_t n) const;
  bool occupied(std::int64_t site) const;
  /// Number of jumps made across the bond (site, site + 1).
  std::uint64_t bond_flux(std::int64_t site) const;
  /// Number of particles currently able to jump.
  std::size_t active_count() const { return active_.size(); }
  bool is_active(std::size_t index) const { return slot_[index] >= 0; }

  /// X_t^{-1}(u) = min{n : X_t(n) <= u}. Throws std::out_of_range if u lies
  /// left of every tracked particle.
  std::int64_t inverse_position(std::int64_t u) const;

  /// Throws std::logic_error describing the first violated invariant
  /// (ordering, occupancy consistency, active-set exactness).
  void check_invariants() const;

  /// Moves particle `index` one site right (must be active) at time `when`.
  void apply_jump(std::size_t index, double when);
  /// Sets the clock forward without any jump.
  void advance_to(double when) { time_ = std::max(time_, when); }
  /// Particle index of active slot `slot`.
  std::size_t active_particle(std::size_t slot) const { return active_[slot]; }

 private:
  friend TasepState build_initial(const InitialProfile&, const TasepWindow&);

  void refresh_activity(std::size_t index);
  void set_active(std::size_t index, bool on);

  double time_ = 0.0;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  std::int64_t first_label_ = 1;
  std::vector<std::int64_t> positions_;
  std::vector<std::int64_t> initial_;
  std::vector<std::uint8_t> occupancy_;
  std::vector<std::uint64_t> flux_;
  std::vector<std::uint32_t> active_;
  std::vector<std::int32_t> slot_;
  std::uint64_t events_ = 0;
};

/// Deterministic balanced-word configuration of the profile inside the
/// window. Numbering: particle 1 is the first one left of the origin,
/// particle 0 the first one at or right of it.
/// Throws std::invalid_argument for an empty or inconsistent window.
TasepState build_initial(const InitialProfile& profile, const TasepWindow& window);
TasepState build_initial(const InitialProfile& profile, std::int64_t w);

struct EvolveOptions {
  /// Run check_invariants() every this many events (0: never).
  std::uint64_t check_every = 0;
};

/// Runs the exact continuous-time dynamics until time `until`.
/// Throws SimulationError if a particle reaches the right end of the window
/// and std::invalid_argument if until < state.time().
void evolve(TasepState& state, double until, std::mt19937_64& rng, const EvolveOptions& opts = {});
/// Same with an RNG seeded from `seed`.
void evolve(TasepState& state, double until, std::uint64_t seed, const EvolveOptions& opts = {});

/// 64-bit seed of trial `trial` under master seed `seed` (splitmix64 mix).
std::uint64_t derive_trial_seed(std::uint64_t seed, std::uint64_t trial);
/// Generator seeded from derive_trial_seed(seed, trial).
std::mt19937_64 trial_rng(std::uint64_t seed, std::uint64_t trial);

struct ShockIndices {
  std::int64_t n_shk = 0;  // rho_- rho_+ t, rounded
  std::int64_t n = 0;      // t/4 - (beta^2/2)(t/2)^{1/3} - x (t/2)^{2/3}, rounded
  double m = 0.0;          // 2x (t/2)^{2/3} / (1 - beta (t/2)^{-1/3})
};

/// Rounding is to nearest, ties to even. Throws std::invalid_argument if
/// t < 2|beta|^3 or the resulting n <= 0.
ShockIndices shock_indices(double t, double beta, double x);

/// (m(t,x) - X_t(n(t,x))) / (t/2)^{1/3}.
double shock_fluctuation(const TasepState& state, double t, double beta, double x);

/// Smallest window that reproduces X_t(n) exactly for all n <= max_label up
/// to time t (with overwhelming probability): particles numbered above
/// max_label are dropped, and right particles initially beyond
/// max(observe_right, 0) + t + 8 sqrt(t) + 32 are dropped since their absence
/// cannot travel back to the observation region in time.
TasepWindow light_cone_window(const InitialProfile& profile, std::int64_t max_label, double t,
                              double observe_right);

struct ShockTrial {
  double observable = 0.0;   // shock_fluctuation
  std::int64_t n = 0;        // particle observed
  std::int64_t position = 0; // X_t(n)
  double m = 0.0;
  std::uint64_t events = 0;
};

/// One soft-shock run to time t in the light-cone window with the RNG of
/// trial_rng(seed, trial).
ShockTrial simulate_shock_trial(double t, double beta, double x, std::uint64_t seed,
                                std::uint64_t trial);

struct HeightSnapshot {
  double time = 0.0;
  std::int64_t first_site = 0;
  std::vector<std::int64_t> values;  // h_t(first_site + i)
  std::int64_t origin_offset = 0;    // X_0^{-1}(-1)
};

/// h_t(z) = -2 (X_t^{-1}(z - 1) - X_0^{-1}(-1)) - z for z in [z0, z1].
/// Throws std::out_of_range if the range is not covered by the state.
HeightSnapshot height_snapshot(const TasepState& state, std::int64_t z0, std::int64_t z1);

/// eps^{1/2} [h_t(2 x / eps) + t / 2] with eps = (t/2)^{-2/3} (time T = 1).
double kpz_rescaled_height(const TasepState& state, double t, double x);

/// CSV `site,occupied,height` over [z0, z1].
void write_snapshot_csv(const TasepState& state, std::int64_t z0, std::int64_t z1,
                        const std::filesystem::path& path);

}  // namespace softshock
