#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "softshock/quadops.hpp"

namespace softshock {

/// Shock softness beta, spatial offset x (on the (2 beta)^{-1} x scale) and
/// level a.
struct SoftShockParams {
  double beta = 0.0;
  double x = 0.0;
  double a = 0.0;
};

/// Kernel of S_x = exp{x d^2 + d^3/3}:
/// exp((2/3) x^3 + x (v - u)) Ai(v - u + x^2), assembled in log space.
double s_kernel(double xparam, double u, double v);

/// GOE kernel A(u, v) = 2^{-1/3} Ai(2^{-1/3} (u + v)).
double goe_kernel(double u, double v);

/// Correction kernel E_beta = S_{-beta}^* chibar_0 (I - R) S_beta:
///   e^{beta (v - u)} int_0^inf [Ai(u+z+b2) Ai(v+z+b2)
///                               - e^{-2 beta z} Ai(u+z+b2) Ai(v-z+b2)] dz,
/// b2 = beta^2. The e^{+-(2/3) beta^3} prefactors of S_{+-beta} cancel and
/// are never formed. Throws std::domain_error for beta < 0.
double e_beta_kernel(double beta, double u, double v, const QuadConfig& cfg = {});

/// The two pieces of e_beta_kernel separately (first: non-reflected).
double e_beta_direct_term(double beta, double u, double v, const QuadConfig& cfg = {});
double e_beta_reflected_term(double beta, double u, double v, const QuadConfig& cfg = {});

/// E_{beta,x} = S^*_{-b} chibar_x (I - R e^{2x d}) S_b with b = beta + x / (2 beta).
/// Its kernel is e_beta_kernel(b, u - x, v - x). Requires beta > 0 unless
/// x == 0 (then it is e_beta_kernel).
double e_beta_shift_kernel(double beta, double x, double u, double v,
                           const QuadConfig& cfg = {});

/// Length of the inner z-integration window used for E-type kernels whose
/// smallest Airy argument (u + b^2) is `min_arg`.
double e_integration_length(double beta, double min_arg);

/// Raw kernel values X(r_i, c_j) = A(r_i + shift, c_j + shift)
///   + E_b(r_i + shift, c_j + shift), with optional omission of either part.
/// Rows and columns are arbitrary node lists; evaluated from Airy tables.
struct ShiftedXSpec {
  double b = 0.0;          // exponent parameter of the E part
  double shift = 0.0;      // common translation of both arguments
  bool include_goe = true;
  bool include_e = true;
};
Matrix x_kernel_values(const ShiftedXSpec& spec, const std::vector<double>& rows,
                       const std::vector<double>& cols, const QuadConfig& cfg = {});

/// Discretized operators on a grid (weighted Nystrom form).
DiscreteOperator goe_operator(const QuadGrid& grid);
DiscreteOperator e_beta_operator(double beta, const QuadGrid& grid, const QuadConfig& cfg = {});
DiscreteOperator e_beta_shift_operator(double beta, double x, const QuadGrid& grid,
                                       const QuadConfig& cfg = {});

KernelFn goe_kernel_fn();
KernelFn s_kernel_fn(double xparam);
KernelFn e_beta_kernel_fn(double beta, const QuadConfig& cfg = {});

/// Monte Carlo estimate and its standard error.
struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t paths = 0;
};

/// Brownian Monte Carlo of the hitting kernel: E[S_{-tau}(2 beta tau, v) 1{tau <= horizon}]
/// for a Brownian motion with diffusion coefficient 2 started at u > 0 and
/// tau its first passage below the line y -> 2 beta y. Euler steps of size
/// dt; a crossing inside a step is caught either at the endpoint or through
/// the Brownian-bridge crossing probability, and located by linear
/// interpolation. Paths are simulated in fixed batches whose RNG streams
/// derive from (seed, batch index), so results do not depend on `threads`.
///
/// The closed form it is checked against is e^{2 beta u} Ai(v + u).
/// Throws std::domain_error for u < 0 or beta <= 0, invalid_argument for
/// paths < 1 or dt <= 0.
McEstimate brownian_hypo_estimate(double beta, double u, double v, std::int64_t paths,
                                  double dt, double horizon, std::uint64_t seed,
                                  int threads = 1);

/// Same estimator for several v at once, sharing the simulated paths.
/// At u == 0 exactly the hitting time is zero and the closed form is returned
/// with zero standard error.
std::vector<McEstimate> brownian_hypo_estimates(double beta, double u,
                                                const std::vector<double>& vs,
                                                std::int64_t paths, double dt, double horizon,
                                                std::uint64_t seed, int threads = 1);

/// e^{2 beta u} Ai(v + u) for u > 0, S(u, v) = Ai(v - u) for u <= 0.
double hypo_closed_form(double beta, double u, double v);

}  // namespace softshock
