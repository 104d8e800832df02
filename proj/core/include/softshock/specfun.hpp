#pragma once

#include <cmath>

namespace softshock {

/// Airy function value and derivative in scaled form.
///
/// The true values are `value * exp(log_scale)` and
/// `derivative * exp(log_scale)`. For x <= 8 the scale is zero; beyond that
/// the decaying factor exp(-(2/3) x^{3/2}) is carried separately so that
/// arbitrarily large arguments neither underflow nor lose relative accuracy.
struct AiryValue {
  double value = 0.0;
  double derivative = 0.0;
  double log_scale = 0.0;

  double true_value() const { return value * std::exp(log_scale); }
  double true_derivative() const { return derivative * std::exp(log_scale); }
  /// log|Ai(x)|, -inf at a zero.
  double log_abs() const { return std::log(std::abs(value)) + log_scale; }
};

/// Ai(x) and Ai'(x) on the real line.
///
/// |x| > 8 uses the classical asymptotic expansions (exponential form for
/// x > 8, oscillatory form for x < -8). Inside [-8, 8] the ODE Ai'' = x Ai is
/// integrated by exact Taylor steps from a table of anchors spaced 1/4 apart;
/// the anchors are generated once, from the closed-form values at 0 towards
/// -8 and from the asymptotic values at +8 towards 0 (the stable direction in
/// both cases).
///
/// Throws std::domain_error for non-finite input.
AiryValue airy_ai(double x);

/// Ai(x + shift) as a plain double; underflows gracefully to 0.
double airy_ai_arg_shifted(double x, double shift);

/// Ai(0) = 3^{-2/3} / Gamma(2/3).
inline constexpr double kAiryAtZero = 0.35502805388781723926;
/// Ai'(0) = -3^{-1/3} / Gamma(1/3).
inline constexpr double kAiryPrimeAtZero = -0.25881940379280679840;

namespace detail {
/// Asymptotic expansion, only meaningful for |x| >~ 7.
AiryValue airy_asymptotic(double x);
/// Taylor-series continuation of (y, y') from x0 to x0 + h for y'' = x y.
void airy_taylor_step(double x0, double y0, double dy0, double h, double& y, double& dy);
}  // namespace detail

}  // namespace softshock
