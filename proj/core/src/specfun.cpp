#include "softshock/specfun.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace softshock {

namespace {

constexpr double kAnchorLo = -8.0;
constexpr double kAnchorHi = 8.0;
constexpr double kAnchorStep = 0.25;
constexpr int kAnchorCount = 65;  // (hi - lo) / step + 1

template <typename T>
void taylor_step(T x0, T y0, T dy0, T h, T& y, T& dy) {
  // Coefficients of y(x0 + h) = sum a_k h^k, from (x0 + h) y = y''.
  T a_prev2 = y0;                 // a_{k-2}
  T a_prev1 = dy0;                // a_{k-1}
  T a_prev0 = x0 * y0 / T(2);     // a_k, starting at k = 2 (a_{-1} = 0)
  T hp = h * h;                   // h^k
  y = y0 + dy0 * h;
  dy = dy0;
  T hk1 = h;                      // h^{k-1}
  int small_run = 0;
  for (int k = 2; k < 80; ++k) {
    const T term = a_prev0 * hp;
    const T dterm = T(k) * a_prev0 * hk1;
    y += term;
    dy += dterm;
    const T scale = std::abs(y) + std::abs(dy) + T(1e-300);
    if (std::abs(term) + std::abs(dterm) < T(1e-19) * scale) {
      if (++small_run >= 3) break;
    } else {
      small_run = 0;
    }
    // a_{k+1} = (x0 a_{k-1} + a_{k-2}) / ((k+1) k)
    const T next = (x0 * a_prev1 + a_prev2) / (T(k + 1) * T(k));
    a_prev2 = a_prev1;
    a_prev1 = a_prev0;
    a_prev0 = next;
    hk1 = hp;
    hp *= h;
  }
}

struct Anchor {
  double value;
  double derivative;
};

struct AnchorTable {
  std::array<Anchor, kAnchorCount> anchors{};

  AnchorTable() {
    using LD = long double;
    const int zero_index = static_cast<int>(-kAnchorLo / kAnchorStep);
    // Oscillatory side: march from the exact values at the origin.
    LD y = kAiryAtZero;
    LD dy = kAiryPrimeAtZero;
    anchors[zero_index] = {static_cast<double>(y), static_cast<double>(dy)};
    for (int i = zero_index - 1; i >= 0; --i) {
      const LD x0 = LD(kAnchorLo) + LD(kAnchorStep) * LD(i + 1);
      LD ny = 0, ndy = 0;
      taylor_step<LD>(x0, y, dy, -LD(kAnchorStep), ny, ndy);
      y = ny;
      dy = ndy;
      anchors[i] = {static_cast<double>(y), static_cast<double>(dy)};
    }
    // Decaying side: march backwards from the asymptotic values at +8, where
    // Ai is the dominant solution.
    const AiryValue top = detail::airy_asymptotic(kAnchorHi);
    const LD s = std::exp(LD(top.log_scale));
    y = LD(top.value) * s;
    dy = LD(top.derivative) * s;
    anchors[kAnchorCount - 1] = {static_cast<double>(y), static_cast<double>(dy)};
    for (int i = kAnchorCount - 2; i > zero_index; --i) {
      const LD x0 = LD(kAnchorLo) + LD(kAnchorStep) * LD(i + 1);
      LD ny = 0, ndy = 0;
      taylor_step<LD>(x0, y, dy, -LD(kAnchorStep), ny, ndy);
      y = ny;
      dy = ndy;
      anchors[i] = {static_cast<double>(y), static_cast<double>(dy)};
    }
  }
};

const AnchorTable& anchor_table() {
  static const AnchorTable table;
  return table;
}

}  // namespace

namespace detail {

void airy_taylor_step(double x0, double y0, double dy0, double h, double& y, double& dy) {
  taylor_step<double>(x0, y0, dy0, h, y, dy);
}

AiryValue airy_asymptotic(double x) {
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  const double z = std::abs(x);
  const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
  const double z14 = std::sqrt(std::sqrt(z));

  // u_k, v_k: coefficients of the standard Airy asymptotic series.
  constexpr int kMaxTerms = 60;
  std::array<double, kMaxTerms> u{};
  std::array<double, kMaxTerms> v{};
  u[0] = 1.0;
  v[0] = 1.0;
  for (int k = 1; k < kMaxTerms; ++k) {
    const double kk = k;
    u[k] = u[k - 1] * (6 * kk - 5) * (6 * kk - 3) * (6 * kk - 1) / ((2 * kk - 1) * 216.0 * kk);
    v[k] = -(6 * kk + 1) / (6 * kk - 1) * u[k];
  }

  AiryValue out;
  if (x > 0) {
    double su = 0.0, sv = 0.0;
    double zp = 1.0;
    double last = INFINITY;
    for (int k = 0; k < kMaxTerms; ++k) {
      const double tu = u[k] / zp;
      const double tv = v[k] / zp;
      const double mag = std::abs(tu) + std::abs(tv);
      if (mag > last) break;  // optimal truncation
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      su += sign * tu;
      sv += sign * tv;
      last = mag;
      if (mag < 1e-17) break;
      zp *= zeta;
    }
    out.value = 0.5 * inv_sqrt_pi / z14 * su;
    out.derivative = -0.5 * inv_sqrt_pi * z14 * sv;
    out.log_scale = -zeta;
    return out;
  }

  // Oscillatory side.
  double pu = 0.0, qu = 0.0, pv = 0.0, qv = 0.0;
  double last = INFINITY;
  double zp = 1.0;
  for (int k = 0; k + 1 < kMaxTerms; k += 2) {
    const double te_u = u[k] / zp;
    const double te_v = v[k] / zp;
    const double to_u = u[k + 1] / (zp * zeta);
    const double to_v = v[k + 1] / (zp * zeta);
    const double mag = std::abs(te_u) + std::abs(te_v) + std::abs(to_u) + std::abs(to_v);
    if (mag > last) break;
    const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
    pu += sign * te_u;
    qu += sign * to_u;
    pv += sign * te_v;
    qv += sign * to_v;
    last = mag;
    if (mag < 1e-17) break;
    zp *= zeta * zeta;
  }
  const double theta = zeta - 0.25 * std::numbers::pi;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  out.value = inv_sqrt_pi / z14 * (c * pu + s * qu);
  out.derivative = inv_sqrt_pi * z14 * (s * pv - c * qv);
  out.log_scale = 0.0;
  return out;
}

}  // namespace detail

AiryValue airy_ai(double x) {
  if (!std::isfinite(x)) {
    throw std::domain_error("airy_ai: non-finite argument " + std::to_string(x));
  }
  if (x > kAnchorHi || x < kAnchorLo) {
    return detail::airy_asymptotic(x);
  }
  const auto& table = anchor_table();
  int idx = static_cast<int>(std::lround((x - kAnchorLo) / kAnchorStep));
  if (idx < 0) idx = 0;
  if (idx >= kAnchorCount) idx = kAnchorCount - 1;
  const double x0 = kAnchorLo + kAnchorStep * idx;
  const Anchor& a = table.anchors[idx];
  AiryValue out;
  taylor_step<double>(x0, a.value, a.derivative, x - x0, out.value, out.derivative);
  return out;
}

double airy_ai_arg_shifted(double x, double shift) {
  if (!std::isfinite(x) || !std::isfinite(shift)) {
    throw std::domain_error("airy_ai_arg_shifted: non-finite argument");
  }
  return airy_ai(x + shift).true_value();
}

}  // namespace softshock
