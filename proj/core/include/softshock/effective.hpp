#pragma once

#include <string>

#include "softshock/kernels.hpp"
#include "softshock/quadops.hpp"

namespace softshock {

/// How the soft-shock determinant is evaluated.
///
/// Direct: the conjugated hitting kernel
///   K(u, v) = e^{y (v - u)} int_0^inf [ (1 - e^{4 beta s}) Ai(U + s) Ai(V + s)
///             + e^{2 (beta + y) s} Ai(U - s) Ai(V + s)
///             + e^{2 (beta - y) s} Ai(U + s) Ai(V - s) ] ds,
/// with y = x / (2 beta), U = u + beta^2 + y^2, on a lengthened interval.
/// Its three terms cancel to relative size e^{-(4/3) beta^3}, so it is only
/// used for small beta.
///
/// Factored: det = det(I - X+) det(I - X-) det(I + C), where
///   X-(u, v) = A(u - x, v - x) + E_{beta + y}(u - x, v - x),
///   X+(u, v) = A(u + x, v + x) + E_{beta - y}(u + x, v + x),
///   C = (I - X-)^{-1} D (I - X+^T)^{-1} G,  D(u) = e^{-2 beta (u - a)},
///   G(u, v) = int_{w < a} e^{2 beta (w - a)} X+(w, u) X-(w, v) dw.
/// Every factor stays O(1) for large beta; needs beta > 0.
enum class DetRoute { Auto, Direct, Factored };

std::string to_string(DetRoute route);

struct SoftShockDet {
  double value = 0.0;        // determinant clamped to [0, 1]
  double raw = 0.0;          // unclamped determinant
  DetRoute route = DetRoute::Auto;
  double det_plus = 1.0;     // det(I - X+)   (factored route only)
  double det_minus = 1.0;    // det(I - X-)   (factored route only)
  double det_correction = 1.0;  // det(I + C) (factored route only)
  int nodes = 0;             // main grid size actually used
  double length = 0.0;       // truncation length actually used
};

/// beta at or below which Auto picks the direct route.
inline constexpr double kDirectRouteMaxBeta = 1.5;

/// Options of the factored route.
struct FactoredOptions {
  /// The w-integral below a is cut where e^{2 beta (w - a)} = e^{-cutoff}.
  double cutoff = 36.0;
};

/// P(h(1, x / (2 beta); 2 beta |y|) - beta^2 <= a) as a Fredholm determinant.
/// Throws std::domain_error for beta < 0 or (beta == 0, x != 0), and for the
/// factored route at beta == 0.
SoftShockDet softshock_determinant(const SoftShockParams& p, const QuadConfig& cfg = {},
                                   DetRoute route = DetRoute::Auto,
                                   const FactoredOptions& opts = {});

/// The direct-route kernel on `grid` (no lengthening), i.e. the kernel of
/// T+^* + T- - T+^* T- with T(u, v) = e^{beta (u - v)} X(u, v), the factored
/// product of the hitting operator. det(I - result) is the soft-shock CDF up
/// to truncation. Accurate for beta <~ 1.5 only.
DiscreteOperator effective_product_kernel(double beta, double x, const QuadGrid& grid,
                                          const QuadConfig& cfg = {});

/// Truncation length the direct route needs so that the dropped tail of
/// (a, infinity) is negligible.
double direct_route_length(double beta, double x, double a, double requested);

/// det(I - X+) det(I - X-) on (a, a + L); at x = 0 this is det(I - A - E_beta)^2.
double factored_approximation(double beta, double x, double a, const QuadConfig& cfg = {});

/// Trace norm of E_beta restricted to (a, a + L).
double e_beta_trace_norm(double beta, double a, const QuadConfig& cfg = {});

}  // namespace softshock
