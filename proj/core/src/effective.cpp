#include "softshock/effective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "softshock/specfun.hpp"

namespace softshock {

namespace {

constexpr int kMaxNodes = 480;

void validate(const SoftShockParams& p) {
  if (!std::isfinite(p.beta) || !std::isfinite(p.x) || !std::isfinite(p.a)) {
    throw std::domain_error("softshock: parameters must be finite");
  }
  if (p.beta < 0.0) {
    std::ostringstream msg;
    msg << "softshock: beta must be >= 0, got " << p.beta;
    throw std::domain_error(msg.str());
  }
  if (p.beta == 0.0 && p.x != 0.0) {
    throw std::domain_error("softshock: x != 0 requires beta > 0");
  }
}

double heat_shift(double beta, double x) { return beta > 0.0 ? x / (2.0 * beta) : 0.0; }

int scaled_nodes(int n, double length, double requested) {
  const int m = static_cast<int>(std::ceil(n * length / requested - 1e-9));
  return std::clamp(m, n, kMaxNodes);
}

// Integration length in s for the direct kernel: beyond it every weighted
// Airy product is below e^{-40} and still decreasing.
double direct_s_length(double beta, double y, double min_arg) {
  const double c = beta + std::abs(y);
  auto f_refl = [&](double s) {
    const double g = std::max(min_arg + s, 0.0);
    return 4.0 * beta * s - 4.0 / 3.0 * g * std::sqrt(g);
  };
  auto f_cross = [&](double s) {
    const double g = std::max(min_arg + s, 0.0);
    return 2.0 * c * s - 2.0 / 3.0 * g * std::sqrt(g);
  };
  double z = std::max(4.0, 14.0 - min_arg);
  for (;;) {
    const bool low = f_refl(z) <= -40.0 && f_cross(z) <= -40.0;
    const bool falling = f_refl(z + 0.5) <= f_refl(z) && f_cross(z + 0.5) <= f_cross(z);
    if (low && falling) return z;
    z += 0.5;
  }
}

// Direct kernel values on the given nodes, without the e^{y (v - u)}
// conjugation factor.
Matrix direct_kernel_values(double beta, double y, const std::vector<double>& nodes,
                            const QuadConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  const double shift = beta * beta + y * y;
  const double min_arg = *std::min_element(nodes.begin(), nodes.end()) + shift;
  const QuadGrid sg =
      make_composite_grid(0.0, direct_s_length(beta, y, min_arg), cfg.aux_panel, cfg.aux_order);
  const auto k = static_cast<Eigen::Index>(sg.size());
  Matrix plus(n, k), minus(n, k);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double ut = nodes[i] + shift;
    for (Eigen::Index j = 0; j < k; ++j) {
      plus(i, j) = airy_ai(ut + sg.nodes[j]).true_value();
      minus(i, j) = airy_ai(ut - sg.nodes[j]).true_value();
    }
  }
  Vector w1(k), w2(k), w3(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double s = sg.nodes[j];
    const double w = sg.weights[j];
    w1(j) = -w * std::expm1(4.0 * beta * s);
    w2(j) = w * std::exp(2.0 * (beta + y) * s);
    w3(j) = w * std::exp(2.0 * (beta - y) * s);
  }
  Matrix out = plus * w1.asDiagonal() * plus.transpose();
  out.noalias() += minus * w2.asDiagonal() * plus.transpose();
  out.noalias() += plus * w3.asDiagonal() * minus.transpose();
  return out;
}

Vector sqrt_weights(const QuadGrid& g) {
  Vector sw(static_cast<Eigen::Index>(g.size()));
  for (Eigen::Index i = 0; i < sw.size(); ++i) sw(i) = std::sqrt(g.weights[i]);
  return sw;
}

SoftShockDet direct_route(const SoftShockParams& p, const QuadConfig& cfg) {
  const double y = heat_shift(p.beta, p.x);
  const double length = direct_route_length(p.beta, p.x, p.a, cfg.length);
  const int n = scaled_nodes(cfg.nodes, length, cfg.length);
  const QuadGrid g = make_grid(p.a, length, n);
  const Vector sw = sqrt_weights(g);
  const Matrix k = sw.asDiagonal() * direct_kernel_values(p.beta, y, g.nodes, cfg) *
                   sw.asDiagonal();
  SoftShockDet out;
  out.route = DetRoute::Direct;
  out.raw = fredholm_det(k);
  out.nodes = n;
  out.length = length;
  return out;
}

struct FactoredParts {
  double det_plus = 1.0;
  double det_minus = 1.0;
  double det_correction = 1.0;
  int nodes = 0;
  double length = 0.0;
};

FactoredParts factored_parts(const SoftShockParams& p, const QuadConfig& cfg,
                             const FactoredOptions& opts, bool with_correction) {
  if (with_correction && !(p.beta > 0.0)) {
    throw std::domain_error("softshock: the factored route needs beta > 0");
  }
  const double y = heat_shift(p.beta, p.x);
  const double length = cfg.length + std::abs(p.x);
  const int n = scaled_nodes(cfg.nodes, length, cfg.length);
  const QuadGrid g = make_grid(p.a, length, n);
  const Vector sw = sqrt_weights(g);

  const ShiftedXSpec minus_spec{p.beta + y, -p.x, true, true};
  const ShiftedXSpec plus_spec{p.beta - y, p.x, true, true};
  const Matrix xm = sw.asDiagonal() * x_kernel_values(minus_spec, g.nodes, g.nodes, cfg) *
                    sw.asDiagonal();
  const Matrix xp = sw.asDiagonal() * x_kernel_values(plus_spec, g.nodes, g.nodes, cfg) *
                    sw.asDiagonal();
  const Matrix id = Matrix::Identity(n, n);

  FactoredParts out;
  out.nodes = n;
  out.length = length;
  const Eigen::PartialPivLU<Matrix> lu_minus(id - xm);
  const Eigen::PartialPivLU<Matrix> lu_plus_t(id - xp.transpose());
  out.det_minus = lu_minus.determinant();
  out.det_plus = lu_plus_t.determinant();
  if (!with_correction) return out;

  const double width = opts.cutoff / (2.0 * p.beta);
  const QuadGrid wg = make_composite_grid(p.a - width, width, cfg.aux_panel, cfg.aux_order);
  const Matrix rm = x_kernel_values(minus_spec, wg.nodes, g.nodes, cfg);
  const Matrix rp = x_kernel_values(plus_spec, wg.nodes, g.nodes, cfg);
  Vector ww(static_cast<Eigen::Index>(wg.size()));
  for (Eigen::Index k = 0; k < ww.size(); ++k) {
    ww(k) = wg.weights[k] * std::exp(2.0 * p.beta * (wg.nodes[k] - p.a));
  }
  const Matrix gmat =
      sw.asDiagonal() * (rp.transpose() * ww.asDiagonal() * rm) * sw.asDiagonal();
  Vector d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(-2.0 * p.beta * (g.nodes[i] - p.a));
  const Matrix c = lu_minus.solve(d.asDiagonal() * lu_plus_t.solve(gmat));
  out.det_correction = (id + c).partialPivLu().determinant();
  return out;
}

}  // namespace

std::string to_string(DetRoute route) {
  switch (route) {
    case DetRoute::Auto:
      return "auto";
    case DetRoute::Direct:
      return "direct";
    case DetRoute::Factored:
      return "factored";
  }
  return "unknown";
}

double direct_route_length(double beta, double x, double a, double requested) {
  const double y = heat_shift(beta, x);
  const double c = beta + std::abs(y);
  // Rows of the kernel at U behave like exp(2 c U - (2/3) U^{3/2}).
  auto g = [c](double u) { return 2.0 * c * u - 2.0 / 3.0 * u * std::sqrt(u); };
  double u = std::max(4.0 * c * c, 1.0);
  while (g(u) > -36.0) u += 0.25;
  return std::max(requested, u - beta * beta - y * y - a);
}

SoftShockDet softshock_determinant(const SoftShockParams& p, const QuadConfig& cfg,
                                   DetRoute route, const FactoredOptions& opts) {
  validate(p);
  if (route == DetRoute::Auto) {
    route = p.beta <= kDirectRouteMaxBeta ? DetRoute::Direct : DetRoute::Factored;
  }
  SoftShockDet out;
  if (route == DetRoute::Direct) {
    out = direct_route(p, cfg);
  } else {
    const FactoredParts parts = factored_parts(p, cfg, opts, true);
    out.route = DetRoute::Factored;
    out.det_plus = parts.det_plus;
    out.det_minus = parts.det_minus;
    out.det_correction = parts.det_correction;
    out.raw = parts.det_plus * parts.det_minus * parts.det_correction;
    out.nodes = parts.nodes;
    out.length = parts.length;
  }
  if (!std::isfinite(out.raw)) {
    std::ostringstream msg;
    msg << "softshock: non-finite determinant at beta=" << p.beta << " x=" << p.x
        << " a=" << p.a;
    throw std::runtime_error(msg.str());
  }
  out.value = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

DiscreteOperator effective_product_kernel(double beta, double x, const QuadGrid& grid,
                                          const QuadConfig& cfg) {
  validate({beta, x, grid.lower});
  const double y = heat_shift(beta, x);
  Matrix k = direct_kernel_values(beta, y, grid.nodes, cfg);
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      k(i, j) *= std::exp(y * (grid.nodes[j] - grid.nodes[i]));
    }
  }
  return from_kernel_values(grid, k);
}

double factored_approximation(double beta, double x, double a, const QuadConfig& cfg) {
  const SoftShockParams p{beta, x, a};
  validate(p);
  const FactoredParts parts = factored_parts(p, cfg, {}, false);
  return parts.det_plus * parts.det_minus;
}

double e_beta_trace_norm(double beta, double a, const QuadConfig& cfg) {
  return trace_norm(e_beta_operator(beta, make_grid(a, cfg.length, cfg.nodes), cfg));
}

}  // namespace softshock
