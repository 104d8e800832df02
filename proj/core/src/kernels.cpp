#include "softshock/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "softshock/specfun.hpp"

namespace softshock {

namespace {

const double kCbrtHalf = std::cbrt(0.5);

// m * exp(ls + extra), skipping hopeless underflow.
inline double scaled(double m, double ls, double extra) {
  const double e = ls + extra;
  if (e < -740.0 || m == 0.0) return 0.0;
  return m * std::exp(e);
}

struct ETerms {
  double direct = 0.0;
  double reflected = 0.0;
};

ETerms e_terms(double b, double u, double v, const QuadConfig& cfg) {
  const double b2 = b * b;
  const double z_len = e_integration_length(b, std::min(u, v) + b2);
  const QuadGrid zg = make_composite_grid(0.0, z_len, cfg.aux_panel, cfg.aux_order);
  const double tilt = b * (v - u);
  ETerms out;
  for (std::size_t k = 0; k < zg.size(); ++k) {
    const double z = zg.nodes[k];
    const AiryValue p = airy_ai(u + z + b2);
    const AiryValue q = airy_ai(v + z + b2);
    const AiryValue r = airy_ai(v - z + b2);
    out.direct += zg.weights[k] * scaled(p.value * q.value, p.log_scale + q.log_scale, tilt);
    out.reflected +=
        zg.weights[k] * scaled(p.value * r.value, p.log_scale + r.log_scale, tilt - 2.0 * b * z);
  }
  return out;
}

void check_beta(double beta, const char* who) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    std::ostringstream msg;
    msg << who << ": beta must be a finite non-negative number, got " << beta;
    throw std::domain_error(msg.str());
  }
}

double shifted_b(double beta, double x, const char* who) {
  if (!std::isfinite(x)) throw std::domain_error(std::string(who) + ": non-finite x");
  check_beta(beta, who);
  if (x == 0.0) return beta;
  if (beta == 0.0) {
    throw std::domain_error(std::string(who) + ": x != 0 requires beta > 0");
  }
  return beta + x / (2.0 * beta);
}

}  // namespace

double s_kernel(double xparam, double u, double v) {
  const AiryValue ai = airy_ai(v - u + xparam * xparam);
  const double lin = 2.0 / 3.0 * xparam * xparam * xparam + xparam * (v - u);
  return scaled(ai.value, ai.log_scale, lin);
}

double goe_kernel(double u, double v) {
  return kCbrtHalf * airy_ai(kCbrtHalf * (u + v)).true_value();
}

double e_integration_length(double beta, double min_arg) {
  double z = std::max(12.0 + 6.0 / std::max(std::abs(beta), 1.0), 14.0 - min_arg);
  // Negative exponent parameters make the reflected weight grow; extend the
  // window until the Airy decay dominates it.
  const double growth = 2.0 * std::max(-beta, 0.0);
  auto decay = [&](double zz) {
    const double arg = std::max(min_arg + zz, 0.0);
    return 2.0 / 3.0 * arg * std::sqrt(arg) - growth * zz;
  };
  while (decay(z) < 40.0) z += 1.0;
  return z;
}

double e_beta_direct_term(double beta, double u, double v, const QuadConfig& cfg) {
  check_beta(beta, "e_beta_direct_term");
  return e_terms(beta, u, v, cfg).direct;
}

double e_beta_reflected_term(double beta, double u, double v, const QuadConfig& cfg) {
  check_beta(beta, "e_beta_reflected_term");
  return e_terms(beta, u, v, cfg).reflected;
}

double e_beta_kernel(double beta, double u, double v, const QuadConfig& cfg) {
  check_beta(beta, "e_beta_kernel");
  const ETerms t = e_terms(beta, u, v, cfg);
  return t.direct - t.reflected;
}

double e_beta_shift_kernel(double beta, double x, double u, double v, const QuadConfig& cfg) {
  const double b = shifted_b(beta, x, "e_beta_shift_kernel");
  const ETerms t = e_terms(b, u - x, v - x, cfg);
  return t.direct - t.reflected;
}

Matrix x_kernel_values(const ShiftedXSpec& spec, const std::vector<double>& rows,
                       const std::vector<double>& cols, const QuadConfig& cfg) {
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Matrix out = Matrix::Zero(nr, nc);
  if (nr == 0 || nc == 0) return out;

  if (spec.include_goe) {
    for (Eigen::Index i = 0; i < nr; ++i) {
      for (Eigen::Index j = 0; j < nc; ++j) {
        out(i, j) = goe_kernel(rows[i] + spec.shift, cols[j] + spec.shift);
      }
    }
  }
  if (!spec.include_e) return out;

  const double b = spec.b;
  const double b2 = b * b;
  const double lo = std::min(*std::min_element(rows.begin(), rows.end()),
                             *std::min_element(cols.begin(), cols.end())) +
                    spec.shift;
  const QuadGrid zg =
      make_composite_grid(0.0, e_integration_length(b, lo + b2), cfg.aux_panel, cfg.aux_order);
  const auto nk = static_cast<Eigen::Index>(zg.size());

  // Mantissas and log scales of Ai(p + z + b^2), Ai(q + z + b^2), Ai(q - z + b^2).
  Matrix pm(nr, nk), pl(nr, nk), qm(nc, nk), ql(nc, nk), tm(nc, nk), tl(nc, nk);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const double p = rows[i] + spec.shift;
    for (Eigen::Index k = 0; k < nk; ++k) {
      const AiryValue a = airy_ai(p + zg.nodes[k] + b2);
      pm(i, k) = a.value;
      pl(i, k) = a.log_scale - b * p;
    }
  }
  for (Eigen::Index j = 0; j < nc; ++j) {
    const double q = cols[j] + spec.shift;
    for (Eigen::Index k = 0; k < nk; ++k) {
      const double z = zg.nodes[k];
      const AiryValue a = airy_ai(q + z + b2);
      const AiryValue c = airy_ai(q - z + b2);
      qm(j, k) = a.value * zg.weights[k];
      ql(j, k) = a.log_scale + b * q;
      tm(j, k) = c.value * zg.weights[k];
      tl(j, k) = c.log_scale + b * q - 2.0 * b * z;
    }
  }
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nc; ++j) {
      double acc = 0.0;
      for (Eigen::Index k = 0; k < nk; ++k) {
        acc += scaled(pm(i, k) * qm(j, k), pl(i, k), ql(j, k));
        acc -= scaled(pm(i, k) * tm(j, k), pl(i, k), tl(j, k));
      }
      out(i, j) += acc;
    }
  }
  return out;
}

DiscreteOperator goe_operator(const QuadGrid& grid) {
  ShiftedXSpec spec;
  spec.include_e = false;
  return from_kernel_values(grid, x_kernel_values(spec, grid.nodes, grid.nodes));
}

DiscreteOperator e_beta_operator(double beta, const QuadGrid& grid, const QuadConfig& cfg) {
  check_beta(beta, "e_beta_operator");
  ShiftedXSpec spec;
  spec.b = beta;
  spec.include_goe = false;
  return from_kernel_values(grid, x_kernel_values(spec, grid.nodes, grid.nodes, cfg));
}

DiscreteOperator e_beta_shift_operator(double beta, double x, const QuadGrid& grid,
                                       const QuadConfig& cfg) {
  ShiftedXSpec spec;
  spec.b = shifted_b(beta, x, "e_beta_shift_operator");
  spec.shift = -x;
  spec.include_goe = false;
  return from_kernel_values(grid, x_kernel_values(spec, grid.nodes, grid.nodes, cfg));
}

KernelFn goe_kernel_fn() { return {[](double u, double v) { return goe_kernel(u, v); }, "A"}; }

KernelFn s_kernel_fn(double xparam) {
  std::ostringstream tag;
  tag << "S_" << xparam;
  return {[xparam](double u, double v) { return s_kernel(xparam, u, v); }, tag.str()};
}

KernelFn e_beta_kernel_fn(double beta, const QuadConfig& cfg) {
  check_beta(beta, "e_beta_kernel_fn");
  std::ostringstream tag;
  tag << "E_" << beta;
  return {[beta, cfg](double u, double v) { return e_beta_kernel(beta, u, v, cfg); }, tag.str()};
}

double hypo_closed_form(double beta, double u, double v) {
  if (u <= 0.0) return airy_ai(v - u).true_value();
  const AiryValue a = airy_ai(v + u);
  return scaled(a.value, a.log_scale, 2.0 * beta * u);
}

}  // namespace softshock
