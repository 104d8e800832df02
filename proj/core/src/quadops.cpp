#include "softshock/quadops.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace softshock {

namespace {

struct ReferenceRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

ReferenceRule compute_rule(int n) {
  // Newton iteration on P_n from the Tricomi initial guesses.
  ReferenceRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    long double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      const long double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    {
      long double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
    }
    const long double w = 2 / ((1 - x * x) * dp * dp);
    // ascending order
    rule.nodes[i] = -static_cast<double>(x);
    rule.nodes[n - 1 - i] = static_cast<double>(x);
    rule.weights[i] = static_cast<double>(w);
    rule.weights[n - 1 - i] = static_cast<double>(w);
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

const ReferenceRule& reference_rule(int n) {
  static std::mutex mu;
  static std::map<int, ReferenceRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

}  // namespace

bool QuadGrid::same_as(const QuadGrid& other) const {
  return lower == other.lower && length == other.length && nodes == other.nodes &&
         weights == other.weights;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  const auto& rule = reference_rule(n);
  nodes = rule.nodes;
  weights = rule.weights;
}

QuadGrid make_grid(double a, double length, int n) {
  if (n < 2) throw std::invalid_argument("make_grid: need at least 2 nodes");
  if (!(length > 0) || !std::isfinite(length) || !std::isfinite(a)) {
    throw std::invalid_argument("make_grid: length must be positive and finite");
  }
  const auto& rule = reference_rule(n);
  QuadGrid g;
  g.lower = a;
  g.length = length;
  g.nodes.resize(n);
  g.weights.resize(n);
  const double half = 0.5 * length;
  for (int i = 0; i < n; ++i) {
    g.nodes[i] = a + half * (rule.nodes[i] + 1.0);
    g.weights[i] = half * rule.weights[i];
  }
  return g;
}

QuadGrid make_composite_grid(double a, double length, double panel_length, int order) {
  if (!(panel_length > 0) || order < 1 || !(length > 0)) {
    throw std::invalid_argument("make_composite_grid: bad panel settings");
  }
  const int panels = std::max(1, static_cast<int>(std::ceil(length / panel_length - 1e-12)));
  const double h = length / panels;
  const auto& rule = reference_rule(order);
  QuadGrid g;
  g.lower = a;
  g.length = length;
  g.nodes.reserve(static_cast<std::size_t>(panels) * order);
  g.weights.reserve(static_cast<std::size_t>(panels) * order);
  for (int p = 0; p < panels; ++p) {
    const double left = a + p * h;
    for (int i = 0; i < order; ++i) {
      g.nodes.push_back(left + 0.5 * h * (rule.nodes[i] + 1.0));
      g.weights.push_back(0.5 * h * rule.weights[i]);
    }
  }
  return g;
}

DiscreteOperator::DiscreteOperator(QuadGrid grid, Matrix weighted)
    : grid_(std::move(grid)), matrix_(std::move(weighted)) {
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw std::invalid_argument("DiscreteOperator: matrix dimension does not match grid");
  }
  if (!matrix_.allFinite()) {
    throw std::runtime_error("DiscreteOperator: non-finite matrix entry");
  }
}

double DiscreteOperator::kernel_at(std::size_t i, std::size_t j) const {
  return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
         std::sqrt(grid_.weights[i] * grid_.weights[j]);
}

DiscreteOperator DiscreteOperator::zero(const QuadGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return DiscreteOperator(grid, Matrix::Zero(n, n));
}

DiscreteOperator DiscreteOperator::identity(const QuadGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  return DiscreteOperator(grid, Matrix::Identity(n, n));
}

DiscreteOperator DiscreteOperator::diagonal(const QuadGrid& grid, std::span<const double> values) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("DiscreteOperator::diagonal: size mismatch");
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, i) = values[static_cast<std::size_t>(i)];
  return DiscreteOperator(grid, std::move(m));
}

DiscreteOperator discretize(const KernelFn& k, const QuadGrid& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = g.nodes[i];
    const double wi = std::sqrt(g.weights[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double v = g.nodes[j];
      const double val = k.eval(u, v);
      if (!std::isfinite(val)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "discretize(" << k.tag << "): non-finite kernel value at (u, v) = (" << u << ", "
            << v << ")";
        throw std::runtime_error(msg.str());
      }
      m(i, j) = wi * val * std::sqrt(g.weights[j]);
    }
  }
  return DiscreteOperator(g, std::move(m));
}

DiscreteOperator from_kernel_values(const QuadGrid& g, const Matrix& values) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (values.rows() != n || values.cols() != n) {
    throw std::invalid_argument("from_kernel_values: dimension mismatch");
  }
  Vector sw(n);
  for (Eigen::Index i = 0; i < n; ++i) sw(i) = std::sqrt(g.weights[i]);
  Matrix m = sw.asDiagonal() * values * sw.asDiagonal();
  return DiscreteOperator(g, std::move(m));
}

double fredholm_det(const Matrix& weighted) {
  const auto n = weighted.rows();
  Matrix a = Matrix::Identity(n, n) - weighted;
  return a.partialPivLu().determinant();
}

double fredholm_det(const DiscreteOperator& op) { return fredholm_det(op.matrix()); }

double trace_norm(const DiscreteOperator& op) {
  Eigen::BDCSVD<Matrix> svd(op.matrix());
  return svd.singularValues().sum();
}

double operator_norm(const DiscreteOperator& op) {
  if (op.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(op.matrix());
  return svd.singularValues()(0);
}

DiscreteOperator compose(const DiscreteOperator& left, const DiscreteOperator& right) {
  if (!left.grid().same_as(right.grid())) {
    throw std::invalid_argument("compose: operators live on different grids");
  }
  return DiscreteOperator(left.grid(), left.matrix() * right.matrix());
}

}  // namespace softshock
