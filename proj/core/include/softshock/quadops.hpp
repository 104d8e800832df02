#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace softshock {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Gauss-Legendre nodes and weights on [lower, lower + length].
struct QuadGrid {
  double lower = 0.0;
  double length = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
  double upper() const { return lower + length; }
  bool same_as(const QuadGrid& other) const;
};

/// Order-n Gauss-Legendre rule mapped to [a, a + length].
/// Throws std::invalid_argument for n < 2 or length <= 0.
QuadGrid make_grid(double a, double length, int n);

/// Composite rule: panels of at most `panel_length`, each with `order` nodes.
QuadGrid make_composite_grid(double a, double length, double panel_length, int order);

/// Reference Gauss-Legendre rule on [-1, 1] (Newton on P_n, cached per order).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Kernel (u, v) -> real with a descriptive tag.
struct KernelFn {
  std::function<double(double, double)> eval;
  std::string tag;
};

/// Kernel sampled on a grid in the symmetric Nystrom form
/// M[i][j] = sqrt(w_i) k(u_i, u_j) sqrt(w_j), so that det(I - M)
/// approximates the Fredholm determinant on [a, a + L].
class DiscreteOperator {
 public:
  DiscreteOperator() = default;
  /// Wraps an already weighted matrix; throws if not square / size mismatch
  /// / non-finite.
  DiscreteOperator(QuadGrid grid, Matrix weighted);

  const QuadGrid& grid() const { return grid_; }
  const Matrix& matrix() const { return matrix_; }
  std::size_t size() const { return grid_.size(); }

  /// Kernel value recovered at node pair (i, j).
  double kernel_at(std::size_t i, std::size_t j) const;

  static DiscreteOperator zero(const QuadGrid& grid);
  /// The identity operator in weighted form (the projection onto the grid's
  /// interval): the identity matrix.
  static DiscreteOperator identity(const QuadGrid& grid);
  /// Multiplication operator f(u) on the grid (diagonal, no weights).
  static DiscreteOperator diagonal(const QuadGrid& grid, std::span<const double> values);

 private:
  QuadGrid grid_;
  Matrix matrix_;
};

/// Samples k on g. Throws std::runtime_error naming (u, v) if any value is
/// not finite.
DiscreteOperator discretize(const KernelFn& k, const QuadGrid& g);

/// Builds the weighted matrix from raw kernel values K(u_i, u_j).
DiscreteOperator from_kernel_values(const QuadGrid& g, const Matrix& values);

/// det(I - M).
double fredholm_det(const DiscreteOperator& op);
double fredholm_det(const Matrix& weighted);

/// Sum of singular values of the weighted matrix.
double trace_norm(const DiscreteOperator& op);
/// Largest singular value.
double operator_norm(const DiscreteOperator& op);

/// Kernel composition on the grid interval. Throws on grid mismatch.
DiscreteOperator compose(const DiscreteOperator& left, const DiscreteOperator& right);

/// Quadrature settings shared by every distribution computation.
struct QuadConfig {
  int nodes = 64;         // main grid order
  double length = 12.0;   // truncation length of L^2(a, infinity)
  double aux_panel = 1.0; // composite panel length for inner integrals
  int aux_order = 16;     // Gauss-Legendre order per inner panel
};

}  // namespace softshock
