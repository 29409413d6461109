#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "wavebound/geometry.hpp"

namespace wavebound {

enum class WallCondition { Dirichlet, Neumann };

/// Condition on the bottom (y = 0) and top (y = d) walls as a function of x.
/// The artificial ends x = +-L are always Dirichlet.
struct WallLayout {
  std::function<WallCondition(double)> bottom;
  std::function<WallCondition(double)> top;
};

WallLayout wall_layout(ModelKind model, const Geometry& geometry);

/// Cell-centered grid on [-L, L] x [0, d]. Cell faces are the grid lines;
/// boundary conditions switch only on faces.
struct FdmGrid {
  double half_length = 0.0;  ///< L
  double width = 1.0;        ///< d
  int nx = 0;
  int ny = 0;

  double hx() const noexcept { return 2.0 * half_length / nx; }
  double hy() const noexcept { return width / ny; }
  double x_center(int i) const noexcept { return -half_length + (i + 0.5) * hx(); }
  double y_center(int j) const noexcept { return (j + 0.5) * hy(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * ny; }
  /// Unknown ordering: y fastest.
  Eigen::Index index(int i, int j) const noexcept { return static_cast<Eigen::Index>(i) * ny + j; }
};

/// Spacings close to `h` with delta / hx, L / hx and d / hy all integers.
/// The half length is rounded up to a whole number of cells.
FdmGrid make_grid(const Geometry& geometry, double h, double half_length);

/// Default truncation L = delta + 12 d.
double default_half_length(const Geometry& geometry);

/// Five-point discretization of -Laplace. Neumann walls use the mirror ghost
/// u_ghost = u, Dirichlet walls the antisymmetric ghost u_ghost = -u, so the
/// matrix is exactly symmetric.
Eigen::SparseMatrix<double> build_operator(const WallLayout& walls, const FdmGrid& grid);

/// Model operator; throws std::invalid_argument when +-delta is not a cell face.
Eigen::SparseMatrix<double> build_operator(ModelKind model, const Geometry& geometry, const FdmGrid& grid);

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;   ///< unit 2-norm
  double residual = 0.0;    ///< |A v - value v| / (|A|_inf |v|)
};

/// k (<= 6) smallest eigenpairs by shift-invert Lanczos with full
/// reorthogonalization on a sparse LDL^T factorization at shift 0.
/// Throws ConvergenceError when a pair misses the 1e-10 residual target.
std::vector<Eigenpair> lowest_eigenpairs(const Eigen::SparseMatrix<double>& op, int k);

/// Eigenvalues below mu on one grid, ascending, units of mu.
std::vector<double> fdm_eigenvalues(ModelKind model, const Geometry& geometry, const FdmGrid& grid, int k);

struct Extrapolation {
  std::vector<double> spacings;     ///< hy per grid
  std::vector<double> eigenvalues;  ///< E / mu per grid
  double estimate = 0.0;            ///< Richardson-extrapolated E / mu
  double order = 0.0;               ///< fitted convergence order p
};

/// Richardson extrapolation of eigenvalue `branch` over at least three
/// spacings in a fixed ratio, with the order fitted from the last three.
/// Throws ConvergenceError when the sequence is not monotone.
Extrapolation extrapolate(ModelKind model, const Geometry& geometry, std::span<const double> spacings,
                          double half_length, std::size_t branch = 0);

/// Richardson step on precomputed values: returns {estimate, order}.
std::pair<double, double> richardson(std::span<const double> values, double ratio);

/// Fraction of the squared norm of the grid function on the y-slice nearest
/// to `x` captured by the first `modes` profiles of `kind`.
double slice_projection(const Eigen::VectorXd& vector, const FdmGrid& grid, double x, ProfileKind kind, int modes);

}  // namespace wavebound
