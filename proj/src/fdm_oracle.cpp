#include "wavebound/fdm_oracle.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wavebound/errors.hpp"

namespace wavebound {

namespace {
constexpr double kResidualTarget = 1e-10;

bool is_integer_multiple(double value, double step) {
  const double r = value / step;
  return std::abs(r - std::round(r)) < 1e-9 * std::max(1.0, std::abs(r));
}
}  // namespace

WallLayout wall_layout(ModelKind model, const Geometry& geometry) {
  const double delta = geometry.delta();
  if (model == ModelKind::A) {
    return {[delta](double x) { return x < -delta ? WallCondition::Dirichlet : WallCondition::Neumann; },
            [delta](double x) { return x > delta ? WallCondition::Dirichlet : WallCondition::Neumann; }};
  }
  return {[](double) { return WallCondition::Neumann; },
          [delta](double x) { return std::abs(x) > delta ? WallCondition::Dirichlet : WallCondition::Neumann; }};
}

double default_half_length(const Geometry& geometry) { return geometry.delta() + 12.0 * geometry.d(); }

FdmGrid make_grid(const Geometry& geometry, double h, double half_length) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  if (!(half_length > geometry.delta())) throw std::invalid_argument("truncation length L must exceed delta");
  const double delta = geometry.delta();
  const int cells_in_delta = std::max(1, static_cast<int>(std::lround(delta / h)));
  const double hx = delta / cells_in_delta;
  const int half_cells = static_cast<int>(std::ceil(half_length / hx - 1e-9));
  FdmGrid g;
  g.half_length = half_cells * hx;
  g.width = geometry.d();
  g.nx = 2 * half_cells;
  g.ny = std::max(1, static_cast<int>(std::lround(geometry.d() / h)));
  return g;
}

Eigen::SparseMatrix<double> build_operator(const WallLayout& walls, const FdmGrid& grid) {
  if (grid.nx < 1 || grid.ny < 1) throw std::invalid_argument("empty grid");
  const double ihx2 = 1.0 / (grid.hx() * grid.hx());
  const double ihy2 = 1.0 / (grid.hy() * grid.hy());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid.size() * 5);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x_center(i);
    const double ghost_bottom = walls.bottom(x) == WallCondition::Dirichlet ? -1.0 : 1.0;
    const double ghost_top = walls.top(x) == WallCondition::Dirichlet ? -1.0 : 1.0;
    for (int j = 0; j < grid.ny; ++j) {
      const Eigen::Index row = grid.index(i, j);
      double diag = 2.0 * ihx2 + 2.0 * ihy2;
      if (i > 0)
        trip.emplace_back(row, grid.index(i - 1, j), -ihx2);
      else
        diag += ihx2;  // Dirichlet end
      if (i + 1 < grid.nx)
        trip.emplace_back(row, grid.index(i + 1, j), -ihx2);
      else
        diag += ihx2;
      if (j > 0)
        trip.emplace_back(row, grid.index(i, j - 1), -ihy2);
      else
        diag -= ghost_bottom * ihy2;
      if (j + 1 < grid.ny)
        trip.emplace_back(row, grid.index(i, j + 1), -ihy2);
      else
        diag -= ghost_top * ihy2;
      trip.emplace_back(row, row, diag);
    }
  }
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

Eigen::SparseMatrix<double> build_operator(ModelKind model, const Geometry& geometry, const FdmGrid& grid) {
  if (std::abs(grid.width - geometry.d()) > 1e-12 * geometry.d())
    throw std::invalid_argument("grid width differs from the strip width");
  const double hx = grid.hx();
  if (!is_integer_multiple(geometry.delta(), hx) || !is_integer_multiple(grid.half_length, hx))
    throw std::invalid_argument("boundary-condition switch points x = +-delta are not on grid lines");
  return build_operator(wall_layout(model, geometry), grid);
}

std::vector<Eigenpair> lowest_eigenpairs(const Eigen::SparseMatrix<double>& op, int k) {
  if (k < 1 || k > 6) throw std::invalid_argument("lowest_eigenpairs supports 1 <= k <= 6");
  const Eigen::Index n = op.rows();
  if (n < k) throw std::invalid_argument("operator smaller than the number of requested pairs");

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> factor(op);
  if (factor.info() != Eigen::Success) throw ConvergenceError("sparse LDL^T factorization failed");

  const Eigen::Index max_steps = std::min<Eigen::Index>(n, 160);
  std::vector<Eigen::VectorXd> basis;
  std::vector<double> alpha;
  std::vector<double> beta;

  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i));
  v.normalize();
  basis.push_back(v);

  Eigen::VectorXd ritz_theta;
  Eigen::MatrixXd ritz_s;
  bool converged = false;
  for (Eigen::Index j = 0; j < max_steps; ++j) {
    Eigen::VectorXd w = factor.solve(basis[j]);
    alpha.push_back(basis[j].dot(w));
    // Full reorthogonalization, applied twice.
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();
    const Eigen::Index m = j + 1;
    const bool exhausted = b < 1e-14 * std::abs(alpha.front()) || m == max_steps;
    if (m >= k && (m % 5 == 0 || exhausted)) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        t(i, i) = alpha[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
      }
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      ritz_theta = es.eigenvalues();
      ritz_s = es.eigenvectors();
      // Largest Ritz values of the inverse are the smallest eigenvalues.
      bool all_small = true;
      for (int i = 0; i < k; ++i) {
        const Eigen::Index col = m - 1 - i;
        const double est = std::abs(b * ritz_s(m - 1, col));
        if (est > 1e-15 * std::abs(ritz_theta(m - 1))) all_small = false;
      }
      if (all_small || exhausted) {
        converged = all_small;
        break;
      }
    }
    beta.push_back(b);
    basis.push_back(w / b);
  }

  const double op_norm = [&] {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(n);
    for (Eigen::Index c = 0; c < op.outerSize(); ++c)
      for (Eigen::SparseMatrix<double>::InnerIterator it(op, c); it; ++it) rowsum(it.row()) += std::abs(it.value());
    return rowsum.maxCoeff();
  }();

  const Eigen::Index m = ritz_theta.size();
  std::vector<Eigenpair> out;
  for (int i = 0; i < k; ++i) {
    const Eigen::Index col = m - 1 - i;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index r = 0; r < m; ++r) y += ritz_s(r, col) * basis[r];
    y.normalize();
    const Eigen::VectorXd ay = op * y;
    const double rho = y.dot(ay);
    Eigenpair p;
    p.value = rho;
    p.residual = (ay - rho * y).norm() / op_norm;
    if (!(p.residual < kResidualTarget))
      throw ConvergenceError("Lanczos eigenpair " + std::to_string(i) + " missed the residual target (" +
                             std::to_string(p.residual) + ")" + (converged ? "" : " after the iteration cap"));
    p.vector = std::move(y);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const Eigenpair& l, const Eigenpair& r) { return l.value < r.value; });
  return out;
}

std::vector<double> fdm_eigenvalues(ModelKind model, const Geometry& geometry, const FdmGrid& grid, int k) {
  const auto pairs = lowest_eigenpairs(build_operator(model, geometry, grid), k);
  std::vector<double> out;
  for (const auto& p : pairs)
    if (p.value < geometry.mu()) out.push_back(p.value / geometry.mu());
  return out;
}

std::pair<double, double> richardson(std::span<const double> values, double ratio) {
  if (values.size() < 3) throw std::invalid_argument("Richardson extrapolation needs three values");
  if (!(ratio > 1.0)) throw std::invalid_argument("refinement ratio must exceed 1");
  const std::size_t n = values.size();
  const double e1 = values[n - 3], e2 = values[n - 2], e3 = values[n - 1];
  const double d12 = e1 - e2;
  const double d23 = e2 - e3;
  if (!(d12 * d23 > 0.0) || std::abs(d23) >= std::abs(d12))
    throw ConvergenceError("eigenvalue sequence is not monotonically converging; grid too coarse");
  const double order = std::log(d12 / d23) / std::log(ratio);
  const double estimate = e3 - d23 / (std::pow(ratio, order) - 1.0);
  return {estimate, order};
}

Extrapolation extrapolate(ModelKind model, const Geometry& geometry, std::span<const double> spacings,
                          double half_length, std::size_t branch) {
  if (spacings.size() < 3) throw std::invalid_argument("extrapolation needs at least three grid spacings");
  const double ratio = spacings[0] / spacings[1];
  for (std::size_t i = 1; i < spacings.size(); ++i)
    if (std::abs(spacings[i - 1] / spacings[i] - ratio) > 1e-9 * ratio)
      throw std::invalid_argument("grid spacings must be in a fixed ratio");
  Extrapolation out;
  const int k = static_cast<int>(branch) + 1;
  for (const double h : spacings) {
    const FdmGrid grid = make_grid(geometry, h, half_length);
    const auto pairs = lowest_eigenpairs(build_operator(model, geometry, grid), k);
    out.spacings.push_back(grid.hy());
    out.eigenvalues.push_back(pairs[branch].value / geometry.mu());
  }
  const auto [estimate, order] = richardson(out.eigenvalues, ratio);
  out.estimate = estimate;
  out.order = order;
  return out;
}

double slice_projection(const Eigen::VectorXd& vector, const FdmGrid& grid, double x, ProfileKind kind, int modes) {
  const int i = std::clamp(static_cast<int>(std::floor((x + grid.half_length) / grid.hx())), 0, grid.nx - 1);
  const double hy = grid.hy();
  double total = 0.0;
  for (int j = 0; j < grid.ny; ++j) total += hy * vector(grid.index(i, j)) * vector(grid.index(i, j));
  if (!(total > 0.0)) return 0.0;
  double captured = 0.0;
  for (int k = 0; k < modes; ++k) {
    const TransverseMode mode{Region::I, k, kind, grid.width};
    double c = 0.0;
    for (int j = 0; j < grid.ny; ++j) c += hy * vector(grid.index(i, j)) * mode(grid.y_center(j));
    captured += c * c;
  }
  return captured / total;
}

}  // namespace wavebound
