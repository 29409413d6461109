#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "wavebound/geometry.hpp"
#include "wavebound/modematch.hpp"

namespace wavebound {

/// Spectra of one model on a strictly increasing lambda grid, all at the same
/// truncation.
struct SweepResult {
  ModelKind model = ModelKind::A;
  int modes = 0;
  std::vector<double> lambdas;
  std::vector<Spectrum> spectra;

  /// E_n / mu of stable branch n (0-based) at grid point i; 1 (the threshold)
  /// when the branch has not emerged there.
  double branch_value(std::size_t i, std::size_t branch) const;
  std::size_t max_branches() const noexcept;
};

/// Scans every lambda independently on up to `jobs` threads. The result is in
/// grid order regardless of completion order. Unit strip width.
SweepResult sweep(ModelKind model, std::span<const double> lambdas, int modes = 32, const ScanOptions& options = {},
                  int jobs = 1);

/// lo, lo + step, ... up to hi (inclusive within 1e-9 step).
std::vector<double> lambda_grid(double lo, double hi, double step);

// ---------------------------------------------------------------------------
// Corner singularity

enum class Wall { Bottom, Top };

/// A boundary-condition switch point on a wall. The diagnostic ray leaves the
/// corner perpendicular to the wall, i.e. at polar angle pi/2 measured from
/// the Dirichlet side.
struct Corner {
  double x = 0.0;
  Wall wall = Wall::Bottom;
};

/// Switch points of the model: A has (-delta, 0) and (delta, d); B has
/// (-delta, d) and (delta, d). Unit strip width.
std::vector<Corner> switch_points(ModelKind model, double lambda);

struct CornerFit {
  double exponent = 0.0;     ///< log-log slope of |Phi| versus r
  double fit_quality = 0.0;  ///< coefficient of determination R^2
};

/// Radii used by default: 12 log-spaced samples on [0.02, 0.2] (units of d).
std::vector<double> default_corner_radii();

/// Fits |f(P + r n)| ~ C r^p along the inward normal n. `f` takes unit-width
/// coordinates; the strip width is 1. Requires at least 8 radii in
/// [1e-3, 0.2]. Throws std::domain_error when |f| < 1e-10 on the ray.
CornerFit corner_exponent(const std::function<double(double, double)>& field, const Corner& corner,
                          std::span<const double> radii);

/// Same for a mode-matching eigenfield. The ray runs along an interface, so
/// the value is the mean of the two one-sided modal expansions. Throws
/// std::invalid_argument when `corner` is not a switch point of the model.
CornerFit corner_exponent(const EigenField& field, const Corner& corner, std::span<const double> radii);

// ---------------------------------------------------------------------------
// Monotonicity and scaling in lambda

struct MonotonicityViolation {
  std::size_t branch = 0;
  std::size_t index = 0;  ///< value rises from grid point index to index + 1
  double rise = 0.0;      ///< units of mu
};

struct MonotonicityReport {
  bool ok = true;
  std::vector<MonotonicityViolation> violations;
};

inline constexpr double kLambdaCheckTol = 1e-6;  ///< units of mu

/// mu_n(lambda_i) >= mu_n(lambda_{i+1}) - tol for each branch (all branches
/// when `branches` is 0). Requires at least 5 grid points.
MonotonicityReport monotonicity_check(const SweepResult& sweep, std::size_t branches = 0,
                                      double tol = kLambdaCheckTol);

struct ScalingReport {
  bool ok = true;
  std::size_t checked = 0;   ///< (lambda, branch) pairs tested
  double worst_margin = 0.0; ///< smallest slack of the two inequalities, units of mu
  std::vector<std::string> violations;
};

/// mu_n(lambda) / rho^2 <= mu_n(lambda rho) <= mu_n(lambda) for every grid
/// lambda whose image lambda rho lies inside the grid; off-grid values are
/// linearly interpolated and the tolerance widened by a curvature estimate of
/// the interpolation error.
ScalingReport scaling_check(const SweepResult& sweep, double rho, std::size_t branches = 0,
                            double tol = kLambdaCheckTol);

/// Single (lambda, rho) pair; throws std::out_of_range when lambda or
/// lambda rho lies outside the grid.
ScalingReport scaling_check_at(const SweepResult& sweep, double lambda, double rho, std::size_t branches = 0,
                            double tol = kLambdaCheckTol);

// ---------------------------------------------------------------------------
// Emergence of bound states

inline constexpr double kEmergenceCutoff = 1.0 - 1e-5;  ///< units of mu

/// Whether at least `count` stable eigenvalues lie below the cutoff.
bool has_bound_states(ModelKind model, double lambda, std::size_t count, int modes, const ScanOptions& options = {});

struct Emergence {
  std::size_t branch = 1;  ///< 1-based
  double lambda = 0.0;     ///< midpoint of the final bracket
  double lo = 0.0;
  double hi = 0.0;
};

/// Bisection in lambda on has_bound_states(m) inside [lo, hi] to `tol`.
/// Throws ConvergenceError when the predicate does not change across [lo, hi].
Emergence emergence_point(ModelKind model, std::size_t m, double lo, double hi, int modes = 32, double tol = 1e-4,
                          const ScanOptions& options = {});

}  // namespace wavebound
