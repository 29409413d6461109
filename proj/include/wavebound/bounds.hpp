#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wavebound {

struct Spectrum;

/// Two-sided guarantees from cutting the strip at x = +-delta with extra
/// Dirichlet or Neumann walls. "Entire part" is the floor function.
struct StateCountBounds {
  int n_min = 0;
  int n_max = 0;
};

/// n_min = -floor(-lambda) - 1, n_max = -floor(-lambda).
StateCountBounds state_count_bounds(double lambda);

struct Window {
  double lower = 0.0;
  double upper = 0.0;
  bool vacuous = false;  ///< raw upper bound was >= 1 and has been clamped
};

/// ((m-1)/lambda)^2 <= mu_m / mu <= min((m/lambda)^2, 1), m >= 1.
Window eigenvalue_window(int m, double lambda);

/// The m-th eigenvalue emerges from the threshold at some lambda_m in [m-1, m].
std::pair<double, double> critical_lambda_window(int m);

struct BracketReport {
  double lambda = 0.0;
  StateCountBounds counts;
  std::vector<Window> windows;  ///< one per index m = 1..n_max (at least one)
};

BracketReport bracket_report(double lambda);

struct BracketCheck {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Checks a list of eigenvalues (units of mu, ascending) against the count
/// bounds and the per-index windows. Windows are inflated by `slack` to
/// absorb rounding only.
BracketCheck check_brackets(double lambda, std::span<const double> eigenvalues_over_mu, double slack = 1e-9);

/// Same, restricted to the stable roots of a computed spectrum. The count
/// bound is only enforced when every root is stable.
BracketCheck check_brackets(const Spectrum& spectrum, double slack = 1e-9);

}  // namespace wavebound
