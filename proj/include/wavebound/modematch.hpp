#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "wavebound/geometry.hpp"

namespace wavebound {

/// Interface-matching system of the three-region modal expansion at one
/// trial energy.
///
/// Unknowns (columns, each block of length N):
///   a_k     tail I amplitudes,   Phi = sum a_k exp(kappa_k (x + delta)) T^I_k(y)
///   b_k     tail III amplitudes, Phi = sum b_k exp(-kappa_k (x - delta)) T^III_k(y)
///   alpha_m center even part,    sum alpha_m c_m(x) w_m(y)
///   beta_m  center odd part,     sum beta_m  s_m(x) w_m(y)
/// Equations (rows):
///   R1 value continuity at x = -delta projected on w_m
///   R2 derivative continuity at x = -delta projected on T^I_k   (scaled by delta)
///   R3 value continuity at x = +delta projected on w_m
///   R4 derivative continuity at x = +delta projected on T^III_k (scaled by delta)
///
/// Center functions are scaled to unit value at x = delta:
///   m = 0:  c_0 = cos(sqrt(E) x),  s_0 = sin(sqrt(E) x) / (sqrt(E) delta)
///   m >= 1: c_m = cosh(g x) / cosh(g delta),  s_m = sinh(g x) / sinh(g delta)
/// which keeps every entry O(max(kappa_{N-1} delta, 1)).
///
/// All internal quantities use unit strip width; `energy` is kept in the
/// caller's units.
struct MatchingSystem {
  ModelKind model = ModelKind::A;
  Geometry geometry{1.0, 1.0};
  int modes = 0;
  double energy = 0.0;
  Eigen::MatrixXd matrix;
};

inline constexpr int kMinModes = 4;
inline constexpr int kMaxModes = 256;

MatchingSystem assemble(ModelKind model, const Geometry& geometry, int modes, double energy);

enum class SigmaMethod {
  Svd,               ///< exact smallest singular value
  /// Power iteration on (A^T A)^{-1} reusing the LU factors. Gives an upper
  /// bound on the smallest singular value, accurate to about a percent; used
  /// for locating dips in energy scans, not for acceptance of roots.
  InverseIteration,
};

struct DispersionValue {
  int det_sign = 0;  ///< -1, 0 (factorization breakdown) or +1
  double sigma_min = 0.0;
};

/// Sign of det(A) and smallest singular value of the column-equilibrated
/// matching matrix. The determinant value itself is never formed.
DispersionValue dispersion(const MatchingSystem& system, SigmaMethod method = SigmaMethod::Svd);

struct DispersionSample {
  double energy = 0.0;
  int det_sign = 0;
  double sigma_min = 0.0;
};

struct DispersionTrace {
  double energy_lo = 0.0;
  double energy_hi = 0.0;
  std::vector<DispersionSample> samples;
};

/// Relative offsets of the scan window [lo_factor * mu, hi_factor * mu].
inline constexpr double kScanLoFactor = 1e-8;
inline constexpr double kScanHiFactor = 1.0 - 1e-6;

DispersionTrace trace_dispersion(ModelKind model, const Geometry& geometry, int modes, int grid_points,
                                 SigmaMethod method = SigmaMethod::InverseIteration);

struct ScanOptions {
  int grid_points = 400;
  double refine_tol = 1e-10;       ///< bracket width, units of mu
  double accept_sigma = 1e-6;      ///< refined sigma_min above this is spurious
  double dip_threshold = 1e-3;     ///< sigma_min local minima below this are probed
  int stability_increment = 8;     ///< N -> N + increment comparison run
  double stability_tol = 5e-4;     ///< allowed drift, units of mu
  bool check_stability = true;
  int max_grid_doublings = 2;
};

/// Discrete spectrum below mu found by scanning the dispersion function.
struct Spectrum {
  ModelKind model = ModelKind::A;
  Geometry geometry{1.0, 1.0};
  int modes = 0;
  int grid_points = 0;
  std::vector<double> eigenvalues;  ///< E / mu, strictly increasing
  std::vector<double> residuals;    ///< sigma_min at the refined root
  std::vector<bool> stable;         ///< survived the N -> N + 8 drift check

  std::size_t size() const noexcept { return eigenvalues.size(); }
  bool all_stable() const noexcept;
  std::size_t stable_count() const noexcept;
  /// Stable eigenvalues with E / mu strictly below `cutoff`.
  std::size_t count_below(double cutoff) const noexcept;
};

Spectrum scan_spectrum(ModelKind model, const Geometry& geometry, int modes = 32, const ScanOptions& options = {});

/// Matched modal coefficients of one eigenfunction, in units where d = 1.
/// The field is L2(Omega)-normalized; evaluate() takes coordinates in units
/// of d and returns values in units of 1/d.
class EigenField {
 public:
  EigenField(ModelKind model, double lambda, int modes, double energy_nd, Eigen::VectorXd coefficients);

  ModelKind model() const noexcept { return model_; }
  double lambda() const noexcept { return lambda_; }
  int modes() const noexcept { return modes_; }
  /// Energy in units of 1/d^2.
  double energy() const noexcept { return energy_; }
  double energy_over_mu() const noexcept;

  auto a() const { return coefficients_.segment(0, modes_); }
  auto b() const { return coefficients_.segment(modes_, modes_); }
  auto alpha() const { return coefficients_.segment(2 * modes_, modes_); }
  auto beta() const { return coefficients_.segment(3 * modes_, modes_); }

  double operator()(double x, double y) const;
  double dx(double x, double y) const;
  double dy(double x, double y) const;

  /// Field restricted to a region, usable on the closed region (including
  /// its interfaces). Throws for points outside the strip.
  double evaluate_in(Region region, double x, double y) const;

  /// Squared L2 norm over the whole strip: analytic tails plus Gauss-Legendre
  /// quadrature over the center.
  double norm_squared() const;

  double sigma_min = 0.0;
  double sigma_second = 0.0;
  bool possibly_degenerate = false;

 private:
  double center_longitudinal(int m, bool odd, double x, bool derivative) const;
  double tail_rate(int k) const;
  double center_rate(int m) const;

  ModelKind model_;
  double lambda_;
  int modes_;
  double energy_;
  Eigen::VectorXd coefficients_;
};

/// Null vector of the matching matrix at a converged root, renormalized to
/// unit L2(Omega) norm. The largest-magnitude coefficient is made positive.
/// Throws ConvergenceError when sigma_min >= 1e-6.
EigenField solve_coefficients(const MatchingSystem& system_at_root);

double evaluate_field(const EigenField& field, double x, double y);

/// Eigenfield of branch `branch` (0-based) found by scan_spectrum.
/// Throws std::out_of_range when the branch does not exist.
EigenField eigenfield(const Spectrum& spectrum, std::size_t branch);

struct ConvergenceStudy {
  std::vector<int> modes;
  std::vector<double> eigenvalues;  ///< E / mu per truncation
  std::vector<double> differences;  ///< |E(N_i) - E(N_{i+1})| / mu
  double order = 0.0;               ///< -slope of log(differences) vs log(N)
};

ConvergenceStudy convergence_study(ModelKind model, const Geometry& geometry, std::span<const int> modes,
                                   std::size_t branch = 0);

}  // namespace wavebound
