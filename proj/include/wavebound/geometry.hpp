#pragma once

#include <string>
#include <string_view>

namespace wavebound {

/// Boundary-condition layout of the strip R x (0, d).
///
/// Model A: Dirichlet on the bottom wall for x < -delta and on the top wall
/// for x > delta, Neumann elsewhere.
/// Model B: Dirichlet on the top wall for |x| > delta, Neumann elsewhere.
enum class ModelKind { A, B };

std::string to_string(ModelKind model);
ModelKind parse_model(std::string_view text);

/// Strip width d and half window delta; lambda = delta / d.
class Geometry {
 public:
  Geometry(double d, double delta);

  static Geometry from_lambda(double lambda, double d = 1.0);

  double d() const noexcept { return d_; }
  double delta() const noexcept { return delta_; }
  double lambda() const noexcept { return delta_ / d_; }
  /// Essential-spectrum threshold pi^2 / (4 d^2).
  double mu() const noexcept;

  /// Same shape rescaled to unit width.
  Geometry nondimensional() const { return Geometry(1.0, lambda()); }

 private:
  double d_;
  double delta_;
};

enum class Region { I, II, III };

/// Transverse profile families on (0, d).
///   DNSine:   sqrt(2/d) sin(nu pi y / d), Dirichlet at 0, Neumann at d
///   NDCosine: sqrt(2/d) cos(nu pi y / d), Neumann at 0, Dirichlet at d
///   NNCosine: sqrt(1/d) for m = 0, sqrt(2/d) cos(m pi y / d) otherwise
/// with nu = index + 1/2 for the half-integer families.
enum class ProfileKind { DNSine, NDCosine, NNCosine };

struct TransverseMode {
  Region region = Region::II;
  int index = 0;
  ProfileKind kind = ProfileKind::NNCosine;
  double width = 1.0;

  /// nu_k = (2k+1)/2 for the tail families, m for NNCosine.
  double wavenumber_factor() const noexcept;
  double transverse_eigenvalue() const noexcept;
  double operator()(double y) const noexcept;
  double derivative(double y) const noexcept;
};

/// Profile family used in each region of each model.
ProfileKind profile_kind(ModelKind model, Region region);

TransverseMode transverse_mode(ModelKind model, Region region, int index, double d);

/// Exponential rate sqrt(transverse_eigenvalue - E) of an evanescent mode.
/// Throws std::domain_error when the mode propagates (E >= eigenvalue).
double decay_rate(const TransverseMode& mode, double energy);

/// L2(0, d) projection of a tail profile onto a center (NNCosine) profile,
/// evaluated in closed form.
double overlap(const TransverseMode& tail, const TransverseMode& center);

/// Closed-form overlap coefficients for unit width, kept separate from the
/// mode objects for the inner assembly loops.
double overlap_dn_nn(int k, int m) noexcept;
double overlap_nd_nn(int k, int m) noexcept;

}  // namespace wavebound
