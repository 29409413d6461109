#pragma once

#include <array>

namespace wavebound {

/// Closed-form solution of the Euler equations of the central-region
/// functional for model A, with the boundary values
///   phi(-delta) = psi(delta) = 1,  phi(delta) = psi(-delta) = 0,
///   chi(+-delta) = eta(+-delta) = 0.
/// The trial function in the center is
///   phi(x) sin(pi y / 2d) + psi(x) cos(pi y / 2d) + eta(x) + chi(x) cos(pi y / d).
class TrialProfiles {
 public:
  struct Values {
    double chi = 0.0;
    double phi = 0.0;
    double psi = 0.0;
    double eta = 0.0;
  };

  /// Requires 0 < delta < d (the eta profile blows up at delta = d).
  TrialProfiles(double delta, double d = 1.0);

  double delta() const noexcept { return delta_; }
  double d() const noexcept { return d_; }

  Values value(double x) const;
  Values first_derivative(double x) const;
  Values second_derivative(double x) const;

 private:
  Values evaluate(double x, int order) const;

  double delta_;
  double d_;
  double k_even_;  // pi a / d, a^2 = (4 - pi) / (pi^2 + 2 pi - 16)
  double k_odd_;   // pi b / d, b^2 = 3 (3 pi - 8) / (9 pi^2 - 18 pi - 32)
  double k_chi_;   // sqrt(3) pi / 2d
  double k_eta_;   // pi / 2d
};

/// Left-hand sides of the four Euler equations (order: phi, psi, chi, eta
/// equations); all vanish for the closed-form profiles.
std::array<double, 4> euler_residuals(const TrialProfiles& profiles, double x);

/// Integrand of the central-region functional q_II.
double q2_integrand(const TrialProfiles& profiles, double x);

/// Closed-form value of q_II at the Euler profiles.
double q2_closed(double delta, double d = 1.0);

/// q_II by adaptive Gauss-Kronrod quadrature of q2_integrand.
/// Throws ConvergenceError when the error estimate exceeds 1e-10.
double q2_quadrature(double delta, double d = 1.0);

/// Root of q2_closed(delta, 1) in (0.05, 0.95): the window size above which
/// the variational trial function proves a model-A bound state.
double lambda2();

/// Upper end of the admissible kappa range, (sqrt(129) - 1) / (8 sqrt 2).
double kappa_admissible_max();

/// Right-hand side of the final inequality of the emptiness argument,
///   3 kappa (2 sqrt2 (1 + kappa) kappa + 1 - kappa) / ((1 - kappa)(4 sqrt2 (1 - kappa^2) - kappa)),
/// with kappa = pi lambda. Defined on (0, kappa_admissible_max()).
double emptiness_rhs(double kappa);

struct LowerThreshold {
  double kappa0 = 0.0;   ///< crossing emptiness_rhs(kappa0) = 1 - 2/pi
  double lambda1 = 0.0;  ///< kappa0 / pi
};

/// Below lambda1 the model-A discrete spectrum is provably empty.
LowerThreshold lambda1();

/// Ingredients of the model-B trial energy
///   q = sigma |phi'|^2 - eps (pi/d) sqrt(2/d) |j|^2 + eps^2 (4 d |j j'|^2 - d mu |j^2|^2)
/// for the bump j(x) = exp(-1 / (1 - (x/delta)^2)) on (-delta, delta) and the
/// plateau phi = 1 on [-2 delta, 2 delta] with Gaussian shoulders
/// exp(-(|x| - 2 delta)^2) outside. Every norm is computed by quadrature.
struct CertificateNorms {
  double phi_prime_sq = 0.0;  ///< |phi'|^2
  double j_sq = 0.0;          ///< |j|^2
  double jj_prime_sq = 0.0;   ///< |j j'|^2
  double j2_sq = 0.0;         ///< |j^2|^2
};

CertificateNorms certificate_norms(double delta, double d = 1.0);

/// q[Phi_{sigma, eps}] for model B.
double modelB_certificate(double delta, double d, double sigma, double epsilon);

struct CertificateSearch {
  double sigma = 0.0;
  double epsilon = 0.0;
  double value = 0.0;
};

/// Minimizes the certificate over sigma in [1e-6, 1] and eps in [1e-4, 1]
/// (log grid followed by golden-section refinement in eps).
CertificateSearch search_modelB_certificate(double delta, double d = 1.0);

struct ThresholdReport {
  double lambda1 = 0.0;
  double kappa0 = 0.0;
  double lambda2 = 0.0;
  double lambda0_numeric = 0.0;
  bool ordering_ok = false;  ///< 0 < lambda1 < lambda0_numeric < lambda2 < 1
};

ThresholdReport threshold_report(double lambda0_numeric);

}  // namespace wavebound
