#include "wavebound/variational.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "wavebound/errors.hpp"
#include "wavebound/root_finding.hpp"

namespace wavebound {

namespace {

constexpr double kPi = std::numbers::pi;

double even_rate_factor() { return std::sqrt((4.0 - kPi) / (kPi * kPi + 2.0 * kPi - 16.0)); }
double odd_rate_factor() { return std::sqrt(3.0 * (3.0 * kPi - 8.0) / (9.0 * kPi * kPi - 18.0 * kPi - 32.0)); }

template <class F>
double integrate(F&& f, double lo, double hi, const char* what) {
  // The error estimate is judged against the L1 norm of the integrand: the
  // integrands cancel strongly near the roots of the functionals, and a
  // tighter target only chases round-off.
  double error = 0.0, l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 12, 1e-12, &error, &l1);
  if (!std::isfinite(value) || !(error <= 1e-10 * std::max(1.0, l1)))
    throw ConvergenceError(std::string("quadrature did not converge: ") + what);
  return value;
}

}  // namespace

TrialProfiles::TrialProfiles(double delta, double d) : delta_(delta), d_(d) {
  if (!(d > 0.0)) throw std::invalid_argument("strip width must be positive");
  if (!(delta > 0.0 && delta < d)) throw std::invalid_argument("trial profiles need 0 < delta < d");
  k_even_ = kPi * even_rate_factor() / d;
  k_odd_ = kPi * odd_rate_factor() / d;
  k_chi_ = std::sqrt(3.0) * kPi / (2.0 * d);
  k_eta_ = kPi / (2.0 * d);
}

TrialProfiles::Values TrialProfiles::evaluate(double x, int order) const {
  const double dl = delta_;
  // cosh(kx)/cosh(k delta), sinh(kx)/sinh(k delta), cos(kx)/cos(k delta) and derivatives
  auto cosh_ratio = [&](double k) {
    const double c = std::cosh(k * dl);
    if (order == 0) return std::cosh(k * x) / c;
    if (order == 1) return k * std::sinh(k * x) / c;
    return k * k * std::cosh(k * x) / c;
  };
  auto sinh_ratio = [&](double k) {
    const double s = std::sinh(k * dl);
    if (order == 0) return std::sinh(k * x) / s;
    if (order == 1) return k * std::cosh(k * x) / s;
    return k * k * std::sinh(k * x) / s;
  };
  auto cos_ratio = [&](double k) {
    const double c = std::cos(k * dl);
    if (order == 0) return std::cos(k * x) / c;
    if (order == 1) return -k * std::sin(k * x) / c;
    return -k * k * std::cos(k * x) / c;
  };
  const double even = cosh_ratio(k_even_);
  const double odd = sinh_ratio(k_odd_);
  Values v;
  v.chi = 4.0 / (3.0 * kPi) * (sinh_ratio(k_chi_) - odd);
  v.phi = 0.5 * (even - odd);
  v.psi = 0.5 * (even + odd);
  v.eta = 2.0 / kPi * (cos_ratio(k_eta_) - even);
  return v;
}

TrialProfiles::Values TrialProfiles::value(double x) const { return evaluate(x, 0); }
TrialProfiles::Values TrialProfiles::first_derivative(double x) const { return evaluate(x, 1); }
TrialProfiles::Values TrialProfiles::second_derivative(double x) const { return evaluate(x, 2); }

std::array<double, 4> euler_residuals(const TrialProfiles& p, double x) {
  const double d = p.d();
  const auto f = p.value(x);
  const auto f2 = p.second_derivative(x);
  return {
      d * f2.phi + 2 * d / kPi * f2.psi - 4 * d / (3 * kPi) * f2.chi + 4 * d / kPi * f2.eta +
          kPi / d * (f.psi + f.eta + f.chi),
      d * f2.psi + 2 * d / kPi * f2.phi + 4 * d / (3 * kPi) * f2.chi + 4 * d / kPi * f2.eta +
          kPi / d * (f.phi + f.eta - f.chi),
      d * f2.chi + 4 * d / (3 * kPi) * (f2.psi - f2.phi) - kPi / d * (f.psi - f.phi) -
          3 * kPi * kPi / (4 * d) * f.chi,
      2 * d * f2.eta + 4 * d / kPi * (f2.psi + f2.phi) + kPi / d * (f.psi + f.phi) + kPi * kPi / (2 * d) * f.eta,
  };
}

double q2_integrand(const TrialProfiles& p, double x) {
  const double d = p.d();
  const auto f = p.value(x);
  const auto g = p.first_derivative(x);
  return d / 2 * (g.phi * g.phi + g.psi * g.psi + g.chi * g.chi) + d * g.eta * g.eta +
         2 * d / kPi * g.phi * g.psi + 4 * d / (3 * kPi) * g.chi * (g.psi - g.phi) +
         4 * d / kPi * g.eta * (g.phi + g.psi) + kPi / d * f.chi * (f.psi - f.phi) +
         3 * kPi * kPi / (8 * d) * f.chi * f.chi - kPi / d * f.phi * f.psi - kPi * kPi / (4 * d) * f.eta * f.eta -
         kPi / d * f.eta * (f.psi + f.phi);
}

double q2_closed(double delta, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("strip width must be positive");
  if (!(delta > 0.0 && delta < d)) throw std::invalid_argument("q2_closed needs 0 < delta < d");
  const double a = even_rate_factor();
  const double b = odd_rate_factor();
  const double s = delta / d;
  const double t1 = std::sqrt((4 - kPi) * (kPi * kPi + 2 * kPi - 16)) / (2 * kPi) * std::tanh(kPi * s * a);
  const double t2 = 8 / (3 * std::sqrt(3.0) * kPi) / std::tanh(std::sqrt(3.0) * kPi * s / 2);
  const double t3 = std::sqrt((3 * kPi - 8) * (9 * kPi * kPi - 18 * kPi - 32)) / (6 * std::sqrt(3.0) * kPi) /
                    std::tanh(kPi * s * b);
  const double t4 = 4 / kPi * std::tan(kPi * s / 2);
  return t1 + t2 + t3 - t4;
}

double q2_quadrature(double delta, double d) {
  const TrialProfiles p(delta, d);
  auto f = [&](double x) { return q2_integrand(p, x); };
  return integrate(f, -delta, 0.0, "q_II left half") + integrate(f, 0.0, delta, "q_II right half");
}

double lambda2() {
  auto q = [](double s) { return q2_closed(s, 1.0); };
  if (!(q(0.05) > 0.0 && q(0.95) < 0.0)) throw ConvergenceError("q_II has no sign change in (0.05, 0.95)");
  return bisect(q, 0.05, 0.95, 1e-10);
}

double kappa_admissible_max() { return (std::sqrt(129.0) - 1.0) / (8.0 * std::sqrt(2.0)); }

double emptiness_rhs(double kappa) {
  if (!(kappa > 0.0 && kappa < kappa_admissible_max()))
    throw std::invalid_argument("kappa outside the admissible window (0, (sqrt(129)-1)/(8 sqrt 2))");
  const double r2 = std::sqrt(2.0);
  const double num = 3.0 * kappa * (2.0 * r2 * (1.0 + kappa) * kappa + 1.0 - kappa);
  const double den = (1.0 - kappa) * (4.0 * r2 * (1.0 - kappa * kappa) - kappa);
  return num / den;
}

LowerThreshold lambda1() {
  const double target = 1.0 - 2.0 / kPi;
  const double lo = 1e-6;
  const double hi = kappa_admissible_max() - 1e-6;
  auto f = [&](double k) { return emptiness_rhs(k) - target; };
  if (!(f(lo) < 0.0 && f(hi) > 0.0)) throw ConvergenceError("emptiness inequality has no crossing");
  LowerThreshold out;
  out.kappa0 = bisect(f, lo, hi, 1e-12);
  out.lambda1 = out.kappa0 / kPi;
  return out;
}

CertificateNorms certificate_norms(double delta, double d) {
  if (!(delta > 0.0) || !(d > 0.0)) throw std::invalid_argument("certificate needs delta > 0 and d > 0");
  // The bump norms are integrated in t = x / delta on (-1, 1) and rescaled:
  // |j|^2 and |j^2|^2 scale with delta, |j j'|^2 with 1 / delta.
  auto bump = [](double t) {
    const double s = 1.0 - t * t;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
  };
  auto bump_dt = [&bump](double t) {
    const double s = 1.0 - t * t;
    if (!(s > 0.0)) return 0.0;
    const double j = bump(t);
    return j == 0.0 ? 0.0 : j * (-2.0 * t) / (s * s);
  };
  CertificateNorms n;
  const double b = 2.0 * delta;
  // phi' vanishes on the plateau; both shoulders contribute equally.
  auto shoulder = [b](double x) {
    const double u = x - b;
    const double g = -2.0 * u * std::exp(-u * u);
    return g * g;
  };
  n.phi_prime_sq = 2.0 * integrate(shoulder, b, std::numeric_limits<double>::infinity(), "|phi'|^2");
  n.j_sq = delta * integrate([&](double t) { return bump(t) * bump(t); }, -1.0, 1.0, "|j|^2");
  n.jj_prime_sq = integrate(
                      [&](double t) {
                        const double v = bump(t) * bump_dt(t);
                        return v * v;
                      },
                      -1.0, 1.0, "|j j'|^2") /
                  delta;
  n.j2_sq = delta * integrate(
                        [&](double t) {
                          const double j = bump(t);
                          return j * j * j * j;
                        },
                        -1.0, 1.0, "|j^2|^2");
  return n;
}

namespace {
double certificate_value(const CertificateNorms& n, double d, double sigma, double epsilon) {
  const double mu = kPi * kPi / (4.0 * d * d);
  return sigma * n.phi_prime_sq - epsilon * (kPi / d) * std::sqrt(2.0 / d) * n.j_sq +
         epsilon * epsilon * (4.0 * d * n.jj_prime_sq - d * mu * n.j2_sq);
}
}  // namespace

double modelB_certificate(double delta, double d, double sigma, double epsilon) {
  if (!(sigma > 0.0) || !(epsilon >= 0.0)) throw std::invalid_argument("certificate needs sigma > 0, epsilon >= 0");
  return certificate_value(certificate_norms(delta, d), d, sigma, epsilon);
}

CertificateSearch search_modelB_certificate(double delta, double d) {
  const CertificateNorms n = certificate_norms(delta, d);
  CertificateSearch best{1.0, 1.0, std::numeric_limits<double>::infinity()};
  constexpr int kSteps = 25;
  for (int i = 0; i < kSteps; ++i) {
    const double sigma = std::pow(10.0, -6.0 + 6.0 * i / (kSteps - 1));
    for (int j = 0; j < kSteps; ++j) {
      const double eps = std::pow(10.0, -4.0 + 4.0 * j / (kSteps - 1));
      const double v = certificate_value(n, d, sigma, eps);
      if (v < best.value) best = {sigma, eps, v};
    }
  }
  const double lo = std::max(1e-4, best.epsilon / 1.5);
  const double hi = std::min(1.0, best.epsilon * 1.5);
  const Minimum m =
      golden_section([&](double e) { return certificate_value(n, d, best.sigma, e); }, lo, hi, 1e-12);
  if (m.value < best.value) best = {best.sigma, m.x, m.value};
  return best;
}

ThresholdReport threshold_report(double lambda0_numeric) {
  ThresholdReport r;
  const LowerThreshold low = lambda1();
  r.lambda1 = low.lambda1;
  r.kappa0 = low.kappa0;
  r.lambda2 = lambda2();
  r.lambda0_numeric = lambda0_numeric;
  r.ordering_ok = 0.0 < r.lambda1 && r.lambda1 < r.lambda0_numeric && r.lambda0_numeric < r.lambda2 && r.lambda2 < 1.0;
  return r;
}

}  // namespace wavebound
