#include "wavebound/modematch.hpp"

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
constexpr double kMuUnit = kPi * kPi / 4.0;

/// Unit-width description of one matching problem.
struct UnitProblem {
  ModelKind model;
  double delta;  // = lambda
  int modes;
  double energy;  // units of 1/d^2

  double kappa(int k) const { return std::sqrt((k + 0.5) * (k + 0.5) * kPi * kPi - energy); }
  double gamma(int m) const { return std::sqrt(static_cast<double>(m) * m * kPi * kPi - energy); }
  double tail_overlap_left(int k, int m) const {
    return model == ModelKind::A ? overlap_dn_nn(k, m) : overlap_nd_nn(k, m);
  }
  double tail_overlap_right(int k, int m) const { return overlap_nd_nn(k, m); }
};

double sinc(double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }

/// Values and x-derivatives of the scaled center functions at x = +delta.
/// Values at -delta follow from parity: c even, s odd.
struct CenterEdge {
  double c, dc, s, ds;
};

CenterEdge center_edge(const UnitProblem& p, int m) {
  const double delta = p.delta;
  if (m == 0) {
    const double q = std::sqrt(p.energy);
    return {std::cos(q * delta), -q * std::sin(q * delta), sinc(q * delta), std::cos(q * delta) / delta};
  }
  const double g = p.gamma(m);
  const double t = std::tanh(g * delta);
  return {1.0, g * t, 1.0, g / t};
}

Eigen::MatrixXd build_matrix(const UnitProblem& p) {
  const int n = p.modes;
  const double delta = p.delta;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  const int col_a = 0, col_b = n, col_al = 2 * n, col_be = 3 * n;
  const int r1 = 0, r2 = n, r3 = 2 * n, r4 = 3 * n;

  std::vector<CenterEdge> edge(n);
  for (int m = 0; m < n; ++m) edge[m] = center_edge(p, m);

  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      a(r1 + m, col_a + k) = p.tail_overlap_left(k, m);
      a(r3 + m, col_b + k) = p.tail_overlap_right(k, m);
    }
    // c(-delta) = c(delta), s(-delta) = -s(delta)
    a(r1 + m, col_al + m) = -edge[m].c;
    a(r1 + m, col_be + m) = edge[m].s;
    a(r3 + m, col_al + m) = -edge[m].c;
    a(r3 + m, col_be + m) = -edge[m].s;
  }
  for (int k = 0; k < n; ++k) {
    const double kap = p.kappa(k);
    a(r2 + k, col_a + k) = delta * kap;
    a(r4 + k, col_b + k) = -delta * kap;
    for (int m = 0; m < n; ++m) {
      const double pl = p.tail_overlap_left(k, m);
      const double pr = p.tail_overlap_right(k, m);
      // c'(-delta) = -c'(delta), s'(-delta) = s'(delta)
      a(r2 + k, col_al + m) = delta * pl * edge[m].dc;
      a(r2 + k, col_be + m) = -delta * pl * edge[m].ds;
      a(r4 + k, col_al + m) = -delta * pr * edge[m].dc;
      a(r4 + k, col_be + m) = -delta * pr * edge[m].ds;
    }
  }
  return a;
}

void check_modes(int modes) {
  if (modes < kMinModes || modes > kMaxModes)
    throw std::invalid_argument("truncation order N must lie in [" + std::to_string(kMinModes) + ", " +
                                std::to_string(kMaxModes) + "]");
}

Eigen::VectorXd column_scales(const Eigen::MatrixXd& a) {
  Eigen::VectorXd s = a.colwise().norm().transpose();
  for (Eigen::Index j = 0; j < s.size(); ++j)
    if (!(s(j) > 0.0)) s(j) = 1.0;
  return s;
}

int lu_det_sign(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const auto& u = lu.matrixLU();
  int sign = lu.permutationP().determinant() > 0 ? 1 : -1;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double piv = u(i, i);
    if (piv == 0.0 || !std::isfinite(piv)) return 0;
    if (piv < 0.0) sign = -sign;
  }
  return sign;
}

double sigma_min_inverse_iteration(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu) {
  const Eigen::Index n = lu.matrixLU().rows();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = 1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i));
  x.normalize();
  double rho_prev = 0.0;
  double rho = 0.0;
  for (int it = 0; it < 60; ++it) {
    const Eigen::VectorXd y = lu.transpose().solve(x);
    rho = y.squaredNorm();  // Rayleigh quotient of (A^T A)^{-1}
    if (!std::isfinite(rho)) return 0.0;
    x = lu.solve(y);
    const double nx = x.norm();
    if (!(nx > 0.0) || !std::isfinite(nx)) return 0.0;
    x /= nx;
    if (it > 2 && std::abs(rho - rho_prev) <= 1e-6 * rho) break;
    rho_prev = rho;
  }
  return 1.0 / std::sqrt(rho);
}

DispersionValue dispersion_of(const Eigen::MatrixXd& matrix, SigmaMethod method) {
  const Eigen::VectorXd scales = column_scales(matrix);
  const Eigen::MatrixXd scaled = matrix * scales.cwiseInverse().asDiagonal();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(scaled);
  DispersionValue out;
  out.det_sign = lu_det_sign(lu);
  if (method == SigmaMethod::Svd) {
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled);
    out.sigma_min = svd.singularValues().minCoeff();
  } else {
    out.sigma_min = out.det_sign == 0 ? 0.0 : sigma_min_inverse_iteration(lu);
  }
  return out;
}

int det_sign_at(const UnitProblem& base, double energy) {
  UnitProblem p = base;
  p.energy = energy;
  const Eigen::MatrixXd a = build_matrix(p);
  const Eigen::VectorXd scales = column_scales(a);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a * scales.cwiseInverse().asDiagonal());
  return lu_det_sign(lu);
}

double sigma_at(const UnitProblem& base, double energy, SigmaMethod method) {
  UnitProblem p = base;
  p.energy = energy;
  return dispersion_of(build_matrix(p), method).sigma_min;
}

std::vector<DispersionSample> sample_grid(const UnitProblem& base, int grid_points, SigmaMethod method) {
  std::vector<DispersionSample> samples;
  samples.reserve(grid_points);
  const double lo = kScanLoFactor * kMuUnit;
  const double hi = kScanHiFactor * kMuUnit;
  for (int i = 0; i < grid_points; ++i) {
    const double e = grid_points == 1 ? lo : lo + (hi - lo) * i / (grid_points - 1.0);
    UnitProblem p = base;
    p.energy = e;
    const DispersionValue v = dispersion_of(build_matrix(p), method);
    samples.push_back({e, v.det_sign, v.sigma_min});
  }
  return samples;
}

struct Root {
  double t;  // E / mu
  double sigma;
};

/// Roots of the dispersion function at one truncation, without the drift check.
std::vector<Root> find_roots(const UnitProblem& base, const ScanOptions& opt, int grid_points) {
  const std::vector<DispersionSample> s = sample_grid(base, grid_points, SigmaMethod::InverseIteration);
  const double tol = opt.refine_tol * kMuUnit;
  std::vector<Root> roots;
  auto sign_fn = [&](double e) { return static_cast<double>(det_sign_at(base, e)); };
  auto accept = [&](double e, int multiplicity) {
    UnitProblem p = base;
    p.energy = e;
    const Eigen::MatrixXd a = build_matrix(p);
    const Eigen::VectorXd scales = column_scales(a);
    const Eigen::BDCSVD<Eigen::MatrixXd> svd(a * scales.cwiseInverse().asDiagonal());
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin >= opt.accept_sigma) return;
    roots.push_back({e / kMuUnit, smin});
    if (multiplicity > 1 && sv(sv.size() - 2) < opt.accept_sigma) roots.push_back({e / kMuUnit, sv(sv.size() - 2)});
  };

  const std::size_t n = s.size();
  std::vector<bool> cell_has_sign_change(n > 0 ? n - 1 : 0, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (s[i].det_sign == 0) {
      accept(s[i].energy, 1);
      continue;
    }
    if (i + 1 < n && s[i + 1].det_sign != 0 && s[i].det_sign != s[i + 1].det_sign) {
      cell_has_sign_change[i] = true;
      accept(bisect(sign_fn, s[i].energy, s[i + 1].energy, tol), 1);
    }
  }
  // Sign-preserving dips: pairs of close roots or even-multiplicity roots.
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(s[i].sigma_min < opt.dip_threshold)) continue;
    if (!(s[i].sigma_min < s[i - 1].sigma_min && s[i].sigma_min < s[i + 1].sigma_min)) continue;
    if (cell_has_sign_change[i - 1] || cell_has_sign_change[i]) continue;
    if (s[i].det_sign == 0) continue;
    const Minimum mn = golden_section([&](double e) { return sigma_at(base, e, SigmaMethod::Svd); },
                                      s[i - 1].energy, s[i + 1].energy, tol);
    accept(mn.x, 2);
  }
  std::sort(roots.begin(), roots.end(), [](const Root& l, const Root& r) { return l.t < r.t; });
  return roots;
}

UnitProblem unit_problem(ModelKind model, const Geometry& geometry, int modes, double energy_nd) {
  return UnitProblem{model, geometry.lambda(), modes, energy_nd};
}

}  // namespace

MatchingSystem assemble(ModelKind model, const Geometry& geometry, int modes, double energy) {
  check_modes(modes);
  if (!(energy > 0.0 && energy < geometry.mu()))
    throw std::invalid_argument("trial energy must lie strictly inside (0, mu)");
  const double e_nd = energy * geometry.d() * geometry.d();
  MatchingSystem sys{model, geometry, modes, energy, build_matrix(unit_problem(model, geometry, modes, e_nd))};
  return sys;
}

DispersionValue dispersion(const MatchingSystem& system, SigmaMethod method) {
  return dispersion_of(system.matrix, method);
}

DispersionTrace trace_dispersion(ModelKind model, const Geometry& geometry, int modes, int grid_points,
                                 SigmaMethod method) {
  check_modes(modes);
  if (grid_points < 2) throw std::invalid_argument("dispersion trace needs at least two grid points");
  const double scale = 1.0 / (geometry.d() * geometry.d());
  DispersionTrace trace;
  trace.samples = sample_grid(unit_problem(model, geometry, modes, 0.0), grid_points, method);
  for (auto& s : trace.samples) s.energy *= scale;
  trace.energy_lo = trace.samples.front().energy;
  trace.energy_hi = trace.samples.back().energy;
  return trace;
}

bool Spectrum::all_stable() const noexcept {
  return std::all_of(stable.begin(), stable.end(), [](bool b) { return b; });
}

std::size_t Spectrum::stable_count() const noexcept {
  return static_cast<std::size_t>(std::count(stable.begin(), stable.end(), true));
}

std::size_t Spectrum::count_below(double cutoff) const noexcept {
  std::size_t c = 0;
  for (std::size_t i = 0; i < eigenvalues.size(); ++i)
    if (stable[i] && eigenvalues[i] < cutoff) ++c;
  return c;
}

Spectrum scan_spectrum(ModelKind model, const Geometry& geometry, int modes, const ScanOptions& options) {
  check_modes(modes);
  if (options.grid_points < 3) throw std::invalid_argument("scan needs at least three grid points");
  const UnitProblem base = unit_problem(model, geometry, modes, 0.0);

  Spectrum out;
  out.model = model;
  out.geometry = geometry;
  out.modes = modes;

  int grid = options.grid_points;
  std::vector<Root> roots;
  std::vector<Root> check;
  for (int attempt = 0;; ++attempt) {
    roots = find_roots(base, options, grid);
    if (!options.check_stability) break;
    UnitProblem finer = base;
    finer.modes = std::min(modes + options.stability_increment, kMaxModes);
    check = find_roots(finer, options, grid);
    if (check.size() == roots.size() || attempt >= options.max_grid_doublings) break;
    grid = 2 * grid - 1;  // keeps the old nodes
  }
  out.grid_points = grid;

  for (const Root& r : roots) {
    out.eigenvalues.push_back(r.t);
    out.residuals.push_back(r.sigma);
    bool stable = !options.check_stability;
    for (const Root& c : check)
      if (std::abs(c.t - r.t) < options.stability_tol) stable = true;
    out.stable.push_back(stable);
  }
  return out;
}

// ---------------------------------------------------------------------------
// EigenField

EigenField::EigenField(ModelKind model, double lambda, int modes, double energy_nd, Eigen::VectorXd coefficients)
    : model_(model), lambda_(lambda), modes_(modes), energy_(energy_nd), coefficients_(std::move(coefficients)) {
  if (coefficients_.size() != 4 * modes_) throw std::invalid_argument("EigenField: coefficient vector has wrong size");
}

double EigenField::energy_over_mu() const noexcept { return energy_ / kMuUnit; }

double EigenField::tail_rate(int k) const { return std::sqrt((k + 0.5) * (k + 0.5) * kPi * kPi - energy_); }

double EigenField::center_rate(int m) const { return std::sqrt(static_cast<double>(m) * m * kPi * kPi - energy_); }

double EigenField::center_longitudinal(int m, bool odd, double x, bool derivative) const {
  const double delta = lambda_;
  if (m == 0) {
    const double q = std::sqrt(energy_);
    if (!odd) return derivative ? -q * std::sin(q * x) : std::cos(q * x);
    if (derivative) return std::cos(q * x) / delta;
    return x * sinc(q * x) / delta;
  }
  const double g = center_rate(m);
  const double ax = std::abs(x);
  const double sgn = x < 0.0 ? -1.0 : 1.0;
  const double grow = std::exp(g * (ax - delta));
  const double ep = 1.0 + std::exp(-2.0 * g * ax);
  const double em = -std::expm1(-2.0 * g * ax);
  const double dp = 1.0 + std::exp(-2.0 * g * delta);
  const double dm = -std::expm1(-2.0 * g * delta);
  if (!odd) return derivative ? sgn * g * grow * em / dp : grow * ep / dp;
  return derivative ? g * grow * ep / dm : sgn * grow * em / dm;
}

double EigenField::evaluate_in(Region region, double x, double y) const {
  if (!(y >= 0.0 && y <= 1.0) || !std::isfinite(x)) throw std::domain_error("point outside the strip");
  double sum = 0.0;
  switch (region) {
    case Region::I:
      for (int k = 0; k < modes_; ++k) {
        const TransverseMode t = transverse_mode(model_, Region::I, k, 1.0);
        sum += a()(k) * std::exp(tail_rate(k) * (x + lambda_)) * t(y);
      }
      break;
    case Region::III:
      for (int k = 0; k < modes_; ++k) {
        const TransverseMode t = transverse_mode(model_, Region::III, k, 1.0);
        sum += b()(k) * std::exp(-tail_rate(k) * (x - lambda_)) * t(y);
      }
      break;
    case Region::II:
      for (int m = 0; m < modes_; ++m) {
        const TransverseMode w = transverse_mode(model_, Region::II, m, 1.0);
        sum += w(y) * (alpha()(m) * center_longitudinal(m, false, x, false) +
                       beta()(m) * center_longitudinal(m, true, x, false));
      }
      break;
  }
  return sum;
}

namespace {
Region region_of(double x, double delta) {
  if (x < -delta) return Region::I;
  if (x > delta) return Region::III;
  return Region::II;
}
}  // namespace

double EigenField::operator()(double x, double y) const { return evaluate_in(region_of(x, lambda_), x, y); }

double EigenField::dx(double x, double y) const {
  if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("point outside the strip");
  double sum = 0.0;
  switch (region_of(x, lambda_)) {
    case Region::I:
      for (int k = 0; k < modes_; ++k) {
        const TransverseMode t = transverse_mode(model_, Region::I, k, 1.0);
        sum += a()(k) * tail_rate(k) * std::exp(tail_rate(k) * (x + lambda_)) * t(y);
      }
      break;
    case Region::III:
      for (int k = 0; k < modes_; ++k) {
        const TransverseMode t = transverse_mode(model_, Region::III, k, 1.0);
        sum -= b()(k) * tail_rate(k) * std::exp(-tail_rate(k) * (x - lambda_)) * t(y);
      }
      break;
    case Region::II:
      for (int m = 0; m < modes_; ++m) {
        const TransverseMode w = transverse_mode(model_, Region::II, m, 1.0);
        sum += w(y) * (alpha()(m) * center_longitudinal(m, false, x, true) +
                       beta()(m) * center_longitudinal(m, true, x, true));
      }
      break;
  }
  return sum;
}

double EigenField::dy(double x, double y) const {
  if (!(y >= 0.0 && y <= 1.0)) throw std::domain_error("point outside the strip");
  double sum = 0.0;
  switch (region_of(x, lambda_)) {
    case Region::I:
      for (int k = 0; k < modes_; ++k) {
        const TransverseMode t = transverse_mode(model_, Region::I, k, 1.0);
        sum += a()(k) * std::exp(tail_rate(k) * (x + lambda_)) * t.derivative(y);
      }
      break;
    case Region::III:
      for (int k = 0; k < modes_; ++k) {
        const TransverseMode t = transverse_mode(model_, Region::III, k, 1.0);
        sum += b()(k) * std::exp(-tail_rate(k) * (x - lambda_)) * t.derivative(y);
      }
      break;
    case Region::II:
      for (int m = 0; m < modes_; ++m) {
        const TransverseMode w = transverse_mode(model_, Region::II, m, 1.0);
        sum += w.derivative(y) * (alpha()(m) * center_longitudinal(m, false, x, false) +
                                  beta()(m) * center_longitudinal(m, true, x, false));
      }
      break;
  }
  return sum;
}

double EigenField::norm_squared() const {
  double total = 0.0;
  for (int k = 0; k < modes_; ++k) {
    const double kap = tail_rate(k);
    total += (a()(k) * a()(k) + b()(k) * b()(k)) / (2.0 * kap);
  }
  const double delta = lambda_;
  // m = 0: smooth trigonometric functions, 64-point Gauss-Legendre per half.
  {
    static const auto rule = [] {
      // Nodes/weights on [-1, 1] by Newton iteration on Legendre polynomials.
      constexpr int n = 64;
      std::vector<std::pair<double, double>> r(n);
      for (int i = 0; i < n; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
          double p0 = 1.0, p1 = z;
          for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
          }
          dp = n * (z * p1 - p0) / (z * z - 1.0);
          const double dz = p1 / dp;
          z -= dz;
          if (std::abs(dz) < 1e-16) break;
        }
        r[i] = {z, 2.0 / ((1.0 - z * z) * dp * dp)};
      }
      return r;
    }();
    double s = 0.0;
    for (const auto& [z, w] : rule) {
      const double x = delta * z;
      const double v = alpha()(0) * center_longitudinal(0, false, x, false) +
                       beta()(0) * center_longitudinal(0, true, x, false);
      s += w * v * v;
    }
    total += delta * s;
  }
  for (int m = 1; m < modes_; ++m) {
    const double g = center_rate(m);
    const double u = 2.0 * g * delta;
    const double eu = std::exp(-u);
    // int_{-delta}^{delta} cosh^2(g x) / cosh^2(g delta) dx
    const double cc = (4.0 * delta * eu + (1.0 - eu * eu) / g) / ((1.0 + eu) * (1.0 + eu));
    // int_{-delta}^{delta} sinh^2(g x) / sinh^2(g delta) dx
    const double ss = ((1.0 - eu * eu) / g - 4.0 * delta * eu) / ((1.0 - eu) * (1.0 - eu));
    total += alpha()(m) * alpha()(m) * cc + beta()(m) * beta()(m) * ss;
  }
  return total;
}

EigenField solve_coefficients(const MatchingSystem& system) {
  const Eigen::VectorXd scales = column_scales(system.matrix);
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(system.matrix * scales.cwiseInverse().asDiagonal(),
                                           Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const Eigen::Index last = sv.size() - 1;
  if (!(sv(last) < 1e-6))
    throw ConvergenceError("matching matrix is not singular at this energy (sigma_min = " + std::to_string(sv(last)) +
                           "); root not converged");
  Eigen::VectorXd c = svd.matrixV().col(last).cwiseQuotient(scales);
  Eigen::Index imax = 0;
  c.cwiseAbs().maxCoeff(&imax);
  if (c(imax) < 0.0) c = -c;

  const double e_nd = system.energy * system.geometry.d() * system.geometry.d();
  EigenField field(system.model, system.geometry.lambda(), system.modes, e_nd, c);
  const double norm = std::sqrt(field.norm_squared());
  field = EigenField(system.model, system.geometry.lambda(), system.modes, e_nd, c / norm);
  field.sigma_min = sv(last);
  field.sigma_second = sv(last - 1);
  field.possibly_degenerate = field.sigma_second < 1e3 * field.sigma_min;
  return field;
}

double evaluate_field(const EigenField& field, double x, double y) { return field(x, y); }

EigenField eigenfield(const Spectrum& spectrum, std::size_t branch) {
  if (branch >= spectrum.size()) throw std::out_of_range("requested branch is not present in the spectrum");
  const double energy = spectrum.eigenvalues[branch] * spectrum.geometry.mu();
  return solve_coefficients(assemble(spectrum.model, spectrum.geometry, spectrum.modes, energy));
}

ConvergenceStudy convergence_study(ModelKind model, const Geometry& geometry, std::span<const int> modes,
                                   std::size_t branch) {
  if (modes.size() < 3) throw std::invalid_argument("convergence study needs at least three truncations");
  ScanOptions opt;
  opt.check_stability = false;
  ConvergenceStudy out;
  for (const int n : modes) {
    const Spectrum s = scan_spectrum(model, geometry, n, opt);
    if (branch < s.size()) {
      out.modes.push_back(n);
      out.eigenvalues.push_back(s.eigenvalues[branch]);
    }
  }
  if (out.eigenvalues.size() < 2) throw ConvergenceError("fewer than two resolved eigenvalue estimates");
  for (std::size_t i = 0; i + 1 < out.eigenvalues.size(); ++i)
    out.differences.push_back(std::abs(out.eigenvalues[i] - out.eigenvalues[i + 1]));
  if (out.differences.size() < 2) {
    out.order = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(out.differences.size());
  for (std::size_t i = 0; i < out.differences.size(); ++i) {
    const double lx = std::log(static_cast<double>(out.modes[i]));
    const double ly = std::log(std::max(out.differences[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.order = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
  return out;
}

}  // namespace wavebound
