#include "wavebound/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "wavebound/errors.hpp"
#include "wavebound/root_finding.hpp"

namespace wavebound {

double SweepResult::branch_value(std::size_t i, std::size_t branch) const {
  const Spectrum& s = spectra.at(i);
  std::size_t seen = 0;
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    if (!s.stable[k]) continue;
    if (seen == branch) return s.eigenvalues[k];
    ++seen;
  }
  return 1.0;
}

std::size_t SweepResult::max_branches() const noexcept {
  std::size_t n = 0;
  for (const auto& s : spectra) n = std::max(n, s.stable_count());
  return n;
}

SweepResult sweep(ModelKind model, std::span<const double> lambdas, int modes, const ScanOptions& options, int jobs) {
  if (lambdas.empty()) throw std::invalid_argument("sweep needs at least one lambda");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw std::invalid_argument("sweep lambdas must be positive");
    if (i > 0 && !(lambdas[i] > lambdas[i - 1])) throw std::invalid_argument("sweep grid must be strictly increasing");
  }
  SweepResult out;
  out.model = model;
  out.modes = modes;
  out.lambdas.assign(lambdas.begin(), lambdas.end());
  out.spectra.resize(lambdas.size());

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      try {
        out.spectra[i] = scan_spectrum(model, Geometry::from_lambda(lambdas[i]), modes, options);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(lambdas.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> lambda_grid(double lo, double hi, double step) {
  if (!(lo > 0.0 && hi >= lo && step > 0.0)) throw std::invalid_argument("lambda range needs 0 < lo <= hi, step > 0");
  std::vector<double> out;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Corner> switch_points(ModelKind model, double lambda) {
  if (model == ModelKind::A) return {{-lambda, Wall::Bottom}, {lambda, Wall::Top}};
  return {{-lambda, Wall::Top}, {lambda, Wall::Top}};
}

std::vector<double> default_corner_radii() {
  constexpr int kCount = 12;
  constexpr double kLo = 0.02;
  constexpr double kHi = 0.2;
  std::vector<double> r;
  for (int i = 0; i < kCount; ++i) r.push_back(kLo * std::pow(kHi / kLo, static_cast<double>(i) / (kCount - 1)));
  return r;
}

CornerFit corner_exponent(const std::function<double(double, double)>& field, const Corner& corner,
                          std::span<const double> radii) {
  if (radii.size() < 8) throw std::invalid_argument("corner fit needs at least 8 radii");
  for (const double r : radii)
    if (!(r >= 1e-3 * (1 - 1e-12) && r <= 0.2 * (1 + 1e-12)))
      throw std::invalid_argument("corner radii must lie in [1e-3 d, 0.2 d]");
  std::vector<double> lx;
  std::vector<double> ly;
  for (const double r : radii) {
    const double y = corner.wall == Wall::Bottom ? r : 1.0 - r;
    const double v = std::abs(field(corner.x, y));
    if (!(v >= 1e-10)) throw std::domain_error("field vanishes along the corner ray (nodal line)");
    lx.push_back(std::log(r));
    ly.push_back(std::log(v));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("corner radii must not all coincide");
  CornerFit fit;
  fit.exponent = sxy / sxx;
  fit.fit_quality = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

CornerFit corner_exponent(const EigenField& field, const Corner& corner, std::span<const double> radii) {
  const auto corners = switch_points(field.model(), field.lambda());
  const bool known = std::any_of(corners.begin(), corners.end(), [&](const Corner& c) {
    return c.wall == corner.wall && std::abs(c.x - corner.x) <= 1e-12 * std::max(1.0, field.lambda());
  });
  if (!known) throw std::invalid_argument("point is not a boundary-condition switch point of the model");
  const Region outer = corner.x < 0.0 ? Region::I : Region::III;
  auto value = [&](double x, double y) {
    return 0.5 * (field.evaluate_in(outer, x, y) + field.evaluate_in(Region::II, x, y));
  };
  return corner_exponent(value, corner, radii);
}

// ---------------------------------------------------------------------------

namespace {

std::size_t branch_limit(const SweepResult& sweep, std::size_t branches) {
  return branches == 0 ? sweep.max_branches() : branches;
}

std::string describe(const char* what, std::size_t branch, double lambda, double rho, double margin) {
  std::ostringstream os;
  os << what << ": branch " << branch + 1 << " lambda=" << lambda << " rho=" << rho << " margin=" << margin;
  return os.str();
}

/// Linear interpolation of a branch at lambda, with an error estimate from
/// the second difference of the neighbouring grid values.
std::pair<double, double> interpolate_branch(const SweepResult& sweep, std::size_t branch, double lambda) {
  const auto& g = sweep.lambdas;
  const double scale = std::max(1.0, std::abs(lambda));
  if (lambda < g.front() - 1e-12 * scale || lambda > g.back() + 1e-12 * scale)
    throw std::out_of_range("lambda outside the sweep grid");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (std::abs(g[i] - lambda) <= 1e-12 * scale) return {sweep.branch_value(i, branch), 0.0};
  const auto upper = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), lambda) - g.begin());
  const std::size_t j = upper - 1;
  const double t = (lambda - g[j]) / (g[j + 1] - g[j]);
  const double v0 = sweep.branch_value(j, branch);
  const double v1 = sweep.branch_value(j + 1, branch);
  const double value = (1.0 - t) * v0 + t * v1;
  // |f''| h^2 / 8 bound, f'' from the nearest available three-point stencil.
  double err = std::abs(v1 - v0);
  if (g.size() >= 3) {
    const std::size_t c = std::clamp<std::size_t>(j, 1, g.size() - 2);
    const double hl = g[c] - g[c - 1];
    const double hr = g[c + 1] - g[c];
    const double second = 2.0 *
                          ((sweep.branch_value(c + 1, branch) - sweep.branch_value(c, branch)) / hr -
                           (sweep.branch_value(c, branch) - sweep.branch_value(c - 1, branch)) / hl) /
                          (hl + hr);
    const double h = g[j + 1] - g[j];
    err = std::min(err, std::abs(second) * h * h / 8.0 * 2.0);
  }
  return {value, err};
}

void check_pair(const SweepResult& sweep, double lambda, double rho, std::size_t branches, double tol,
                ScalingReport& report) {
  for (std::size_t n = 0; n < branches; ++n) {
    const auto [base, base_err] = interpolate_branch(sweep, n, lambda);
    const auto [scaled, scaled_err] = interpolate_branch(sweep, n, lambda * rho);
    const double allowance = tol + base_err + scaled_err;
    const double lower_margin = scaled - base / (rho * rho);
    const double upper_margin = base - scaled;
    ++report.checked;
    report.worst_margin = std::min({report.worst_margin, lower_margin, upper_margin});
    if (lower_margin < -allowance) {
      report.ok = false;
      report.violations.push_back(describe("mu(lambda)/rho^2 > mu(lambda rho)", n, lambda, rho, lower_margin));
    }
    if (upper_margin < -allowance) {
      report.ok = false;
      report.violations.push_back(describe("mu(lambda rho) > mu(lambda)", n, lambda, rho, upper_margin));
    }
  }
}

}  // namespace

MonotonicityReport monotonicity_check(const SweepResult& sweep, std::size_t branches, double tol) {
  if (sweep.lambdas.size() < 5) throw std::invalid_argument("monotonicity check needs at least 5 grid points");
  MonotonicityReport report;
  const std::size_t nb = branch_limit(sweep, branches);
  for (std::size_t n = 0; n < nb; ++n) {
    for (std::size_t i = 0; i + 1 < sweep.lambdas.size(); ++i) {
      const double rise = sweep.branch_value(i + 1, n) - sweep.branch_value(i, n);
      if (rise > tol) {
        report.ok = false;
        report.violations.push_back({n, i, rise});
      }
    }
  }
  return report;
}

ScalingReport scaling_check(const SweepResult& sweep, double rho, std::size_t branches, double tol) {
  if (!(rho >= 1.0)) throw std::invalid_argument("scaling check needs rho >= 1");
  ScalingReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  const std::size_t nb = branch_limit(sweep, branches);
  const double top = sweep.lambdas.back() * (1.0 + 1e-12);
  for (const double lambda : sweep.lambdas)
    if (lambda * rho <= top) check_pair(sweep, lambda, rho, nb, tol, report);
  if (report.checked == 0) throw std::out_of_range("no grid lambda has its image lambda rho inside the grid");
  return report;
}

ScalingReport scaling_check_at(const SweepResult& sweep, double lambda, double rho, std::size_t branches, double tol) {
  if (!(rho >= 1.0)) throw std::invalid_argument("scaling check needs rho >= 1");
  ScalingReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  check_pair(sweep, lambda, rho, branch_limit(sweep, branches), tol, report);
  return report;
}

// ---------------------------------------------------------------------------

bool has_bound_states(ModelKind model, double lambda, std::size_t count, int modes, const ScanOptions& options) {
  const Spectrum s = scan_spectrum(model, Geometry::from_lambda(lambda), modes, options);
  return s.count_below(kEmergenceCutoff) >= count;
}

Emergence emergence_point(ModelKind model, std::size_t m, double lo, double hi, int modes, double tol,
                          const ScanOptions& options) {
  if (m < 1) throw std::invalid_argument("branch index is 1-based");
  if (!(lo > 0.0 && hi > lo && tol > 0.0)) throw std::invalid_argument("emergence search needs 0 < lo < hi, tol > 0");
  auto pred = [&](double lambda) { return has_bound_states(model, lambda, m, modes, options); };
  if (pred(lo) || !pred(hi)) {
    std::ostringstream os;
    os << "bound state " << m << " does not emerge inside [" << lo << ", " << hi << "]";
    throw ConvergenceError(os.str());
  }
  const auto [a, b] = bisect_predicate(pred, lo, hi, tol);
  return {m, 0.5 * (a + b), a, b};
}

}  // namespace wavebound
