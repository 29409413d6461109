#include "wavebound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wavebound/modematch.hpp"

namespace wavebound {

StateCountBounds state_count_bounds(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be positive");
  const int upper = static_cast<int>(-std::floor(-lambda));
  return {upper - 1, upper};
}

Window eigenvalue_window(int m, double lambda) {
  if (m < 1) throw std::invalid_argument("eigenvalue index m must be >= 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  const double lo = (m - 1) / lambda;
  const double hi = m / lambda;
  Window w{lo * lo, hi * hi, false};
  if (w.upper >= 1.0) {
    w.upper = 1.0;
    w.vacuous = true;
  }
  return w;
}

std::pair<double, double> critical_lambda_window(int m) {
  if (m < 1) throw std::invalid_argument("eigenvalue index m must be >= 1");
  return {static_cast<double>(m - 1), static_cast<double>(m)};
}

BracketReport bracket_report(double lambda) {
  BracketReport r;
  r.lambda = lambda;
  r.counts = state_count_bounds(lambda);
  for (int m = 1; m <= std::max(1, r.counts.n_max); ++m) r.windows.push_back(eigenvalue_window(m, lambda));
  return r;
}

BracketCheck check_brackets(double lambda, std::span<const double> eigenvalues, double slack) {
  BracketCheck out;
  const StateCountBounds b = state_count_bounds(lambda);
  const int count = static_cast<int>(eigenvalues.size());
  if (count < b.n_min || count > b.n_max) {
    std::ostringstream msg;
    msg << "lambda=" << lambda << ": " << count << " eigenvalues outside [" << b.n_min << ", " << b.n_max << "]";
    out.violations.push_back(msg.str());
  }
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const Window w = eigenvalue_window(static_cast<int>(i) + 1, lambda);
    const double v = eigenvalues[i];
    if (v < w.lower - slack || v > w.upper + slack) {
      std::ostringstream msg;
      msg << "lambda=" << lambda << ": mu_" << i + 1 << "/mu=" << v << " outside [" << w.lower << ", " << w.upper
          << "]";
      out.violations.push_back(msg.str());
    }
  }
  out.ok = out.violations.empty();
  return out;
}

BracketCheck check_brackets(const Spectrum& spectrum, double slack) {
  std::vector<double> stable;
  for (std::size_t i = 0; i < spectrum.size(); ++i)
    if (spectrum.stable[i]) stable.push_back(spectrum.eigenvalues[i]);
  const double lambda = spectrum.geometry.lambda();
  BracketCheck out = check_brackets(lambda, stable, slack);
  if (!spectrum.all_stable()) {
    // Unstable roots leave the count undetermined; keep only window checks.
    const StateCountBounds b = state_count_bounds(lambda);
    const int count = static_cast<int>(stable.size());
    if (count < b.n_min || count > b.n_max) {
      std::erase_if(out.violations, [](const std::string& s) { return s.find("eigenvalues outside") != std::string::npos; });
    }
    out.ok = out.violations.empty();
  }
  return out;
}

}  // namespace wavebound
