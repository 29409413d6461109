#include "wavebound/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wavebound {

namespace {
constexpr double kPi = std::numbers::pi;

bool is_tail(ProfileKind kind) { return kind != ProfileKind::NNCosine; }
}  // namespace

std::string to_string(ModelKind model) { return model == ModelKind::A ? "A" : "B"; }

ModelKind parse_model(std::string_view text) {
  if (text == "A" || text == "a") return ModelKind::A;
  if (text == "B" || text == "b") return ModelKind::B;
  throw std::invalid_argument("unknown model '" + std::string(text) + "' (expected A or B)");
}

Geometry::Geometry(double d, double delta) : d_(d), delta_(delta) {
  if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("strip width d must be positive");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("half window delta must be positive");
}

Geometry Geometry::from_lambda(double lambda, double d) { return Geometry(d, lambda * d); }

double Geometry::mu() const noexcept { return kPi * kPi / (4.0 * d_ * d_); }

double TransverseMode::wavenumber_factor() const noexcept {
  return is_tail(kind) ? index + 0.5 : static_cast<double>(index);
}

double TransverseMode::transverse_eigenvalue() const noexcept {
  const double k = wavenumber_factor() * kPi / width;
  return k * k;
}

double TransverseMode::operator()(double y) const noexcept {
  const double arg = wavenumber_factor() * kPi * y / width;
  switch (kind) {
    case ProfileKind::DNSine:
      return std::sqrt(2.0 / width) * std::sin(arg);
    case ProfileKind::NDCosine:
      return std::sqrt(2.0 / width) * std::cos(arg);
    case ProfileKind::NNCosine:
      return index == 0 ? std::sqrt(1.0 / width) : std::sqrt(2.0 / width) * std::cos(arg);
  }
  return 0.0;
}

double TransverseMode::derivative(double y) const noexcept {
  const double k = wavenumber_factor() * kPi / width;
  const double arg = k * y;
  switch (kind) {
    case ProfileKind::DNSine:
      return std::sqrt(2.0 / width) * k * std::cos(arg);
    case ProfileKind::NDCosine:
      return -std::sqrt(2.0 / width) * k * std::sin(arg);
    case ProfileKind::NNCosine:
      return index == 0 ? 0.0 : -std::sqrt(2.0 / width) * k * std::sin(arg);
  }
  return 0.0;
}

ProfileKind profile_kind(ModelKind model, Region region) {
  if (region == Region::II) return ProfileKind::NNCosine;
  if (model == ModelKind::A && region == Region::I) return ProfileKind::DNSine;
  return ProfileKind::NDCosine;
}

TransverseMode transverse_mode(ModelKind model, Region region, int index, double d) {
  if (index < 0) throw std::invalid_argument("mode index must be nonnegative");
  if (!(d > 0.0)) throw std::invalid_argument("mode width must be positive");
  return TransverseMode{region, index, profile_kind(model, region), d};
}

double decay_rate(const TransverseMode& mode, double energy) {
  const double gap = mode.transverse_eigenvalue() - energy;
  if (!(gap > 0.0))
    throw std::domain_error("energy at or above the transverse eigenvalue: mode is not evanescent");
  return std::sqrt(gap);
}

double overlap_dn_nn(int k, int m) noexcept {
  const double nu = k + 0.5;
  if (m == 0) return std::sqrt(2.0) / (nu * kPi);
  return (2.0 * nu / kPi) / (nu * nu - static_cast<double>(m) * m);
}

double overlap_nd_nn(int k, int m) noexcept {
  const double sign = ((k + m) % 2 == 0) ? 1.0 : -1.0;
  return sign * overlap_dn_nn(k, m);
}

double overlap(const TransverseMode& tail, const TransverseMode& center) {
  if (!is_tail(tail.kind)) throw std::invalid_argument("overlap: first mode must be a tail profile");
  if (center.kind != ProfileKind::NNCosine)
    throw std::invalid_argument("overlap: second mode must be a center (Neumann-Neumann) profile");
  if (tail.width != center.width) throw std::invalid_argument("overlap: mismatched strip widths");
  return tail.kind == ProfileKind::DNSine ? overlap_dn_nn(tail.index, center.index)
                                          : overlap_nd_nn(tail.index, center.index);
}

}  // namespace wavebound
