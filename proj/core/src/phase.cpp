#include "irs/phase.hpp"

#include <cmath>

namespace irs {

PhaseResolution PhaseResolution::levels(int count) {
  if (count < 1) throw std::invalid_argument("phase level count must be >= 1");
  return PhaseResolution(count);
}

PhaseResolution PhaseResolution::bits(int q) {
  if (q < 0 || q > 24) throw std::invalid_argument("phase resolution bits must be in [0, 24]");
  if (q == 0) return continuous();
  return PhaseResolution(1 << q);
}

int PhaseResolution::bits() const {
  if (levels_ == 0) return 0;
  if ((levels_ & (levels_ - 1)) != 0) return -1;
  int q = 0;
  while ((1 << q) < levels_) ++q;
  return q;
}

double PhaseResolution::level_angle(int index) const {
  return kTwoPi * static_cast<double>(index) / static_cast<double>(levels_);
}

int PhaseResolution::nearest_level(double angle) const {
  if (levels_ == 0) throw std::logic_error("nearest_level on continuous resolution");
  const double x = wrap_angle(angle) * levels_ / kTwoPi;
  const int lo = static_cast<int>(std::floor(x)) % levels_;
  const int hi = (lo + 1) % levels_;
  const double frac = x - std::floor(x);
  if (frac < 0.5) return lo;
  if (frac > 0.5) return hi;
  return std::min(lo, hi);
}

Complex PhaseResolution::quantize(Complex z) const {
  const double angle = (z == Complex(0.0, 0.0)) ? 0.0 : std::arg(z);
  if (levels_ == 0) return std::polar(1.0, angle);
  return std::polar(1.0, level_angle(nearest_level(angle)));
}

bool PhaseResolution::on_grid(Complex z, double tol) const {
  if (std::abs(std::abs(z) - 1.0) > 1e-9) return false;
  if (levels_ == 0) return true;
  const double a = std::arg(z);
  return angle_distance(a, level_angle(nearest_level(a))) <= tol;
}

std::string PhaseResolution::to_string() const {
  if (levels_ == 0) return "inf";
  const int q = bits();
  return q >= 0 ? std::to_string(q) : "L" + std::to_string(levels_);
}

void PhaseConfig::check() const {
  for (Eigen::Index n = 0; n < v.size(); ++n) {
    const double mag = std::abs(v(n));
    if (amplitude == AmplitudeMode::unit) {
      if (std::abs(mag - 1.0) > 1e-9)
        throw NumericalError("unit-amplitude phase config has |v_n| != 1");
      if (!resolution.on_grid(v(n)))
        throw NumericalError("phase config entry is off the discrete grid");
    } else if (mag > 1.0 + 1e-9) {
      throw NumericalError("relaxed-amplitude phase config has |v_n| > 1");
    }
  }
}

double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a = 0.0;
  return a;
}

double angle_distance(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

CVector all_ones_phase(Eigen::Index n) { return CVector::Ones(n); }

}  // namespace irs
