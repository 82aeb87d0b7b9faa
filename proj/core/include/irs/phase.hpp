#pragma once

#include <string>

#include "irs/types.hpp"

namespace irs {

/// Number of uniformly spaced phase levels per reflecting element.
/// A level count of zero denotes continuous phases.
class PhaseResolution {
 public:
  static PhaseResolution continuous() { return PhaseResolution(0); }
  static PhaseResolution levels(int count);
  /// Q control bits, L = 2^Q. Q = 0 encodes the continuous case.
  static PhaseResolution bits(int q);

  bool is_continuous() const { return levels_ == 0; }
  int level_count() const { return levels_; }
  /// Q for power-of-two level counts, 0 for continuous, -1 otherwise.
  int bits() const;

  /// Phase of grid level `index`, i.e. 2*pi*index/L.
  double level_angle(int index) const;
  /// Index of the grid level nearest to `angle` under wrap-around distance.
  /// Exact ties resolve to the lowest index.
  int nearest_level(double angle) const;
  /// Unit-modulus phasor nearest to the angle of `z` (z = 0 maps to angle 0).
  Complex quantize(Complex z) const;
  bool on_grid(Complex z, double tol = 1e-12) const;

  std::string to_string() const;

  friend bool operator==(PhaseResolution a, PhaseResolution b) { return a.levels_ == b.levels_; }

 private:
  explicit PhaseResolution(int levels) : levels_(levels) {}
  int levels_;
};

enum class AmplitudeMode { unit, relaxed };

/// IRS reflection vector. Stores v = diag(conj(Theta)), the conjugated
/// reflection coefficients.
struct PhaseConfig {
  CVector v;
  PhaseResolution resolution = PhaseResolution::continuous();
  AmplitudeMode amplitude = AmplitudeMode::unit;

  Eigen::Index size() const { return v.size(); }
  /// Throws NumericalError if the amplitude or grid invariants are broken.
  void check() const;
};

/// Wrap an angle to [0, 2*pi).
double wrap_angle(double angle);
/// Distance between two angles on the circle, in [0, pi].
double angle_distance(double a, double b);

CVector all_ones_phase(Eigen::Index n);

}  // namespace irs
