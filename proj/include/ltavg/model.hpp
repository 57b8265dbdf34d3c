#pragma once

#include <string>
#include <vector>

#include "ltavg/poly.hpp"
#include "ltavg/symmetry.hpp"

namespace ltavg {

/// Physical parameters of the parametrically driven coupled oscillator pair.
struct OscillatorParams {
  double omega0 = 1.0;  // proper frequency (rad/time)
  double g = 0.0;       // intrinsic loss
  double r = 0.0;       // energy-preserving coupling strength
  double h = 0.0;       // drive intensity, in [0, 1]
  double gamma = 0.0;   // drive frequency (rad/time)
  double phi = 0.0;     // phase difference between the oscillators (rad)

  void validate() const;
};

/// Autonomized polynomial vector field plus algebraic constraints that hold
/// along trajectories (here the unit circle carrying the drive phase).
struct PolySystem {
  int nvars = 0;
  std::vector<Polynomial> field;
  std::vector<Polynomial> constraints;
  std::vector<std::string> state_names;

  bool has_circle() const { return !constraints.empty(); }
};

/// Builds the first-order polynomial system for the oscillator pair. State
/// order is (x1, x2, y1, y2, x3, x4) with x3 = sin(gamma t), x4 = cos(gamma t)
/// and constraint x3^2 + x4^2 = 1. When gamma == 0 and phi == 0 the drive
/// never enters and the reduced four-variable system is returned instead.
PolySystem build_system(const OscillatorParams& p);

/// Quantity of interest x1^2 + x2^2 in the given index space (4 or 6 vars).
Polynomial build_phi(int nvars);

struct ResonanceFrequencies {
  double center;  // 2 * Omega_r
  double lower;   // 2 * Omega_r - omega0 * r
  double upper;   // 2 * Omega_r + omega0 * r
};

/// The three potential resonance frequencies 2*Omega_r and 2*Omega_r +/- w0*r,
/// with Omega_r = w0 * sqrt(1 + (r^2 - g^2)/4).
ResonanceFrequencies resonance_frequencies(const OscillatorParams& p);

/// Candidate symmetries of the built system. negate_oscillators is the parity
/// map on (x1, x2, y1, y2); quarter_turn is the order-4 simultaneous rotation
/// of the (x1, x2) and (y1, y2) planes, optionally negating the trig pair.
SignedVarMap negate_oscillators(int nvars);
SignedVarMap quarter_turn(int nvars, bool negate_trig);

}  // namespace ltavg
