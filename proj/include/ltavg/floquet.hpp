#pragma once

#include <array>
#include <complex>
#include <vector>

#include "ltavg/model.hpp"
#include "ltavg/verdict.hpp"

namespace ltavg {

/// Truncated Hill determinant as a polynomial in the characteristic exponent.
/// Simplified is the r = g = 0, nearest-mode quartic; General is the full
/// three-mode (n in {-1, 0, 1}) determinant over both complex branches,
/// degree 12.
struct HillDeterminant {
  enum class Variant { Simplified, General };
  Variant variant = Variant::Simplified;
  std::vector<std::complex<double>> coeffs;  // ascending powers of mu
  OscillatorParams params;
};

struct FloquetSpectrum {
  std::vector<std::complex<double>> mu_roots;
  std::vector<double> growth_rates;  // physical amplitude rates, 1/time
  double max_growth = 0.0;
  bool unstable = false;
};

struct MonodromySpectrum {
  std::array<std::complex<double>, 2> multipliers;
  double period = 0.0;
};

/// Complex damped-Mathieu branch x'' + w0^2(1 + h sin(gt))x + w0*loss*x' = 0
/// obtained from the change of basis x1 +/- i x2; loss = g +/- i r.
struct BranchSystem {
  std::complex<double> loss;
  OscillatorParams params;
};

/// The two decoupled branches at phi = 0; throws for phi != 0.
std::array<BranchSystem, 2> decouple(const OscillatorParams& p);

HillDeterminant simplified_determinant(const OscillatorParams& p);

/// Degree-12 determinant built from D_{+-,n}(mu) = w0^2 - (n g - mu)^2
/// + i w0 (g +- i r)(n g - mu) with couplings +- i h w0^2 / 2; phi must be 0.
HillDeterminant general_determinant(const OscillatorParams& p);

/// Companion-matrix roots plus growth rates. The general determinant is built
/// at the physical-amplitude level so its growth rate is Im(mu) directly; the
/// simplified variant ignores damping in the determinant and subtracts the
/// g w0 / 2 prefactor rate instead.
FloquetSpectrum roots(const HillDeterminant& det);

/// Monodromy matrix of the prefactor-free branch equation over one drive
/// period, integrated at tolerance 1e-10; branch_sign selects g + i r (+1)
/// or g - i r (-1). Requires gamma != 0.
MonodromySpectrum monodromy(const OscillatorParams& p, int branch_sign);

/// Physical growth rate from the monodromy multipliers, max over branches:
/// ln|lambda|_max / T - g w0 / 2.
double monodromy_max_growth(const OscillatorParams& p);

/// Stability label from a Hill determinant (never indeterminate).
StabilityLabel floquet_label(const HillDeterminant& det);

}  // namespace ltavg
