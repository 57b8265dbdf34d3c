#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltavg/bound.hpp"
#include "ltavg/dns.hpp"
#include "ltavg/floquet.hpp"
#include "ltavg/model.hpp"
#include "ltavg/verdict.hpp"

namespace ltavg {

enum class SweepMethod { Sos, FloquetGeneral, FloquetSimplified, Dns };

SweepMethod parse_method(const std::string& name);
std::string to_string(SweepMethod m);

struct SweepSettings {
  SweepMethod method = SweepMethod::FloquetGeneral;
  int dv = 8, ds = 6;
  ClassifyPolicy policy;
  DnsSettings dns;
  int threads = 0;  // 0: LTAVG_THREADS env or hardware concurrency
  bool dns_tiebreak = true;
  unsigned long seed = 12345;
};

/// Per-point classification over a (gamma, h) grid; verdicts stored row-major
/// with h as the fast-varying index resolved through at().
struct SweepGrid {
  std::vector<double> gamma_axis;
  std::vector<double> h_axis;
  std::vector<Verdict> verdicts;  // index (ix, iy) -> ix * ny + iy
  std::string method;
  OscillatorParams base;  // omega0, g, r, phi

  int nx() const { return static_cast<int>(gamma_axis.size()); }
  int ny() const { return static_cast<int>(h_axis.size()); }
  const Verdict& at(int ix, int iy) const { return verdicts[ix * ny() + iy]; }
  Verdict& at(int ix, int iy) { return verdicts[ix * ny() + iy]; }
};

SweepGrid run_sweep(const OscillatorParams& base, double gamma_lo, double gamma_hi, double h_lo,
                    double h_hi, int nx, int ny, const SweepSettings& settings);

/// Stability-boundary polyline in (gamma, h) coordinates.
struct BoundaryPolyline {
  std::vector<std::array<double, 2>> vertices;
};

/// Marching squares on the binary stable/unstable field. Throws if any cell
/// is Indeterminate; resolve or mask them first.
std::vector<BoundaryPolyline> extract_boundary(const SweepGrid& grid);

/// Bisection in h at fixed gamma; the bracket must classify (h_lo stable,
/// h_hi unstable). Returns the boundary h within tol_h.
double refine_boundary(const OscillatorParams& base, double gamma, double h_lo, double h_hi,
                       const SweepSettings& settings, double tol_h = 1e-3);

struct CompareReport {
  std::array<std::array<int, 3>, 3> counts{};  // [labelA][labelB]
  std::vector<std::array<int, 2>> exceptions;  // A unstable, B stable cells
  double exception_ratio = 0.0;                // exceptions / |A unstable|
  int a_unstable = 0;
};

/// Cell-by-cell disagreement report; also checks A_unstable within B_unstable.
CompareReport compare(const SweepGrid& a, const SweepGrid& b);

struct TongueReport {
  int count = 0;
  std::vector<double> gamma_minima;  // argmin gamma of each dip
};

/// Number of connected dips of the instability-onset curve min_h(gamma)
/// below h_threshold, over gamma in [gamma_lo, gamma_hi].
TongueReport count_tongues(const SweepGrid& grid, double gamma_lo, double gamma_hi,
                           double h_threshold);

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, bool include_time = true);
void write_boundary_csv(std::ostream& os, const std::vector<BoundaryPolyline>& lines);

struct SvgMarker {
  double gamma, h;
  std::string kind;  // "circle" | "cross"
};
void write_boundary_svg(std::ostream& os, const SweepGrid& grid,
                        const std::vector<BoundaryPolyline>& lines,
                        const std::vector<SvgMarker>& markers = {});

/// Worker count from settings/threads, the LTAVG_THREADS env var, or hardware.
int resolve_thread_count(int requested);

}  // namespace ltavg
