#pragma once

#include <string>

#include "json.hpp"
#include "ltavg/bound.hpp"
#include "ltavg/dns.hpp"
#include "ltavg/model.hpp"
#include "ltavg/sdp.hpp"
#include "ltavg/sos.hpp"
#include "ltavg/sweep.hpp"

namespace ltavg {

/// Everything the CLI needs to run a command. Values come from defaults,
/// then a JSON config file, then command-line flags, in that order.
struct RunConfig {
  double omega0 = 1.0, g = 0.01, r = 0.2, phi = 0.0;
  double gamma_lo = -3.0, gamma_hi = 3.0;
  double h_lo = 0.0, h_hi = 1.0;
  int nx = 80, ny = 80;
  std::string method = "sos";
  std::string variant = "general";  // floquet subcommand
  int dv = 8, ds = 6;
  int dv_max = 10;
  bool escalate = true;
  double stable_threshold = 1e-3, blowup_threshold = 1e3;
  SolverSettings solver;
  DnsSettings dns;
  std::string symmetry = "auto";  // auto | parity | none
  bool aux_in_sos = true;
  double aux_trace_bound = 1.0;
  bool multiplier_in_sos = false;
  bool force_explicit_multiplier = false;
  double lambda_stable = 1e-5;
  double lambda_unstable = 1e-7;
  double tongue_h_threshold = 0.5;
  double tongue_window_lo = 1.5, tongue_window_hi = 2.5;
  std::string out_dir;
  unsigned long seed = 12345;
  int threads = 0;

  RunConfig() {
    solver.tol_feas_soft = 1e-6;
    solver.tol_gap_soft = 1e-5;
  }

  OscillatorParams params(double gamma, double h) const;
  ClassifyPolicy policy() const;
  SweepSettings sweep_settings() const;
};

/// Strict JSON ingestion: unknown keys are rejected with their path.
void apply_json(RunConfig& cfg, const nlohmann::json& j);
RunConfig load_config(const std::string& path);

}  // namespace ltavg
