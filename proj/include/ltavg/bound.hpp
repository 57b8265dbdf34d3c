#pragma once

#include <span>
#include <vector>

#include "json.hpp"
#include "ltavg/dns.hpp"
#include "ltavg/model.hpp"
#include "ltavg/sdp.hpp"
#include "ltavg/sos.hpp"
#include "ltavg/verdict.hpp"

namespace ltavg {

struct ClassifyPolicy {
  int dv_max = 10;
  double stable_threshold = 1e-3;  // certified bound U0 on the long-time average
  double blowup_threshold = 1e3;
  // Certificate-scale thresholds of the normalized program (see SosProgram):
  // lambda at or above lambda_stable certifies the bound; lambda at or below
  // lambda_unstable after full escalation is the no-certificate signal.
  double lambda_stable = 1e-5;
  double lambda_unstable = 1e-7;
  bool escalate = true;  // retry with dV + 2 on ambiguous outcomes
  SolverSettings solver;
  SosOptions sos;

  ClassifyPolicy() {
    solver.tol_feas_soft = 1e-6;
    solver.tol_gap_soft = 1e-5;
  }
};

/// Runs the bounding method at one parameter point: assemble the normalized
/// certificate program, solve, and map the outcome to a stability verdict
/// with degree escalation. Stable needs a certificate scale above
/// lambda_stable; Unstable needs the certificate to vanish (no finite bound)
/// after escalation to dv_max; everything else is Indeterminate.
Verdict classify(const OscillatorParams& params, int dv, int ds, const ClassifyPolicy& policy = {});

/// Order-preserving batch classification.
std::vector<Verdict> bound_curve(std::span<const OscillatorParams> params, int dv, int ds,
                                 const ClassifyPolicy& policy = {});

nlohmann::json verdict_to_json(const OscillatorParams& params, const Verdict& v);

}  // namespace ltavg
