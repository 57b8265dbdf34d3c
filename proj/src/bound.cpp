#include "ltavg/bound.hpp"

#include <chrono>

namespace ltavg {

Verdict classify(const OscillatorParams& params, int dv, int ds, const ClassifyPolicy& policy) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  v.method = "sos";
  const bool tie_ds = (ds == dv - 2);
  int dv_cur = dv, ds_cur = ds;
  char note[96];
  while (true) {
    SosProgram prog = make_program(params, dv_cur, ds_cur, policy.sos);
    prog.fixed_bound = policy.stable_threshold;
    AssembledSdp a = assemble(prog);
    SdpSolution sol = solve(a.problem, policy.solver);
    v.dv = dv_cur;
    v.ds = ds_cur;
    const bool last = !policy.escalate || dv_cur + 2 > policy.dv_max;
    if (sol.status == SolveStatus::Optimal) {
      const double lambda = -sol.objective;
      snprintf(note, sizeof note, "%s lambda=%.3e", to_string(sol.status).c_str(), lambda);
      v.detail = note;
      if (lambda >= policy.lambda_stable) {
        v.label = StabilityLabel::Stable;
        v.bound_value = policy.stable_threshold;
        break;
      }
      if (last) {
        v.label = lambda <= policy.lambda_unstable ? StabilityLabel::Unstable
                                                   : StabilityLabel::Indeterminate;
        break;
      }
    } else if (sol.status == SolveStatus::PrimalInfeasible && last) {
      // No certificate of any scale at the top degree.
      v.detail = to_string(sol.status);
      v.label = StabilityLabel::Unstable;
      break;
    } else {
      v.detail = to_string(sol.status);
      if (last) {
        v.label = StabilityLabel::Indeterminate;
        break;
      }
    }
    dv_cur += 2;
    if (tie_ds) ds_cur = dv_cur - 2;
  }
  v.wall_time =
      std::chrono::duration_cast<std::chrono::duration<double>>(std::chrono::steady_clock::now() - t0)
          .count();
  return v;
}

std::vector<Verdict> bound_curve(std::span<const OscillatorParams> params, int dv, int ds,
                                 const ClassifyPolicy& policy) {
  if (params.empty()) throw std::invalid_argument("bound_curve: empty parameter list");
  std::vector<Verdict> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(classify(p, dv, ds, policy));
  return out;
}

nlohmann::json verdict_to_json(const OscillatorParams& p, const Verdict& v) {
  nlohmann::json j;
  j["params"] = {{"omega0", p.omega0}, {"g", p.g},       {"r", p.r},
                 {"h", p.h},           {"gamma", p.gamma}, {"phi", p.phi}};
  j["label"] = to_string(v.label);
  if (v.bound_value)
    j["bound"] = *v.bound_value;
  else
    j["bound"] = nullptr;
  j["method"] = v.method;
  j["dv"] = v.dv;
  j["ds"] = v.ds;
  j["wall_time"] = v.wall_time;
  j["detail"] = v.detail;
  return j;
}

}  // namespace ltavg
