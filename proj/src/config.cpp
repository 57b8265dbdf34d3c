#include "ltavg/config.hpp"

#include <fstream>
#include <set>

namespace ltavg {

OscillatorParams RunConfig::params(double gamma, double h) const {
  OscillatorParams p;
  p.omega0 = omega0;
  p.g = g;
  p.r = r;
  p.phi = phi;
  p.gamma = gamma;
  p.h = h;
  return p;
}

ClassifyPolicy RunConfig::policy() const {
  ClassifyPolicy pol;
  pol.dv_max = dv_max;
  pol.escalate = escalate;
  pol.stable_threshold = stable_threshold;
  pol.blowup_threshold = blowup_threshold;
  pol.solver = solver;
  if (symmetry == "auto")
    pol.sos.symmetry = SosOptions::Symmetry::Auto;
  else if (symmetry == "parity")
    pol.sos.symmetry = SosOptions::Symmetry::Parity;
  else if (symmetry == "none")
    pol.sos.symmetry = SosOptions::Symmetry::None;
  else
    throw std::invalid_argument("config: symmetry must be auto, parity or none");
  pol.sos.aux_in_sos = aux_in_sos;
  pol.sos.aux_trace_bound = aux_trace_bound;
  pol.sos.multiplier_in_sos = multiplier_in_sos;
  pol.sos.force_explicit_multiplier = force_explicit_multiplier;
  pol.lambda_stable = lambda_stable;
  pol.lambda_unstable = lambda_unstable;
  return pol;
}

SweepSettings RunConfig::sweep_settings() const {
  SweepSettings s;
  s.method = parse_method(method);
  s.dv = dv;
  s.ds = ds;
  s.policy = policy();
  s.dns = dns;
  s.threads = threads;
  s.seed = seed;
  return s;
}

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& scope) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + scope + it.key() + "'");
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  check_keys(j, {"omega0", "g", "r", "phi", "gamma_range", "h_range", "mesh", "method", "variant",
                 "dv", "ds", "dv_max", "escalate", "solver", "dns", "sos", "bound", "sweep",
                 "seed", "out", "threads"},
             "");
  maybe(j, "omega0", cfg.omega0);
  maybe(j, "g", cfg.g);
  maybe(j, "r", cfg.r);
  maybe(j, "phi", cfg.phi);
  if (j.contains("gamma_range")) {
    auto v = j.at("gamma_range").get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument("config: gamma_range needs [lo, hi]");
    cfg.gamma_lo = v[0];
    cfg.gamma_hi = v[1];
  }
  if (j.contains("h_range")) {
    auto v = j.at("h_range").get<std::vector<double>>();
    if (v.size() != 2) throw std::invalid_argument("config: h_range needs [lo, hi]");
    cfg.h_lo = v[0];
    cfg.h_hi = v[1];
  }
  if (j.contains("mesh")) {
    auto v = j.at("mesh").get<std::vector<int>>();
    if (v.size() != 2) throw std::invalid_argument("config: mesh needs [nx, ny]");
    cfg.nx = v[0];
    cfg.ny = v[1];
  }
  maybe(j, "method", cfg.method);
  maybe(j, "variant", cfg.variant);
  maybe(j, "dv", cfg.dv);
  maybe(j, "ds", cfg.ds);
  maybe(j, "dv_max", cfg.dv_max);
  maybe(j, "escalate", cfg.escalate);
  maybe(j, "seed", cfg.seed);
  maybe(j, "out", cfg.out_dir);
  maybe(j, "threads", cfg.threads);
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, {"tol_feas", "tol_gap", "tol_infeas", "tol_feas_soft", "tol_gap_soft",
                   "max_iter", "step_frac", "dim_cap", "verbose"},
               "solver.");
    maybe(s, "tol_feas_soft", cfg.solver.tol_feas_soft);
    maybe(s, "tol_gap_soft", cfg.solver.tol_gap_soft);
    maybe(s, "tol_feas", cfg.solver.tol_feas);
    maybe(s, "tol_gap", cfg.solver.tol_gap);
    maybe(s, "tol_infeas", cfg.solver.tol_infeas);
    maybe(s, "max_iter", cfg.solver.max_iter);
    maybe(s, "step_frac", cfg.solver.step_frac);
    maybe(s, "dim_cap", cfg.solver.dim_cap);
    maybe(s, "verbose", cfg.solver.verbose);
  }
  if (j.contains("dns")) {
    const auto& s = j.at("dns");
    check_keys(s, {"rel_tol", "abs_tol", "horizon", "n_ic", "window_fraction", "grow_ratio",
                   "decay_ratio"},
               "dns.");
    maybe(s, "rel_tol", cfg.dns.rel_tol);
    maybe(s, "abs_tol", cfg.dns.abs_tol);
    maybe(s, "horizon", cfg.dns.horizon);
    maybe(s, "n_ic", cfg.dns.n_ic);
    maybe(s, "window_fraction", cfg.dns.window_fraction);
    maybe(s, "grow_ratio", cfg.dns.grow_ratio);
    maybe(s, "decay_ratio", cfg.dns.decay_ratio);
  }
  if (j.contains("sos")) {
    const auto& s = j.at("sos");
    check_keys(s, {"symmetry", "aux_in_sos", "aux_trace_bound", "multiplier_in_sos",
                   "force_explicit_multiplier"},
               "sos.");
    maybe(s, "symmetry", cfg.symmetry);
    maybe(s, "aux_in_sos", cfg.aux_in_sos);
    maybe(s, "aux_trace_bound", cfg.aux_trace_bound);
    maybe(s, "multiplier_in_sos", cfg.multiplier_in_sos);
    maybe(s, "force_explicit_multiplier", cfg.force_explicit_multiplier);
  }
  if (j.contains("bound")) {
    const auto& s = j.at("bound");
    check_keys(s, {"stable_threshold", "blowup_threshold", "lambda_stable", "lambda_unstable"},
               "bound.");
    maybe(s, "stable_threshold", cfg.stable_threshold);
    maybe(s, "blowup_threshold", cfg.blowup_threshold);
    maybe(s, "lambda_stable", cfg.lambda_stable);
    maybe(s, "lambda_unstable", cfg.lambda_unstable);
  }
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, {"tongue_h_threshold", "tongue_window"}, "sweep.");
    maybe(s, "tongue_h_threshold", cfg.tongue_h_threshold);
    if (s.contains("tongue_window")) {
      auto v = s.at("tongue_window").get<std::vector<double>>();
      if (v.size() != 2) throw std::invalid_argument("config: tongue_window needs [lo, hi]");
      cfg.tongue_window_lo = v[0];
      cfg.tongue_window_hi = v[1];
    }
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  nlohmann::json j = nlohmann::json::parse(in);
  RunConfig cfg;
  apply_json(cfg, j);
  return cfg;
}

}  // namespace ltavg
