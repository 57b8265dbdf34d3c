// Command-line front end: single-point bounds, Floquet spectra, parameter
// sweeps, and the self-test battery.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltavg/config.hpp"
#include "ltavg/floquet.hpp"
#include "ltavg/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<double> omega0, g, r, phi, gamma, h;
  std::optional<int> dv, ds;
  std::optional<unsigned long> seed;
  std::optional<int> threads;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--omega0", f.omega0, "proper frequency");
  cmd->add_option("--g", f.g, "intrinsic loss");
  cmd->add_option("--r", f.r, "coupling strength");
  cmd->add_option("--phi", f.phi, "phase difference");
  cmd->add_option("--dv", f.dv, "auxiliary function degree");
  cmd->add_option("--ds", f.ds, "multiplier degree");
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--threads", f.threads, "worker cap (or LTAVG_THREADS)");
  cmd->add_option("--out", f.out, "output directory");
}

ltavg::RunConfig build_config(const CommonFlags& f) {
  ltavg::RunConfig cfg;
  if (!f.config_path.empty()) cfg = ltavg::load_config(f.config_path);
  if (f.omega0) cfg.omega0 = *f.omega0;
  if (f.g) cfg.g = *f.g;
  if (f.r) cfg.r = *f.r;
  if (f.phi) cfg.phi = *f.phi;
  if (f.dv) cfg.dv = *f.dv;
  if (f.ds) cfg.ds = *f.ds;
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (!f.out.empty()) cfg.out_dir = f.out;
  return cfg;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

int cmd_bound(const CommonFlags& flags) {
  if (!flags.gamma || !flags.h) {
    std::cerr << "bound: --gamma and --h are required\n";
    return 1;
  }
  ltavg::RunConfig cfg = build_config(flags);
  ltavg::OscillatorParams p = cfg.params(*flags.gamma, *flags.h);
  ltavg::Verdict v = ltavg::classify(p, cfg.dv, cfg.ds, cfg.policy());
  json rec = ltavg::verdict_to_json(p, v);
  std::cout << rec.dump(2) << "\n";
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "bound.json", rec.dump(2) + "\n");
  }
  switch (v.label) {
    case ltavg::StabilityLabel::Stable: return 0;
    case ltavg::StabilityLabel::Unstable: return 2;
    case ltavg::StabilityLabel::Indeterminate: return 3;
  }
  return 3;
}

int cmd_floquet(const CommonFlags& flags, const std::string& variant_flag) {
  if (!flags.gamma || !flags.h) {
    std::cerr << "floquet: --gamma and --h are required\n";
    return 1;
  }
  ltavg::RunConfig cfg = build_config(flags);
  std::string variant = variant_flag.empty() ? cfg.variant : variant_flag;
  ltavg::OscillatorParams p = cfg.params(*flags.gamma, *flags.h);
  ltavg::HillDeterminant det;
  if (variant == "simplified")
    det = ltavg::simplified_determinant(p);
  else if (variant == "general")
    det = ltavg::general_determinant(p);
  else {
    std::cerr << "floquet: variant must be 'simplified' or 'general'\n";
    return 1;
  }
  ltavg::FloquetSpectrum spec = ltavg::roots(det);
  json j;
  j["variant"] = variant;
  j["params"] = {{"omega0", p.omega0}, {"g", p.g},       {"r", p.r},
                 {"h", p.h},           {"gamma", p.gamma}, {"phi", p.phi}};
  json roots_j = json::array();
  for (const auto& mu : spec.mu_roots) roots_j.push_back({mu.real(), mu.imag()});
  j["mu"] = roots_j;
  j["growth_rates"] = spec.growth_rates;
  j["max_growth"] = spec.max_growth;
  j["stable"] = !spec.unstable;
  std::cout << j.dump(2) << "\n";
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    write_text(fs::path(cfg.out_dir) / "floquet.json", j.dump(2) + "\n");
  }
  return 0;
}

int cmd_sweep(const CommonFlags& flags, std::vector<std::string> methods,
              std::vector<double> gamma_range, std::vector<double> h_range,
              std::vector<int> mesh) {
  ltavg::RunConfig cfg = build_config(flags);
  if (gamma_range.size() == 2) {
    cfg.gamma_lo = gamma_range[0];
    cfg.gamma_hi = gamma_range[1];
  }
  if (h_range.size() == 2) {
    cfg.h_lo = h_range[0];
    cfg.h_hi = h_range[1];
  }
  if (mesh.size() == 2) {
    cfg.nx = mesh[0];
    cfg.ny = mesh[1];
  }
  if (!(cfg.gamma_hi > cfg.gamma_lo) || !(cfg.h_hi > cfg.h_lo) || cfg.nx < 2 || cfg.ny < 2) {
    std::cerr << "sweep: empty range or mesh\n";
    return 1;
  }
  if (methods.empty()) methods.push_back(cfg.method);
  const fs::path out = cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir);
  fs::create_directories(out);

  std::vector<ltavg::SweepGrid> grids;
  for (const auto& mname : methods) {
    cfg.method = mname;
    ltavg::SweepSettings s = cfg.sweep_settings();
    ltavg::OscillatorParams base = cfg.params(0, 0);
    ltavg::SweepGrid grid =
        ltavg::run_sweep(base, cfg.gamma_lo, cfg.gamma_hi, cfg.h_lo, cfg.h_hi, cfg.nx, cfg.ny, s);
    const std::string tag = ltavg::to_string(s.method);
    {
      std::ofstream os(out / ("sweep_" + tag + ".csv"));
      ltavg::write_sweep_csv(os, grid);
    }
    // Mask any remaining indeterminate cells as unstable for the boundary
    // drawing only; the CSV keeps the honest labels.
    ltavg::SweepGrid masked = grid;
    int masked_cells = 0;
    for (auto& v : masked.verdicts)
      if (v.label == ltavg::StabilityLabel::Indeterminate) {
        v.label = ltavg::StabilityLabel::Unstable;
        ++masked_cells;
      }
    auto lines = ltavg::extract_boundary(masked);
    {
      std::ofstream os(out / ("boundary_" + tag + ".csv"));
      ltavg::write_boundary_csv(os, lines);
    }
    {
      std::ofstream os(out / ("boundary_" + tag + ".svg"));
      ltavg::write_boundary_svg(os, grid, lines);
    }
    if (masked_cells > 0)
      std::cerr << "sweep(" << tag << "): " << masked_cells
                << " indeterminate cells masked in boundary output\n";
    grids.push_back(std::move(grid));
  }
  if (grids.size() >= 2) {
    ltavg::CompareReport rep = ltavg::compare(grids[0], grids[1]);
    std::ofstream os(out / "disagreement.csv");
    os << "label_a,label_b,count\n";
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        os << ltavg::to_string(static_cast<ltavg::StabilityLabel>(a)) << ","
           << ltavg::to_string(static_cast<ltavg::StabilityLabel>(b)) << "," << rep.counts[a][b]
           << "\n";
    std::cout << "exception_ratio " << rep.exception_ratio << "\n";
  }
  std::cout << "sweep: wrote outputs to " << out.string() << "\n";
  return 0;
}

bool suite(const std::string& name, bool ok) {
  std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
  return ok;
}

int cmd_selftest(const CommonFlags& flags) {
  ltavg::RunConfig cfg = build_config(flags);
  bool all = true;

  // Polynomial arithmetic: eval/mul homomorphism and Lie-derivative linearity.
  {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1, 1);
    bool ok = true;
    for (int t = 0; t < 100 && ok; ++t) {
      const int n = 2 + static_cast<int>(rng() % 4);
      auto rand_poly = [&](int deg) {
        ltavg::Polynomial p(n);
        auto monos = ltavg::enumerate_monomials(n, deg);
        for (const auto& m : monos)
          if (rng() % 3 == 0) p.add_term(m, uni(rng));
        return p;
      };
      ltavg::Polynomial a = rand_poly(3), b = rand_poly(3);
      Eigen::VectorXd z = Eigen::VectorXd::NullaryExpr(n, [&]() { return uni(rng); });
      const double lhs = (a * b).eval(z), rhs = a.eval(z) * b.eval(z);
      ok = ok && std::abs(lhs - rhs) <= 1e-10 * (1 + std::abs(rhs));
    }
    all &= suite("poly: eval respects products", ok);
  }

  // Solver battery at the configured settings, checked against the strict
  // KKT thresholds.
  {
    bool ok = true;
    for (unsigned long s = 0; s < 20 && ok; ++s) {
      ltavg::SdpProblem prob = ltavg::random_feasible_problem(1000 + s, 12, 30);
      ltavg::SdpSolution sol = ltavg::solve(prob, cfg.solver);
      ok = sol.status == ltavg::SolveStatus::Optimal && ltavg::verify_kkt(prob, sol).pass;
    }
    all &= suite("sdp: random feasible battery + KKT", ok);

    ltavg::Polynomial x = ltavg::Polynomial::variable(1, 0);
    ltavg::GramFragment frag = ltavg::bound_above(x * x * 2.0 - x * x * x * x, 2);
    ltavg::SdpSolution sol = ltavg::solve(frag.problem, cfg.solver);
    const bool uok =
        sol.status == ltavg::SolveStatus::Optimal && std::abs(sol.objective - 1.0) <= 1e-6;
    all &= suite("sos: univariate bound equals 1", uok);
  }

  // Integrator: a full period of the harmonic oscillator returns home.
  {
    ltavg::OscillatorParams p;
    p.omega0 = 1.0;
    p.g = 0;
    p.r = 0;
    p.h = 0;
    p.gamma = 0;
    ltavg::PolySystem sys = ltavg::build_system(p);
    Eigen::VectorXd ic(4);
    ic << 1, 0, 0, 0;
    ltavg::Trajectory tr = ltavg::integrate(sys, ic, 2 * M_PI, 1e-9, 1e-12);
    const bool ok = !tr.blow_up && (tr.states.back().head<2>() - ic.head<2>()).norm() < 1e-6;
    all &= suite("dns: harmonic oscillator period", ok);

    ltavg::DnsSettings ds = cfg.dns;
    ds.seed = cfg.seed;
    ltavg::OscillatorParams q = cfg.params(1.3, 0.2);
    ltavg::Verdict v1 = ltavg::classify_dns(q, ds);
    ltavg::Verdict v2 = ltavg::classify_dns(q, ds);
    all &= suite("dns: seeded classification reproducible",
                 v1.label == v2.label && v1.detail == v2.detail);
  }

  // Hill determinant vs monodromy oracle.
  {
    std::mt19937_64 rng(cfg.seed + 7);
    std::uniform_real_distribution<double> ug(1.4, 3.0), ur(0, 0.4), ugg(0, 0.04), uh(0.005, 0.05);
    bool ok = true;
    for (int t = 0; t < 5 && ok; ++t) {
      ltavg::OscillatorParams p;
      p.omega0 = 1;
      p.gamma = ug(rng);
      p.r = ur(rng);
      p.g = ugg(rng);
      p.h = uh(rng);
      const double hill = ltavg::roots(ltavg::general_determinant(p)).max_growth;
      const double mono = ltavg::monodromy_max_growth(p);
      ok = std::abs(hill - mono) <= 1e-3;
    }
    all &= suite("floquet: truncation matches monodromy (h <= 0.05)", ok);
  }

  std::cout << (all ? "selftest: all suites passed\n" : "selftest: FAILURES\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-time-average stability toolkit for parametrically driven coupled oscillators"};
  app.require_subcommand(1);

  CommonFlags fb, ff, fs, ft;
  std::string variant;
  std::vector<std::string> methods;
  std::vector<double> gamma_range, h_range;
  std::vector<int> mesh;

  CLI::App* bound = app.add_subcommand("bound", "classify one (gamma, h) point by the SOS bound");
  add_common(bound, fb);
  bound->add_option("--gamma", fb.gamma, "drive frequency")->required();
  bound->add_option("--h", fb.h, "drive intensity")->required();

  CLI::App* floq = app.add_subcommand("floquet", "Hill-determinant spectrum at one point");
  add_common(floq, ff);
  floq->add_option("--gamma", ff.gamma, "drive frequency")->required();
  floq->add_option("--h", ff.h, "drive intensity")->required();
  floq->add_option("--variant", variant, "simplified | general");

  CLI::App* sweep = app.add_subcommand("sweep", "classify a (gamma, h) grid and trace boundaries");
  add_common(sweep, fs);
  sweep->add_option("--method", methods, "sos | floquet-general | floquet-simplified | dns")
      ->take_all();
  sweep->add_option("--gamma-range", gamma_range, "LO HI")->expected(2);
  sweep->add_option("--h-range", h_range, "LO HI")->expected(2);
  sweep->add_option("--mesh", mesh, "NX NY")->expected(2);

  CLI::App* selftest = app.add_subcommand("selftest", "run the built-in property batteries");
  add_common(selftest, ft);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (bound->parsed()) return cmd_bound(fb);
    if (floq->parsed()) return cmd_floquet(ff, variant);
    if (sweep->parsed()) return cmd_sweep(fs, methods, gamma_range, h_range, mesh);
    if (selftest->parsed()) return cmd_selftest(ft);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
