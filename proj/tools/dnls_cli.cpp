#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "dnls/harness.hpp"
#include "dnls/modified_energy.hpp"
#include "dnls/observables.hpp"
#include "dnls/soliton.hpp"

namespace {

using namespace dnls;

void print_run_summary(const RunResult& r) {
  const auto& rec = r.record;
  std::cout << "status        " << to_string(rec.status) << " after " << rec.steps_taken << " steps\n";
  std::cout << "tau/h^2       " << r.cfl.ratio << " (bound " << r.cfl.bound << ", " << (r.cfl.pass ? "pass" : "fail")
            << ")\n";
  std::cout << "eps(mu)       " << r.eps_mu << '\n';
  if (!rec.samples.empty()) {
    const auto& a = rec.samples.front().report;
    const auto& b = rec.samples.back().report;
    std::cout << std::setprecision(12);
    std::cout << "N_h           " << a.N_h << " -> " << b.N_h << '\n';
    std::cout << "H_h           " << a.H_h << " -> " << b.H_h << '\n';
    std::cout << "dist          " << b.dist << " at t = " << rec.samples.back().t << '\n';
    std::cout << std::setprecision(6);
  }
  if (r.instability_time) {
    std::cout << "instability   t* = " << *r.instability_time << '\n';
  } else {
    std::cout << "instability   none\n";
  }
  if (!rec.message.empty()) std::cout << "message       " << rec.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lattice NLS soliton dynamics under splitting integrators"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dnls::version());

  // run
  auto* run_cmd = app.add_subcommand("run", "Integrate one configuration and write its outputs");
  std::string config_path, preset_name, out_dir, stepper, initial_kind;
  double h = 0, tau = 0, t_end = 0, delta = -1;
  int K = 0, weight = 0;
  std::int64_t cadence = 0;
  std::uint64_t seed = 0;
  bool seed_set = false, snapshots = false, plots = false, linear_drift = false;
  std::vector<double> snapshot_times;
  run_cmd->add_option("-c,--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  run_cmd->add_option("-p,--preset", preset_name, "Experiment preset")->check(CLI::IsMember({"E1", "E2", "E3"}));
  run_cmd->add_option("-o,--out", out_dir, "Output directory");
  run_cmd->add_option("--spacing", h, "Grid spacing");
  run_cmd->add_option("--K", K, "Half-width in sites");
  run_cmd->add_option("--tau", tau, "Time step");
  run_cmd->add_option("--stepper", stepper, "lie_AP | lie_PA | taylor2_then_P | dfp");
  run_cmd->add_option("--t-end", t_end, "Final time");
  run_cmd->add_option("--cadence", cadence, "Steps between samples");
  run_cmd->add_option("--initial", initial_kind, "sampled_soliton | discrete_soliton | perturbed");
  run_cmd->add_option("--delta", delta, "Perturbation size (mu-norm)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Perturbation seed");
  run_cmd->add_option("--weight", weight, "Seminorm weight (1 or 2)");
  run_cmd->add_option("--snapshot-times", snapshot_times, "Times for profile snapshots");
  run_cmd->add_flag("--snapshots", snapshots, "Write snapshot files");
  run_cmd->add_flag("--plots", plots, "Write SVG plots and a gnuplot script");
  run_cmd->add_flag("--linear-drift", linear_drift, "Linear axis for the drift plot");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a parameter grid and aggregate one CSV row per run");
  std::string sweep_path, sweep_csv = "sweep.csv";
  int workers = 0;
  sweep_cmd->add_option("-c,--config", sweep_path, "JSON sweep file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("-o,--csv", sweep_csv, "Aggregated CSV path");
  sweep_cmd->add_option("-j,--workers", workers, "Concurrent runs");

  // soliton
  auto* sol_cmd = app.add_subcommand("soliton", "Compute the discrete soliton on a grid");
  double sh = 0.1875, stol = 1e-10, smass = -1.0, stau = 0.0;
  int sK = 80;
  bool resummed = false;
  std::string sol_csv, sol_log;
  sol_cmd->add_option("--spacing", sh, "Grid spacing");
  sol_cmd->add_option("--K", sK, "Half-width in sites");
  sol_cmd->add_option("--tol", stol, "Residual tolerance");
  sol_cmd->add_option("--mass", smass, "Mass target (default: mass of the sampled profile)");
  sol_cmd->add_flag("--resummed", resummed, "Minimize H_A + H_Z1 instead of H_h");
  sol_cmd->add_option("--tau", stau, "Time step for --resummed");
  sol_cmd->add_option("--out", sol_csv, "Write the profile as CSV (j,x,re,im,abs)");
  sol_cmd->add_option("--log", sol_log, "Write the convergence log as CSV");

  // validate
  auto* val_cmd = app.add_subcommand("validate", "Measure the approximation constants across an h-sweep");
  ValidationSpec vspec;
  bool val_json = false;
  val_cmd->add_option("--spacing", vspec.hs, "Grid spacings");
  val_cmd->add_option("--half-width", vspec.half_width, "K h held fixed");
  val_cmd->add_option("--tail-K", vspec.tail_Ks, "Cutoffs for the tail constant");
  val_cmd->add_flag("--json", val_json, "Print the report as JSON");

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "Print lattice frequencies and the CFL gate");
  double ph = 0.1875, ptau = 0.02;
  int pK = 80, pM = 0;
  bool all_modes = false;
  spec_cmd->add_option("--spacing", ph, "Grid spacing");
  spec_cmd->add_option("--K", pK, "Half-width in sites");
  spec_cmd->add_option("--tau", ptau, "Time step");
  spec_cmd->add_option("--M", pM, "Order of the modified energy");
  spec_cmd->add_flag("--all", all_modes, "List every mode");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "Re-render plots from a run directory");
  std::string plot_dir;
  bool plot_linear = false;
  plot_cmd->add_option("run_dir", plot_dir, "Directory written by `dnls run`")->required()->check(CLI::ExistingDirectory);
  plot_cmd->add_flag("--linear-drift", plot_linear, "Linear axis for the drift plot");

  CLI11_PARSE(app, argc, argv);
  seed_set = seed_opt->count() > 0;

  try {
    if (*run_cmd) {
      RunConfig cfg;
      try {
        if (!preset_name.empty()) cfg = preset(preset_name);
        if (!config_path.empty()) cfg = run_config_from_json(json::parse(std::ifstream(config_path)), cfg);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (h > 0) cfg.h = h;
        if (K > 0) cfg.K = K;
        if (tau > 0) cfg.stepper.tau = tau;
        if (!stepper.empty()) cfg.stepper.kind = stepper_kind_from_string(stepper);
        if (t_end > 0) cfg.t_end = t_end;
        if (cadence > 0) cfg.cadence = cadence;
        if (!initial_kind.empty()) cfg.initial.kind = initial_kind_from_string(initial_kind);
        if (delta >= 0) cfg.initial.delta = delta;
        if (seed_set) cfg.initial.seed = seed;
        if (weight != 0) {
          if (weight != 1 && weight != 2) throw ConfigError("--weight must be 1 or 2");
          cfg.weight = static_cast<SeminormWeight>(weight);
        }
        if (!snapshot_times.empty()) cfg.snapshot_times = snapshot_times;
        if (snapshots) cfg.emit_snapshots = true;
        if (plots) cfg.emit_plots = true;
        if (linear_drift) cfg.log_drift = false;
        cfg.validate();
      } catch (const std::invalid_argument& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kExitBadConfig;
      } catch (const json::exception& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kExitBadConfig;
      }
      const RunResult r = run(cfg);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      print_run_summary(r);
      return r.exit_code;
    }

    if (*sweep_cmd) {
      SweepSpec s;
      try {
        s = sweep_spec_from_json(json::parse(std::ifstream(sweep_path)));
      } catch (const std::invalid_argument& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kExitBadConfig;
      } catch (const json::exception& e) {
        std::cerr << "bad config: " << e.what() << '\n';
        return kExitBadConfig;
      }
      if (workers > 0) s.workers = workers;
      const auto rows = sweep(s);
      std::ofstream out(sweep_csv);
      if (!out) throw std::runtime_error("cannot write " + sweep_csv);
      write_sweep_csv(out, rows);
      std::cout << rows.size() << " runs -> " << sweep_csv << '\n';
      return 0;
    }

    if (*sol_cmd) {
      SolitonOptions opt;
      opt.tol = stol;
      if (smass > 0) opt.mass_target = smass;
      if (resummed) {
        opt.objective = SolitonObjective::modified_resummed;
        opt.tau = stau;
      }
      const GridSpec grid(sh, sK);
      SolitonPack pack = [&] {
        try {
          return discrete_soliton(grid, opt);
        } catch (const SolitonSolveError& e) {
          std::cerr << "warning: " << e.what() << '\n';
          return e.best();
        }
      }();
      std::cout << std::setprecision(12);
      std::cout << "converged        " << (pack.converged ? "yes" : "no") << " in " << pack.iterations
                << " iterations\n";
      std::cout << "mass_target      " << pack.mass_target << '\n';
      std::cout << "lambda_mu        " << pack.lambda_mu << '\n';
      std::cout << "kkt_residual     " << pack.kkt_residual << '\n';
      std::cout << "H_h              " << hamiltonian_h(pack.discrete) << '\n';
      std::cout << "|eta_mu - pi eta|_mu  " << norm_mu(pack.discrete - pack.sampled) << '\n';
      if (!sol_csv.empty()) {
        std::ofstream out(sol_csv);
        write_snapshot_csv(out, pack.discrete);
      }
      if (!sol_log.empty()) {
        std::ofstream out(sol_log);
        write_convergence_csv(out, pack);
      }
      return pack.converged ? 0 : 1;
    }

    if (*val_cmd) {
      const auto report = validate(vspec);
      if (val_json) {
        std::cout << to_json(report).dump(2) << '\n';
      } else {
        print_validation(std::cout, report);
      }
      return 0;
    }

    if (*spec_cmd) {
      const GridSpec grid(ph, pK);
      const RVector om = omegas(grid);
      const CflReport cfl = cfl_check(ph, ptau, pM);
      std::cout << "modes          " << om.size() << '\n';
      std::cout << "omega range    [" << om.minCoeff() << ", " << om.maxCoeff() << "]\n";
      std::cout << "tau/h^2        " << cfl.ratio << '\n';
      std::cout << "CFL bound      " << cfl.bound << " (M = " << pM << ") " << (cfl.pass ? "pass" : "fail") << '\n';
      std::cout << "tau*omega_max  " << ptau * om.maxCoeff() << '\n';
      if (all_modes) {
        std::cout << "k,omega,tau_omega\n" << std::setprecision(15);
        for (Eigen::Index k = 0; k < om.size(); ++k) std::cout << k + 1 << ',' << om[k] << ',' << ptau * om[k] << '\n';
      }
      return 0;
    }

    if (*plot_cmd) {
      const auto data = load_plot_data(plot_dir);
      const auto files = emit_plots(data, std::filesystem::path(plot_dir) / "plots", {!plot_linear, 4});
      for (const auto& f : files) std::cout << f.string() << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
