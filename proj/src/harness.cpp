#include "dnls/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "dnls/observables.hpp"
#include "dnls/soliton.hpp"

#ifndef DNLS_VERSION
#define DNLS_VERSION "0.0.0"
#endif

namespace dnls {

namespace fs = std::filesystem;

const char* version() { return DNLS_VERSION; }

std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::sampled_soliton: return "sampled_soliton";
    case InitialKind::discrete_soliton: return "discrete_soliton";
    case InitialKind::perturbed: return "perturbed";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& s) {
  if (s == "sampled_soliton") return InitialKind::sampled_soliton;
  if (s == "discrete_soliton") return InitialKind::discrete_soliton;
  if (s == "perturbed") return InitialKind::perturbed;
  throw ConfigError("unknown initial kind '" + s + "'");
}

void RunConfig::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h must be positive");
  if (K < 1) throw ConfigError("K must be >= 1");
  if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be positive");
  if (cadence < 1) throw ConfigError("cadence must be >= 1");
  if (!(initial.delta >= 0.0)) throw ConfigError("delta must be >= 0");
  if (cfl_M < 0) throw ConfigError("cfl_M must be >= 0");
  if (!(instability_threshold > 0.0)) throw ConfigError("instability_threshold must be positive");
  for (double t : snapshot_times) {
    if (!(t >= 0.0)) throw ConfigError("snapshot times must be >= 0");
  }
  try {
    stepper.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const RunConfig& c) {
  return {
      {"name", c.name},
      {"grid", {{"h", c.h}, {"K", c.K}}},
      {"stepper",
       {{"kind", to_string(c.stepper.kind)},
        {"tau", c.stepper.tau},
        {"dfp_tol", c.stepper.dfp_tol},
        {"dfp_maxit", c.stepper.dfp_maxit},
        {"blowup_threshold", c.stepper.blowup_threshold}}},
      {"initial", {{"kind", to_string(c.initial.kind)}, {"delta", c.initial.delta}, {"seed", c.initial.seed}}},
      {"t_end", c.t_end},
      {"cadence", c.cadence},
      {"output_dir", c.output_dir},
      {"emit_snapshots", c.emit_snapshots},
      {"snapshot_times", c.snapshot_times},
      {"emit_plots", c.emit_plots},
      {"log_drift", c.log_drift},
      {"seminorm_weight", static_cast<int>(c.weight)},
      {"cfl_M", c.cfl_M},
      {"modified_energy", c.modified_energy},
      {"instability_threshold", c.instability_threshold},
  };
}

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig run_config_from_json(const json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  reject_unknown(j,
                 {"name", "preset", "grid", "stepper", "initial", "t_end", "cadence", "output_dir", "emit_snapshots",
                  "snapshot_times", "emit_plots", "log_drift", "seminorm_weight", "cfl_M", "modified_energy",
                  "instability_threshold"},
                 "run config");
  if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
  read(j, "name", c.name);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    reject_unknown(g, {"h", "K"}, "grid");
    read(g, "h", c.h);
    read(g, "K", c.K);
  }
  if (j.contains("stepper")) {
    const auto& s = j.at("stepper");
    reject_unknown(s, {"kind", "tau", "dfp_tol", "dfp_maxit", "blowup_threshold"}, "stepper");
    if (s.contains("kind")) {
      try {
        c.stepper.kind = stepper_kind_from_string(s.at("kind").get<std::string>());
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    read(s, "tau", c.stepper.tau);
    read(s, "dfp_tol", c.stepper.dfp_tol);
    read(s, "dfp_maxit", c.stepper.dfp_maxit);
    read(s, "blowup_threshold", c.stepper.blowup_threshold);
  }
  if (j.contains("initial")) {
    const auto& i = j.at("initial");
    reject_unknown(i, {"kind", "delta", "seed"}, "initial");
    if (i.contains("kind")) c.initial.kind = initial_kind_from_string(i.at("kind").get<std::string>());
    read(i, "delta", c.initial.delta);
    read(i, "seed", c.initial.seed);
  }
  read(j, "t_end", c.t_end);
  read(j, "cadence", c.cadence);
  read(j, "output_dir", c.output_dir);
  read(j, "emit_snapshots", c.emit_snapshots);
  read(j, "snapshot_times", c.snapshot_times);
  read(j, "emit_plots", c.emit_plots);
  read(j, "log_drift", c.log_drift);
  if (j.contains("seminorm_weight")) {
    int w = 0;
    read(j, "seminorm_weight", w);
    if (w != 1 && w != 2) throw ConfigError("seminorm_weight must be 1 or 2");
    c.weight = static_cast<SeminormWeight>(w);
  }
  read(j, "cfl_M", c.cfl_M);
  read(j, "modified_energy", c.modified_energy);
  read(j, "instability_threshold", c.instability_threshold);
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

std::vector<std::string> preset_names() { return {"E1", "E2", "E3"}; }

RunConfig preset(const std::string& name) {
  RunConfig c;
  c.name = name;
  c.h = 0.1875;
  c.K = 80;
  c.initial = {InitialKind::sampled_soliton, 0.0, 0};
  c.emit_snapshots = true;
  if (name == "E1") {
    c.stepper.kind = StepperKind::lie_AP;
    c.stepper.tau = 0.2;
    c.t_end = 300.0;
    c.cadence = 5;
    c.snapshot_times = {0.0, 50.0, 100.0, 200.0};
  } else if (name == "E2") {
    c.stepper.kind = StepperKind::taylor2_then_P;
    c.stepper.tau = 0.001;
    c.t_end = 200.0;
    c.cadence = 1000;
    c.snapshot_times = {0.0, 50.0, 100.0, 200.0};
  } else if (name == "E3") {
    c.stepper.kind = StepperKind::lie_AP;
    c.stepper.tau = 0.02;
    c.t_end = 1e4;
    c.cadence = 500;
    c.snapshot_times = {0.0, 1e2, 1e3, 1e4};
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected E1, E2 or E3)");
  }
  return c;
}

LatticeField perturbation_direction(const GridSpec& grid, std::uint64_t seed, SeminormWeight w) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  CVector v(grid.npoints());
  for (int j = 0; j <= grid.K(); ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[grid.index(j)] = {re, im};
  }
  const LatticeField f = LatticeField::mirrored(grid, std::move(v));
  return f * cplx{1.0 / norm_mu(f, w)};
}

LatticeField initial_field(const RunConfig& config) {
  const GridSpec grid = config.grid();
  switch (config.initial.kind) {
    case InitialKind::sampled_soliton: return project(soliton_sampler(), grid);
    case InitialKind::discrete_soliton: {
      SolitonOptions opt;
      opt.weight = config.weight;
      return discrete_soliton(grid, opt).discrete;
    }
    case InitialKind::perturbed:
      return project(soliton_sampler(), grid) +
             perturbation_direction(grid, config.initial.seed, config.weight) * cplx{config.initial.delta};
  }
  throw ConfigError("unhandled initial kind");
}

int exit_code(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return kExitCompleted;
    case RunStatus::blowup: return kExitBlowup;
    case RunStatus::dfp_failure: return kExitDfpFailure;
  }
  return kExitBadConfig;
}

std::optional<double> first_instability(const TrajectoryRecord& record, double threshold) {
  for (const auto& s : record.samples) {
    if (!std::isfinite(s.max_abs) || s.report.dist > threshold || s.max_abs > record.config.blowup_threshold) {
      return s.t;
    }
  }
  if (record.status == RunStatus::blowup && !record.samples.empty()) return record.samples.back().t;
  return std::nullopt;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record) {
  os << "step,t,N_h,H_h,H_mod_phys,H_mod_spec,dist,alpha,r,u_norm,max_abs\n";
  os << std::setprecision(17);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : record.samples) {
    const auto& r = s.report;
    double alpha = nan, rr = nan, un = nan;
    if (r.chart) {
      alpha = r.chart->alpha;
      rr = r.chart->r;
      un = norm_mu(r.chart->u);
    }
    os << s.step << ',' << s.t << ',' << r.N_h << ',' << r.H_h << ',' << r.H_mod_phys << ',' << r.H_mod_spec << ','
       << r.dist << ',' << alpha << ',' << rr << ',' << un << ',' << s.max_abs << '\n';
  }
}

void write_snapshot_csv(std::ostream& os, const LatticeField& f) {
  os << "j,x,re,im,abs\n";
  os << std::setprecision(17);
  const int K = f.grid().K();
  for (int j = -K; j <= K; ++j) {
    const cplx v = f.at(j);
    os << j << ',' << f.grid().x(j) << ',' << v.real() << ',' << v.imag() << ',' << std::abs(v) << '\n';
  }
}

namespace {

std::string snapshot_name(std::int64_t step) {
  std::ostringstream os;
  os << "snapshot_" << std::setw(9) << std::setfill('0') << step << ".csv";
  return os.str();
}

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  body(out);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

json manifest(const RunResult& result) {
  const auto& rec = result.record;
  json snaps = json::array();
  for (const auto& s : rec.snapshots) {
    snaps.push_back({{"step", s.step}, {"t", s.t}, {"file", "snapshots/" + snapshot_name(s.step)}});
  }
  json first = nullptr;
  if (!rec.samples.empty()) {
    first = {{"N_h", rec.samples.front().report.N_h}, {"H_h", rec.samples.front().report.H_h}};
  }
  return {
      {"program", "dnls"},
      {"version", version()},
      {"config", to_json(result.config)},
      {"status", to_string(rec.status)},
      {"exit_code", result.exit_code},
      {"message", rec.message},
      {"steps_planned", step_count(result.config.t_end, result.config.stepper.tau)},
      {"steps_taken", rec.steps_taken},
      {"cfl", {{"ratio", result.cfl.ratio}, {"bound", result.cfl.bound}, {"pass", result.cfl.pass}, {"M", result.config.cfl_M}}},
      {"eps_mu", result.eps_mu},
      {"instability_time", result.instability_time ? json(*result.instability_time) : json(nullptr)},
      {"initial_invariants", first},
      {"final_dist", rec.samples.empty() ? json(nullptr) : nan_to_null(rec.samples.back().report.dist)},
      {"snapshots", snaps},
      {"warnings", result.warnings},
  };
}

RunResult run(const RunConfig& config) {
  config.validate();
  RunResult result;
  result.config = config;
  const GridSpec grid = config.grid();
  result.cfl = cfl_check(config.h, config.stepper.tau, config.cfl_M);
  result.eps_mu = epsilon_mu(config.h, config.K, config.stepper.tau, soliton_sampler().nu);
  if (!result.cfl.pass) {
    std::ostringstream w;
    w << "CFL gate fails: tau/h^2 = " << result.cfl.ratio << " >= " << result.cfl.bound << " (M = " << config.cfl_M
      << "); modified energies are not evaluated";
    result.warnings.push_back(w.str());
  }

  const LatticeField f0 = initial_field(config);
  IntegrateOptions opt;
  opt.t_end = config.t_end;
  opt.cadence = config.cadence;
  if (config.emit_snapshots || config.emit_plots) opt.snapshot_times = config.snapshot_times;
  opt.reference = project(soliton_sampler(), grid);
  opt.modified_energy = config.modified_energy;
  opt.cfl_M = config.cfl_M;
  opt.weight = config.weight;
  result.record = integrate(f0, config.stepper, opt);
  result.instability_time = first_instability(result.record, config.instability_threshold);
  result.exit_code = exit_code(result.record.status);

  if (config.output_dir.empty()) return result;
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, result.record); });
  write_file(dir / "drift.csv", [&](std::ostream& os) {
    write_drift_csv(os, drift_report(result.record, ModifiedEnergyMode::resummed_spectral));
  });
  if (config.emit_snapshots) {
    fs::create_directories(dir / "snapshots");
    for (const auto& s : result.record.snapshots) {
      write_file(dir / "snapshots" / snapshot_name(s.step), [&](std::ostream& os) { write_snapshot_csv(os, s.field); });
    }
  }
  if (config.emit_plots) {
    PlotData data = plot_data(result.record);
    data.title = config.name;
    emit_plots(data, dir / "plots", {config.log_drift, 4});
  }
  write_file(dir / "manifest.json", [&](std::ostream& os) { os << manifest(result).dump(2) << '\n'; });
  return result;
}

PlotData plot_data(const TrajectoryRecord& record) {
  PlotData d;
  if (record.samples.empty()) return d;
  const auto& first = record.samples.front().report;
  for (const auto& s : record.samples) {
    d.t.push_back(s.t);
    d.dist.push_back(s.report.dist);
    d.dN.push_back(s.report.N_h - first.N_h);
    d.dH.push_back(s.report.H_h - first.H_h);
    d.dHmod.push_back(s.report.H_mod_spec - first.H_mod_spec);
  }
  for (const auto& snap : record.snapshots) {
    ProfileCurve c;
    c.t = snap.t;
    const int K = snap.field.grid().K();
    for (int j = -K; j <= K; ++j) {
      c.x.push_back(snap.field.grid().x(j));
      c.abs.push_back(std::abs(snap.field.at(j)));
    }
    d.profiles.push_back(std::move(c));
  }
  return d;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path, std::vector<std::string>& header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  std::string line;
  std::getline(in, line);
  header = split(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(split(line));
  }
  return rows;
}

double parse_double(const std::string& s) {
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::stod(s);
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error("missing column " + name);
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

PlotData load_plot_data(const fs::path& run_dir) {
  json m;
  {
    std::ifstream in(run_dir / "manifest.json");
    if (!in) throw std::runtime_error("no manifest.json in " + run_dir.string());
    in >> m;
  }
  PlotData d;
  d.title = m.at("config").value("name", std::string("run"));
  std::vector<std::string> header;
  const auto rows = read_csv(run_dir / "trajectory.csv", header);
  const auto ct = column(header, "t"), cd = column(header, "dist"), cn = column(header, "N_h"),
             ch = column(header, "H_h"), cm = column(header, "H_mod_spec");
  for (const auto& r : rows) {
    d.t.push_back(parse_double(r.at(ct)));
    d.dist.push_back(parse_double(r.at(cd)));
    d.dN.push_back(parse_double(r.at(cn)) - parse_double(rows.front().at(cn)));
    d.dH.push_back(parse_double(r.at(ch)) - parse_double(rows.front().at(ch)));
    d.dHmod.push_back(parse_double(r.at(cm)) - parse_double(rows.front().at(cm)));
  }
  for (const auto& s : m.at("snapshots")) {
    const fs::path file = run_dir / s.at("file").get<std::string>();
    if (!fs::exists(file)) continue;
    std::vector<std::string> sh;
    const auto srows = read_csv(file, sh);
    ProfileCurve c;
    c.t = s.at("t").get<double>();
    const auto cx = column(sh, "x"), ca = column(sh, "abs");
    for (const auto& r : srows) {
      c.x.push_back(parse_double(r.at(cx)));
      c.abs.push_back(parse_double(r.at(ca)));
    }
    d.profiles.push_back(std::move(c));
  }
  return d;
}

}  // namespace dnls
