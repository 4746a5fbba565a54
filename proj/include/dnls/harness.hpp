#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "dnls/integrators.hpp"
#include "dnls/lattice.hpp"
#include "dnls/modified_energy.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

using json = nlohmann::json;

const char* version();

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class InitialKind { sampled_soliton, discrete_soliton, perturbed };

std::string to_string(InitialKind k);
InitialKind initial_kind_from_string(const std::string& s);

struct InitialSpec {
  InitialKind kind = InitialKind::sampled_soliton;
  /// Size of the perturbation in the mu-norm (perturbed only).
  double delta = 0.0;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::string name = "custom";
  double h = 0.1875;
  int K = 80;
  StepperConfig stepper;
  InitialSpec initial;
  double t_end = 100.0;
  std::int64_t cadence = 10;
  /// Empty: no files are written.
  std::string output_dir;
  bool emit_snapshots = false;
  std::vector<double> snapshot_times;
  bool emit_plots = false;
  bool log_drift = true;
  SeminormWeight weight = SeminormWeight::fe_exact;
  int cfl_M = 0;
  bool modified_energy = true;
  /// dist above this marks the soliton shape as destroyed.
  double instability_threshold = 1.0;

  GridSpec grid() const { return {h, K}; }
  /// Throws ConfigError.
  void validate() const;
};

json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
RunConfig run_config_from_json(const json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// E1 (tau = 0.2, lie), E2 (tau = 0.001, taylor2), E3 (tau = 0.02, lie);
/// all on h = 0.1875, K = 80.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

/// Seeded symmetric complex field with unit mu-norm.
LatticeField perturbation_direction(const GridSpec& grid, std::uint64_t seed,
                                    SeminormWeight w = SeminormWeight::fe_exact);
LatticeField initial_field(const RunConfig& config);

struct RunResult {
  RunConfig config;
  TrajectoryRecord record;
  CflReport cfl;
  double eps_mu = 0.0;
  /// First sample time with dist > threshold or blowup.
  std::optional<double> instability_time;
  std::vector<std::string> warnings;
  int exit_code = 0;
};

inline constexpr int kExitCompleted = 0;
inline constexpr int kExitBlowup = 2;
inline constexpr int kExitDfpFailure = 3;
inline constexpr int kExitBadConfig = 64;

int exit_code(RunStatus s);

/// Integrates the configuration and writes manifest.json, trajectory.csv,
/// drift.csv, optional snapshots/ and plots/ under output_dir.
RunResult run(const RunConfig& config);

std::optional<double> first_instability(const TrajectoryRecord& record, double threshold);

/// Columns: step,t,N_h,H_h,H_mod_phys,H_mod_spec,dist,alpha,r,u_norm,max_abs.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& record);
/// Columns: j,x,re,im,abs.
void write_snapshot_csv(std::ostream& os, const LatticeField& f);
json manifest(const RunResult& result);

// ---- plots

struct ProfileCurve {
  double t = 0.0;
  std::vector<double> x, abs;
};

struct PlotData {
  std::string title;
  std::vector<double> t, dist, dN, dH, dHmod;
  std::vector<ProfileCurve> profiles;
};

PlotData plot_data(const TrajectoryRecord& record);
/// Rebuilds plot data from the CSV files of a run directory.
PlotData load_plot_data(const std::filesystem::path& run_dir);

struct PlotOptions {
  bool log_drift = true;
  /// Number of profile panels (first snapshots in time order).
  int panels = 4;
};

/// Writes profiles.svg, dist.svg, drift.svg and plot.gp into dir. Output
/// depends only on the data.
std::vector<std::filesystem::path> emit_plots(const PlotData& data, const std::filesystem::path& dir,
                                              const PlotOptions& options = {});

// ---- validation

struct ValidationSpec {
  std::vector<double> hs = {0.4, 0.2, 0.1};
  double half_width = 15.0;
  double tail_h = 0.1875;
  std::vector<int> tail_Ks = {40, 80, 160};
  /// tau = ratio * h^2 for the operator-norm check.
  double tau_over_h2 = 0.569;
  SeminormWeight weight = SeminormWeight::fe_exact;
  double nu = 0.5;
  int random_fields = 16;
  std::uint64_t seed = 7;
};

struct ValidationEntry {
  std::string parameter;  // e.g. "h=0.2"
  double value = 0.0;
};

struct ValidationCheck {
  std::string name;
  std::string expectation;
  std::vector<ValidationEntry> entries;
  bool pass = false;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
  const ValidationCheck& check(const std::string& name) const;
};

ValidationReport validate(const ValidationSpec& spec = {});
void print_validation(std::ostream& os, const ValidationReport& report);
json to_json(const ValidationReport& report);

/// mu-norm squared of the part of the sampled soliton beyond |j| > K on the
/// infinite lattice, including the jump at the cutoff.
double soliton_tail_energy(double h, int K);
/// mu-operator norm of f -> tau Delta_h f by power iteration.
double kinetic_operator_norm(const GridSpec& grid, double tau, SeminormWeight w, int iterations = 500,
                             std::uint64_t seed = 1);
/// H^1(R) norm of (interpolant of the sampled soliton) - eta.
double soliton_interpolation_error(const GridSpec& grid);

// ---- sweeps

struct SweepSpec {
  RunConfig base;
  std::vector<double> hs, taus, deltas;
  std::vector<int> Ks;
  std::vector<StepperKind> steppers;
  std::vector<std::uint64_t> seeds;
  int workers = 1;
};

SweepSpec sweep_spec_from_json(const json& j);

struct SweepRow {
  double h = 0.0;
  int K = 0;
  double tau = 0.0;
  StepperKind stepper = StepperKind::lie_AP;
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::string status;
  double terminal_dist = 0.0, max_dist = 0.0;
  double max_dN = 0.0, max_dH = 0.0, max_dHmod = 0.0;
  double cfl_ratio = 0.0;
  bool cfl_pass = false;
  double eps_mu = 0.0;
  std::optional<double> instability_time;
};

/// Runs the cartesian product of the parameter lists. Each run writes into
/// its own subdirectory of base.output_dir when that is set. Rows come back
/// sorted by parameters.
std::vector<SweepRow> sweep(const SweepSpec& spec);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace dnls
