#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/modified_energy.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

class DfpFailure : public std::runtime_error {
 public:
  DfpFailure(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// psi_l -> exp(i tau |psi_l|^2) psi_l.
LatticeField potential_flow(const LatticeField& f, double tau);
/// Exact flow of i psi' = -Delta_h psi: mode k picks up exp(-i tau omega_k).
LatticeField kinetic_flow(const LatticeField& f, double tau);
/// I + tau L + tau^2 L^2 / 2 with L = i Delta_h. Not unitary.
LatticeField taylor2_kinetic(const LatticeField& f, double tau);

struct DfpResult {
  LatticeField field;
  int iterations = 0;
  double residual = 0.0;
};

/// Mass- and energy-conserving Crank-Nicolson step. The implicit relation is
/// solved by fixed-point iteration with the linear part inverted exactly in
/// the sine basis; the tolerance applies to the mu-norm of successive
/// iterates. Throws DfpFailure after maxit.
DfpResult dfp_step(const LatticeField& f, double tau, double tol, int maxit);

/// One step of the configured scheme.
LatticeField step(const LatticeField& f, const StepperConfig& config);

using ObservableHook = std::function<void(std::int64_t step, double t, const LatticeField& field)>;

struct IntegrateOptions {
  double t_end = 1.0;
  /// Steps between samples; step 0 and the last step are always sampled.
  std::int64_t cadence = 1;
  std::vector<double> snapshot_times;
  /// Orbit reference for dist and chart; no orbit diagnostics when absent.
  std::optional<LatticeField> reference;
  /// Evaluate the modified energies at samples when the CFL gate passes.
  bool modified_energy = true;
  int cfl_M = 0;
  SeminormWeight weight = SeminormWeight::fe_exact;
  ObservableHook hook;
};

/// Number of steps for a horizon: ceil(t_end / tau).
std::int64_t step_count(double t_end, double tau);

TrajectoryRecord integrate(const LatticeField& f0, const StepperConfig& config, const IntegrateOptions& options);

/// Report for one field. `table` supplies the resummed H_Z1; pass null to skip
/// the modified energies.
EnergyReport energy_report(const LatticeField& f, double tau, Composition order, const FilterTable* table,
                           const std::optional<LatticeField>& reference, SeminormWeight weight);

}  // namespace dnls
