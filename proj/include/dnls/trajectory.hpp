#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/observables.hpp"

namespace dnls {

enum class StepperKind { lie_AP, lie_PA, taylor2_then_P, dfp };

std::string to_string(StepperKind k);
StepperKind stepper_kind_from_string(const std::string& s);

struct StepperConfig {
  StepperKind kind = StepperKind::lie_AP;
  double tau = 0.02;
  double dfp_tol = 1e-13;
  int dfp_maxit = 100;
  double blowup_threshold = 1e3;

  void validate() const;
};

enum class RunStatus { completed, blowup, dfp_failure };

std::string to_string(RunStatus s);

struct TrajectorySample {
  std::int64_t step = 0;
  double t = 0.0;
  EnergyReport report;
  double max_abs = 0.0;
};

struct Snapshot {
  std::int64_t step = 0;
  double t = 0.0;
  LatticeField field;
};

struct TrajectoryRecord {
  StepperConfig config;
  std::vector<TrajectorySample> samples;
  std::vector<Snapshot> snapshots;
  RunStatus status = RunStatus::completed;
  std::int64_t steps_taken = 0;
  std::string message;
};

}  // namespace dnls
