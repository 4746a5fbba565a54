#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dnls/lattice.hpp"
#include "dnls/modified_energy.hpp"

namespace dnls {

/// (1/sqrt 2) sech(x/2), the standing wave with multiplier 1/4.
double eta(double x);
/// eta as a sampler with decay bound sqrt(2) exp(-|x|/2).
ContinuousSampler soliton_sampler();

inline constexpr double kContinuumMultiplier = 0.25;

enum class SolitonObjective { discrete_hamiltonian, modified_resummed };

struct SolitonOptions {
  /// Defaults to mass_h of the sampled profile.
  std::optional<double> mass_target;
  double tol = 1e-10;
  int maxit = 100000;
  SeminormWeight weight = SeminormWeight::fe_exact;
  SolitonObjective objective = SolitonObjective::discrete_hamiltonian;
  /// Time step entering the resummed objective.
  double tau = 0.0;
};

struct SolitonIteration {
  int iteration = 0;
  double energy = 0.0;
  double residual = 0.0;
  double step = 0.0;
};

struct SolitonPack {
  ContinuousSampler profile;
  LatticeField sampled;
  LatticeField discrete;
  double lambda_mu = 0.0;
  double mass_target = 0.0;
  /// Dual mu-norm of grad_h + lambda_mu grad_mass.
  double kkt_residual = 0.0;
  /// mu-norm of the gradient projected on the tangent of the mass sphere.
  double projected_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<SolitonIteration> log;
};

class SolitonSolveError : public std::runtime_error {
 public:
  SolitonSolveError(const std::string& what, SolitonPack best)
      : std::runtime_error(what), best_(std::move(best)) {}
  /// Best iterate reached before giving up.
  const SolitonPack& best() const { return best_; }

 private:
  SolitonPack best_;
};

/// Constrained minimizer of the discrete energy on the sphere
/// {mass_h = mass_target}, by gradient descent in the mu metric with
/// renormalization and Armijo backtracking, started from the sampled profile.
/// Throws SolitonSolveError on non-convergence or persistent energy increase.
SolitonPack discrete_soliton(const GridSpec& grid, const SolitonOptions& options = {});

/// Columns: iteration,energy,residual,step.
void write_convergence_csv(std::ostream& os, const SolitonPack& pack);

/// (I - w Delta_h)^{-1} f, the Riesz map of the mu inner product.
LatticeField mu_riesz(const LatticeField& f, SeminormWeight w = SeminormWeight::fe_exact);

}  // namespace dnls
