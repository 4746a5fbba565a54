#pragma once

#include <optional>
#include <stdexcept>

#include "dnls/lattice.hpp"

namespace dnls {

class ChartDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Tubular coordinates around the phase orbit of a unit-mass reference:
/// field = exp(i alpha) ((1 + r) reference + u), with u orthogonal to
/// reference and i*reference in the real L^2 pairing.
struct OrbitChart {
  LatticeField reference;
  double alpha = 0.0;
  double r = 0.0;
  LatticeField u;

  LatticeField reconstruct() const;
};

struct SplitEnergies {
  double kinetic = 0.0;    // H_A >= 0
  double potential = 0.0;  // H_P <= 0
};

/// Invariants and orbit diagnostics of one field. Modified energies are NaN
/// when they were not evaluated (CFL gate failed or not requested).
struct EnergyReport {
  double H_h = 0.0;
  double N_h = 0.0;
  double H_A = 0.0;
  double H_P = 0.0;
  double H_bracket = 0.0;
  double H_mod_phys = 0.0;
  double H_mod_spec = 0.0;
  double dist = 0.0;
  std::optional<OrbitChart> chart;
};

double hamiltonian_h(const LatticeField& f);
double mass_h(const LatticeField& f);
SplitEnergies split_energies(const LatticeField& f);

/// Gradients with respect to the real pairing <f, g>_h = Re(h sum f conj g):
/// d/de H(f + e v) = <grad, v>_h.
LatticeField grad_h(const LatticeField& f);
LatticeField grad_mass(const LatticeField& f);
/// grad_h of the kinetic part alone (-2 Delta_h f).
LatticeField grad_kinetic(const LatticeField& f);

/// tau times the rate of change of H_P along the kinetic flow,
/// 2 tau h sum Im((Delta_h psi) |psi|^2 conj(psi)). This is the Hamiltonian
/// of the bracket of tau*A with P in the h-weighted symplectic structure
/// that generates the lattice dynamics.
double bracket_energy(const LatticeField& f, double tau);

struct OrbitDistance {
  double dist = 0.0;
  double alpha = 0.0;  // in [0, 2 pi)
};

/// Distance in norm_mu from f to {exp(i a) reference}.
OrbitDistance orbit_distance(const LatticeField& f, const LatticeField& reference,
                             SeminormWeight w = SeminormWeight::fe_exact);

/// Throws ChartDomainError when |z(f)| < 1/2.
OrbitChart orbit_coordinates(const LatticeField& f, const LatticeField& reference);

/// exp(i alpha) ((1 + r) reference + u), with reference used as given.
LatticeField chart_point(double alpha, double r, const LatticeField& u,
                         const LatticeField& reference);

/// -1 + sqrt(1 - N(u)/N(reference)); the mass-preserving radial coordinate.
double r_of_u(const LatticeField& u, const LatticeField& reference);
double reduced_hamiltonian(const LatticeField& u, const LatticeField& reference);

/// Continuous mass and energy of the piecewise-linear interpolant, integrated
/// exactly element by element.
double interpolant_mass(const LatticeField& f);
double interpolant_hamiltonian(const LatticeField& f);

/// h + exp(-nu K h)/h^2 + tau/h.
double epsilon_mu(double h, int K, double tau, double nu);

}  // namespace dnls
