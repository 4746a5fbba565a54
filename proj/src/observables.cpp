#include "dnls/observables.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace dnls {

LatticeField OrbitChart::reconstruct() const {
  return chart_point(alpha, r, u, reference);
}

double mass_h(const LatticeField& f) {
  return f.grid().h() * f.values().squaredNorm();
}

SplitEnergies split_energies(const LatticeField& f) {
  const double quartic = f.values().cwiseAbs2().squaredNorm();
  return {difference_sum(f), -0.5 * f.grid().h() * quartic};
}

double hamiltonian_h(const LatticeField& f) {
  const auto [a, p] = split_energies(f);
  return a + p;
}

LatticeField grad_kinetic(const LatticeField& f) {
  auto lap = laplacian(f);
  return lap * cplx{-2.0};
}

LatticeField grad_h(const LatticeField& f) {
  const auto lap = laplacian(f);
  const auto& v = f.values();
  CVector g = -2.0 * lap.values() - 2.0 * (v.cwiseAbs2().cast<cplx>().cwiseProduct(v));
  return {f.grid(), std::move(g), f.symmetric()};
}

LatticeField grad_mass(const LatticeField& f) {
  return f * cplx{2.0};
}

double bracket_energy(const LatticeField& f, double tau) {
  const auto lap = laplacian(f);
  const auto& v = f.values();
  double acc = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    acc += (lap.values()[i] * std::norm(v[i]) * std::conj(v[i])).imag();
  }
  return 2.0 * tau * f.grid().h() * acc;
}

namespace {
double wrap_phase(double a) {
  a = std::fmod(a, 2.0 * std::numbers::pi);
  return a < 0.0 ? a + 2.0 * std::numbers::pi : a;
}
}  // namespace

OrbitDistance orbit_distance(const LatticeField& f, const LatticeField& reference, SeminormWeight w) {
  require_same_grid(f.grid(), reference.grid());
  const cplx p = energy_inner(f, reference, w);
  const double ff = energy_inner(f, f, w).real();
  const double rr = energy_inner(reference, reference, w).real();
  const double d2 = ff + rr - 2.0 * std::abs(p);
  return {std::sqrt(std::max(d2, 0.0)), std::abs(p) > 0.0 ? wrap_phase(std::arg(p)) : 0.0};
}

LatticeField chart_point(double alpha, double r, const LatticeField& u, const LatticeField& reference) {
  require_same_grid(u.grid(), reference.grid());
  const cplx phase = std::polar(1.0, alpha);
  return (reference * cplx{1.0 + r} + u) * phase;
}

OrbitChart orbit_coordinates(const LatticeField& f, const LatticeField& reference) {
  require_same_grid(f.grid(), reference.grid());
  const double m = mass_h(reference);
  if (!(m > 0.0)) throw ChartDomainError("orbit_coordinates: reference has zero mass");
  const LatticeField unit = reference * cplx{1.0 / std::sqrt(m)};
  const cplx z = mass_inner(f, unit);
  if (std::abs(z) < 0.5) {
    throw ChartDomainError("orbit_coordinates: |z| = " + std::to_string(std::abs(z)) +
                           " is below 1/2, outside the chart");
  }
  const double alpha = wrap_phase(std::arg(z));
  const double r = std::abs(z) - 1.0;
  LatticeField u = f * std::polar(1.0, -alpha) - unit * cplx{1.0 + r};
  return {unit, alpha, r, std::move(u)};
}

double r_of_u(const LatticeField& u, const LatticeField& reference) {
  const double radicand = 1.0 - mass_h(u) / mass_h(reference);
  if (!(radicand > 0.0)) throw ChartDomainError("r_of_u: N(u) >= N(reference)");
  return -1.0 + std::sqrt(radicand);
}

double reduced_hamiltonian(const LatticeField& u, const LatticeField& reference) {
  return hamiltonian_h(chart_point(0.0, r_of_u(u, reference), u, reference));
}

double interpolant_mass(const LatticeField& f) {
  return fe_h1_parts(f).second;
}

double interpolant_hamiltonian(const LatticeField& f) {
  // |i_h f|^4 is a quartic polynomial on each element: 3-point Gauss is exact.
  const double g = std::sqrt(0.6);
  const std::array<double, 3> nodes = {0.5 * (1.0 - g), 0.5, 0.5 * (1.0 + g)};
  const std::array<double, 3> weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const int K = f.grid().K();
  const double h = f.grid().h();
  double quartic = 0.0;
  for (int j = -K - 1; j <= K; ++j) {
    const cplx a = f.at(j), b = f.at(j + 1);
    for (int q = 0; q < 3; ++q) {
      const double m = std::norm((1.0 - nodes[q]) * a + nodes[q] * b);
      quartic += weights[q] * h * m * m;
    }
  }
  return fe_h1_parts(f).first - 0.5 * quartic;
}

double epsilon_mu(double h, int K, double tau, double nu) {
  return h + std::exp(-nu * K * h) / (h * h) + tau / h;
}

}  // namespace dnls
