#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dnls/observables.hpp"
#include "dnls/soliton.hpp"
#include "oracles.hpp"

using namespace dnls;
using doctest::Approx;

namespace {

const cplx I{0.0, 1.0};

LatticeField hat() { return {GridSpec(1.0, 1), CVector::Unit(3, 1), true}; }

LatticeField sampled(const GridSpec& g) { return project(soliton_sampler(), g); }

// Removes the components along ref and i*ref in the real mass pairing.
LatticeField tangent(const LatticeField& v, const LatticeField& ref) {
  const double m = mass_h(ref);
  const double a = real_inner(v, ref) / m;
  const double b = real_inner(v, I * ref) / m;
  return v - ref * cplx{a} - (I * ref) * cplx{b};
}

}  // namespace

TEST_CASE("energies on hand-evaluated fields") {
  const GridSpec g(0.5, 6);
  const auto z = LatticeField::zeros(g);
  CHECK(hamiltonian_h(z) == 0.0);
  CHECK(mass_h(z) == 0.0);
  CHECK(split_energies(z).kinetic == 0.0);
  CHECK(split_energies(z).potential == 0.0);
  CHECK(grad_h(z).values().norm() == 0.0);

  CHECK(hamiltonian_h(hat()) == Approx(1.5));
  CHECK(mass_h(hat()) == Approx(1.0));
  const auto s = split_energies(hat());
  CHECK(s.kinetic == Approx(2.0));
  CHECK(s.potential == Approx(-0.5));
}

TEST_CASE("energies match plain sums and split consistently") {
  std::mt19937_64 rng(2);
  const GridSpec g(0.25, 30);
  for (int i = 0; i < 5; ++i) {
    const auto f = oracle::random_field(g, rng);
    const auto s = split_energies(f);
    CHECK(s.kinetic >= 0.0);
    CHECK(s.potential <= 0.0);
    CHECK(s.kinetic == Approx(oracle::kinetic(f)).epsilon(1e-13));
    CHECK(s.potential == Approx(oracle::potential(f)).epsilon(1e-13));
    CHECK(s.kinetic + s.potential == Approx(hamiltonian_h(f)).epsilon(1e-13));
    CHECK(mass_h(f) == Approx(mass_inner(f, f).real()).epsilon(1e-14));
  }
}

TEST_CASE("eigenmode kinetic energy is omega times mass") {
  const GridSpec g(0.3, 12);
  for (int k : {1, 4, 13, 25}) {
    CVector c = CVector::Zero(g.npoints());
    c[k - 1] = 1.0;
    auto v = dst_inverse({g, c});
    v = v * cplx{1.0 / std::sqrt(mass_h(v))};
    CHECK(split_energies(v).kinetic == Approx(omega(g, k)).epsilon(1e-12));
  }
}

TEST_CASE("continuum soliton values on a fine grid") {
  const GridSpec g(0.05, 600);
  const auto f = sampled(g);
  CHECK(mass_h(f) == Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(hamiltonian_h(f) + 1.0 / 6.0) < 5e-3 * g.h() * g.h() + 1e-6);
}

TEST_CASE("gauge invariance") {
  std::mt19937_64 rng(8);
  const GridSpec g(0.2, 25);
  const auto f = oracle::random_field(g, rng, 0.7);
  for (double beta : {0.3, 1.7, -2.9}) {
    const auto r = f * std::polar(1.0, beta);
    CHECK(hamiltonian_h(r) == Approx(hamiltonian_h(f)).epsilon(1e-13));
    CHECK(mass_h(r) == Approx(mass_h(f)).epsilon(1e-13));
    CHECK(split_energies(r).kinetic == Approx(split_energies(f).kinetic).epsilon(1e-13));
    CHECK(split_energies(r).potential == Approx(split_energies(f).potential).epsilon(1e-13));
    CHECK(bracket_energy(r, 0.01) == Approx(bracket_energy(f, 0.01)).epsilon(1e-11));
  }
}

TEST_CASE("gradients agree with directional finite differences") {
  std::mt19937_64 rng(13);
  const GridSpec g(0.3, 15);
  for (int i = 0; i < 10; ++i) {
    const auto f = oracle::random_field(g, rng, 0.5);
    const auto v = oracle::random_field(g, rng);

    const double gm = real_inner(grad_mass(f), v);
    CHECK(std::abs(oracle::directional_fd(mass_h, f, v, 1e-5) - gm) <= 1e-8);

    // Centered differences of a smooth functional err as eps^2: halving eps
    // divides the error by four.
    const double gh = real_inner(grad_h(f), v);
    const double e1 = std::abs(oracle::directional_fd(hamiltonian_h, f, v, 1e-2) - gh);
    const double e2 = std::abs(oracle::directional_fd(hamiltonian_h, f, v, 5e-3) - gh);
    CHECK(e1 / e2 == Approx(4.0).epsilon(0.1));
    CHECK(std::abs(oracle::directional_fd(hamiltonian_h, f, v, 1e-5) - gh) <= 1e-7 * std::abs(gh) + 1e-9);
  }
}

TEST_CASE("bracket energy") {
  const GridSpec g(0.25, 6);
  CHECK(bracket_energy(sampled(g), 0.02) == 0.0);

  std::mt19937_64 rng(17);
  RVector re(g.npoints());
  for (auto& x : re) x = std::normal_distribution<double>()(rng);
  CHECK(bracket_energy(LatticeField::from_real(g, re, false), 0.3) == 0.0);

  // tau times the derivative of H_P along exp(i t Delta_h), from a dense
  // matrix exponential and centered differences.
  const Eigen::MatrixXcd L = oracle::laplacian_matrix(g).cast<cplx>() * I;
  for (int trial = 0; trial < 4; ++trial) {
    const auto f = oracle::random_field(g, rng, 0.6);
    const double eps = 1e-6, tau = 0.02;
    auto hp_at = [&](double t) {
      return oracle::potential({g, oracle::expm(L * cplx{t}) * f.values(), false});
    };
    const double reference = tau * (hp_at(eps) - hp_at(-eps)) / (2.0 * eps);
    const double b = bracket_energy(f, tau);
    CHECK(std::abs(b - reference) <= 1e-7 * std::abs(reference));
    CHECK(bracket_energy(f, 2.0 * tau) == Approx(2.0 * b).epsilon(1e-14));
    CHECK(std::abs(b) <= 2.0 * tau / g.h() * std::pow(norm_mu(f), 4));
  }
}

TEST_CASE("orbit distance") {
  const GridSpec g(0.2, 40);
  const auto ref = sampled(g);

  const auto od = orbit_distance(ref * std::polar(1.0, std::numbers::pi / 3.0), ref);
  CHECK(od.dist < 1e-7);
  CHECK(od.alpha == Approx(std::numbers::pi / 3.0).epsilon(1e-12));

  std::mt19937_64 rng(23);
  auto w = oracle::random_field(g, rng, 0.05);
  w = w - ref * (energy_inner(w, ref) / energy_inner(ref, ref));
  CHECK(orbit_distance(ref + w, ref).dist == Approx(norm_mu(w)).epsilon(1e-10));

  for (int trial = 0; trial < 3; ++trial) {
    const auto f = (ref + oracle::random_field(g, rng, 0.1)) * std::polar(1.0, 2.0 * trial + 0.4);
    const auto d = orbit_distance(f, ref);
    double best = INFINITY, best_a = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * i / n;
      const double v = norm_mu(f - ref * std::polar(1.0, a));
      if (v < best) {
        best = v;
        best_a = a;
      }
    }
    CHECK(d.dist <= best + 1e-12);
    CHECK(best - d.dist <= 1e-6);
    const double da = std::remainder(d.alpha - best_a, 2.0 * std::numbers::pi);
    CHECK(std::abs(da) <= 2.0 * std::numbers::pi / n);
  }
  CHECK_THROWS_AS(orbit_distance(ref, LatticeField::zeros(GridSpec(0.2, 41))), GridMismatch);
}

TEST_CASE("orbit chart") {
  const GridSpec g(0.2, 40);
  const auto ref = sampled(g);

  // The chart works with the unit-mass rescaling of the reference.
  const double unit = std::sqrt(mass_h(ref));
  const auto c0 = orbit_coordinates(ref * cplx{1.0 / unit}, ref);
  CHECK(std::abs(c0.alpha) < 1e-14);
  CHECK(std::abs(c0.r) < 1e-14);
  CHECK(norm_mu(c0.u) < 1e-13);
  CHECK(mass_h(c0.reference) == Approx(1.0).epsilon(1e-14));

  const auto c1 = orbit_coordinates(ref * (1.1 * std::polar(1.0, std::numbers::pi / 4.0) / unit), ref);
  CHECK(c1.alpha == Approx(std::numbers::pi / 4.0).epsilon(1e-13));
  CHECK(c1.r == Approx(0.1).epsilon(1e-13));
  CHECK(norm_mu(c1.u) < 1e-13);

  std::mt19937_64 rng(29);
  double worst_ratio = 0.0;
  for (double size : {1e-3, 1e-2, 5e-2, 1e-1}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto f = (ref + oracle::random_field(g, rng, size)) * std::polar(1.0, 0.7 * trial);
      const auto c = orbit_coordinates(f, ref);
      CHECK(std::abs(real_inner(c.u, c.reference)) <= 1e-12 * norm_mu(c.u));
      CHECK(std::abs(real_inner(c.u, I * c.reference)) <= 1e-12 * norm_mu(c.u));
      CHECK((c.reconstruct() - f).values().norm() <= 1e-12 * f.values().norm());
      worst_ratio = std::max(worst_ratio, norm_mu(c.u) / orbit_distance(f, ref).dist);
    }
  }
  CHECK(worst_ratio <= 2.0);

  CHECK_THROWS_AS(orbit_coordinates(ref * cplx{0.3 / unit}, ref), ChartDomainError);
  CHECK_THROWS_AS(orbit_coordinates(ref, LatticeField::zeros(g)), ChartDomainError);
}

TEST_CASE("radial coordinate keeps the mass") {
  const GridSpec g(0.25, 30);
  const auto ref = sampled(g);
  CHECK(r_of_u(LatticeField::zeros(g), ref) == 0.0);

  std::mt19937_64 rng(31);
  auto u = tangent(oracle::random_field(g, rng), ref);
  u = u * cplx{std::sqrt(0.75 * mass_h(ref) / mass_h(u))};
  CHECK(r_of_u(u, ref) == Approx(-0.5).epsilon(1e-13));

  for (int trial = 0; trial < 5; ++trial) {
    auto v = tangent(oracle::random_field(g, rng), ref);
    v = v * cplx{0.3 * std::sqrt(mass_h(ref) / mass_h(v))};
    const auto p = chart_point(1.1 * trial, r_of_u(v, ref), v, ref);
    CHECK(mass_h(p) == Approx(mass_h(ref)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(r_of_u(ref * cplx{1.2}, ref), ChartDomainError);
  CHECK_THROWS_AS(reduced_hamiltonian(ref, ref), ChartDomainError);
  CHECK(reduced_hamiltonian(LatticeField::zeros(g), ref) == Approx(hamiltonian_h(ref)).epsilon(1e-14));
}

TEST_CASE("reduced Hamiltonian is coercive at the discrete soliton") {
  const GridSpec g(0.4, 15);
  const auto pack = discrete_soliton(g);
  const auto& ref = pack.discrete;
  const int n = g.npoints();

  // Real coordinates x -> (Re, Im); W is the complement of ref and i*ref.
  auto to_field = [&](const Eigen::VectorXd& x) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v[i] = {x[i], x[n + i]};
    return LatticeField(g, v, false);
  };
  Eigen::MatrixXd span(2 * n, 2);
  span.setZero();
  for (int i = 0; i < n; ++i) {
    span(i, 0) = ref.values()[i].real();
    span(n + i, 1) = ref.values()[i].real();
  }
  const Eigen::MatrixXd q = span.householderQr().householderQ();
  const Eigen::MatrixXd W = q.rightCols(2 * n - 2);

  auto F = [&](const Eigen::VectorXd& x) { return reduced_hamiltonian(to_field(x), ref); };
  const int m = static_cast<int>(W.cols());
  const double eps = 1e-3;
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2 * n);
  const double f0 = F(zero);
  Eigen::MatrixXd Hs(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      const Eigen::VectorXd ea = eps * W.col(a), eb = eps * W.col(b);
      const double v = a == b ? (F(ea) - 2.0 * f0 + F(-ea)) / (eps * eps)
                              : (F(ea + eb) - F(ea - eb) - F(eb - ea) + F(-ea - eb)) / (4.0 * eps * eps);
      Hs(a, b) = Hs(b, a) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Hs);
  CHECK(es.eigenvalues().minCoeff() > 0.0);

  std::mt19937_64 rng(37);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd c(m);
    for (auto& x : c) x = normal(rng);
    CHECK(F(1e-2 * W * c.normalized()) >= f0);
  }
}

TEST_CASE("epsilon of mu") {
  CHECK(epsilon_mu(0.1875, 80, 0.0, 0.5) == Approx(0.2032).epsilon(2e-4));
  CHECK(epsilon_mu(0.1875, 80, 0.02, 0.5) == Approx(0.3099).epsilon(2e-4));
  CHECK(epsilon_mu(0.1875, 80, 0.02, 0.5) - epsilon_mu(0.1875, 80, 0.0, 0.5) == Approx(0.02 / 0.1875));
  CHECK(epsilon_mu(0.1875, 100000, 0.02, 0.5) == Approx(0.1875 + 0.02 / 0.1875).epsilon(1e-14));
  for (int K = 10; K < 200; K += 10) CHECK(epsilon_mu(0.2, K + 10, 0.01, 0.5) < epsilon_mu(0.2, K, 0.01, 0.5));
}
