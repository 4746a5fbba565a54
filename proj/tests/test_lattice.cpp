#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dnls/lattice.hpp"
#include "dnls/soliton.hpp"
#include "oracles.hpp"

using namespace dnls;
using doctest::Approx;

namespace {

LatticeField hat() { return {GridSpec(1.0, 1), CVector::Unit(3, 1), true}; }

LatticeField mode(const GridSpec& g, int k) {
  CVector v(g.npoints());
  for (int j = -g.K(); j <= g.K(); ++j) {
    v[g.index(j)] = std::sin(std::numbers::pi * k * (j + g.K() + 1) / (2.0 * g.K() + 2.0));
  }
  return {g, std::move(v), false};
}

double rel_diff(const CVector& a, const CVector& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace

TEST_CASE("grid and field construction guards") {
  CHECK_THROWS_AS(GridSpec(0.0, 4), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(-0.1, 4), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(0.1, 0), std::invalid_argument);
  const GridSpec g(0.25, 4);
  CHECK(g.npoints() == 9);
  CHECK(g.half_width() == Approx(1.0));
  CHECK_THROWS_AS(LatticeField(g, CVector::Zero(8), false), std::invalid_argument);

  CVector asym = CVector::Zero(9);
  asym[0] = 1.0;
  CHECK_THROWS_AS(LatticeField(g, asym, true), std::invalid_argument);

  CVector bad = CVector::Zero(9);
  bad[4] = cplx{std::nan(""), 0.0};
  CHECK_THROWS_AS(LatticeField(g, bad, false), std::invalid_argument);
  CHECK_NOTHROW(LatticeField(g, bad, false, true));

  CHECK_THROWS_AS(LatticeField::zeros(g) + LatticeField::zeros(GridSpec(0.25, 5)), GridMismatch);
}

TEST_CASE("laplacian stencil") {
  const GridSpec g(1.0, 1);
  CHECK(laplacian(LatticeField::zeros(g)).values().norm() == 0.0);

  const auto L = laplacian(hat());
  CHECK(L.values()[0] == cplx{1.0});
  CHECK(L.values()[1] == cplx{-2.0});
  CHECK(L.values()[2] == cplx{1.0});

  const auto v1 = mode(g, 1);
  CHECK(rel_diff(laplacian(v1).values(), -(2.0 - std::sqrt(2.0)) * v1.values()) < 1e-14);
}

TEST_CASE("laplacian matches the dense matrix and is self-adjoint") {
  std::mt19937_64 rng(11);
  const GridSpec g(0.3, 7);
  const Eigen::MatrixXd L = oracle::laplacian_matrix(g);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = oracle::random_field(g, rng);
    const auto e = oracle::random_field(g, rng);
    const CVector dense = L.cast<cplx>() * f.values();
    CHECK(rel_diff(laplacian(f).values(), dense) < 1e-13);
    const cplx lhs = mass_inner(laplacian(f), e);
    const cplx rhs = mass_inner(f, laplacian(e));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
  }
}

TEST_CASE("sine transform") {
  std::mt19937_64 rng(3);
  const GridSpec g(0.2, 20);

  SUBCASE("round trip and Parseval") {
    const auto f = oracle::random_field(g, rng);
    const auto s = dst_forward(f);
    CHECK(rel_diff(dst_inverse(s).values(), f.values()) < 1e-12);
    CHECK(s.coeffs.squaredNorm() == Approx(f.values().squaredNorm()).epsilon(1e-12));
  }

  SUBCASE("symmetric fields have no even modes") {
    const auto f = oracle::random_symmetric(g, rng);
    const auto s = dst_forward(f);
    for (int k = 2; k <= g.npoints(); k += 2) CHECK(std::abs(s.mode(k)) <= 1e-13);
    const auto back = dst_inverse(s, true);
    CHECK(back.symmetric());
    CHECK(rel_diff(back.values(), f.values()) < 1e-12);
  }

  SUBCASE("eigenmode has a single coefficient") {
    const int k = 5;
    const auto s = dst_forward(mode(g, k));
    for (int m = 1; m <= g.npoints(); ++m) {
      if (m == k) {
        CHECK(std::abs(s.mode(m)) > 1.0);
      } else {
        CHECK(std::abs(s.mode(m)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("frequencies") {
  const GridSpec g1(1.0, 1);
  CHECK(omega(g1, 1) == Approx(2.0 - std::sqrt(2.0)).epsilon(1e-14));
  CHECK(omega(g1, 2) == Approx(2.0).epsilon(1e-14));
  CHECK(omega(g1, 3) == Approx(2.0 + std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(omega(g1, 0), std::out_of_range);
  CHECK_THROWS_AS(omega(g1, 4), std::out_of_range);

  const GridSpec big(0.05, 2000);
  const double asymptotic = std::pow(std::numbers::pi / (2.0 * (big.K() + 1) * big.h()), 2);
  CHECK(omega(big, 1) == Approx(asymptotic).epsilon(1e-6));

  const GridSpec g(0.1875, 80);
  const RVector om = omegas(g);
  for (Eigen::Index k = 1; k < om.size(); ++k) CHECK(om[k] > om[k - 1]);
  CHECK(om[om.size() - 1] < 4.0 / (g.h() * g.h()));
}

TEST_CASE("spectral consistency with a dense eigensolve") {
  for (int K = 1; K <= 8; ++K) {
    const GridSpec g(0.7, K);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(-oracle::laplacian_matrix(g));
    const RVector om = omegas(g);
    for (int k = 0; k < g.npoints(); ++k) {
      CHECK(om[k] == Approx(es.eigenvalues()[k]).epsilon(1e-10));
      const Eigen::VectorXd v = es.eigenvectors().col(k);
      const Eigen::VectorXd s = g.basis().matrix().row(k).transpose();
      CHECK(std::min((v - s).norm(), (v + s).norm()) < 1e-10);
    }
  }
}

TEST_CASE("mu norm and pairings") {
  CHECK(norm_mu(LatticeField::zeros(GridSpec(0.5, 3))) == 0.0);
  CHECK(norm_mu(hat()) == Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK(norm_mu(hat(), SeminormWeight::doubled) == Approx(std::sqrt(5.0)).epsilon(1e-15));

  std::mt19937_64 rng(5);
  const GridSpec g(0.15, 30);
  const auto f = oracle::random_field(g, rng);
  const auto e = oracle::random_field(g, rng);
  CHECK(mass_inner(f, f).real() == Approx(oracle::mass(f)).epsilon(1e-13));
  CHECK(mass_inner(f, f).imag() == 0.0);
  const cplx I{0.0, 1.0};
  CHECK(std::abs(mass_inner(f, I * f) + I * mass_inner(f, f)) <= 1e-13 * oracle::mass(f));
  const cplx rot = std::polar(1.0, 0.83);
  CHECK(std::abs(mass_inner(rot * f, rot * e) - mass_inner(f, e)) <= 1e-13 * std::abs(mass_inner(f, e)));
  for (auto w : {SeminormWeight::fe_exact, SeminormWeight::doubled}) {
    const cplx ee = energy_inner(f, f, w);
    CHECK(ee.real() == Approx(norm_mu(f, w) * norm_mu(f, w)).epsilon(1e-13));
    CHECK(std::abs(ee.imag()) <= 1e-13 * ee.real());
  }
  CHECK_THROWS_AS(mass_inner(f, LatticeField::zeros(GridSpec(0.15, 31))), GridMismatch);
}

TEST_CASE("discrete Sobolev inequality") {
  std::mt19937_64 rng(9);
  for (double h : {0.4, 0.2, 0.1, 0.05}) {
    const GridSpec g(h, 40);
    for (int i = 0; i < 20; ++i) {
      const auto f = oracle::random_field(g, rng);
      CHECK(norm_mu(f) * norm_mu(f) <= (4.0 / (h * h) + 1.0) * oracle::mass(f) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("projection") {
  const GridSpec g(0.1875, 80);
  const ContinuousSampler zero{[](double) { return cplx{}; }, 0.0, 0.0};
  CHECK(project(zero, g).values().norm() == 0.0);
  const auto f = project(soliton_sampler(), g);
  CHECK(f.symmetric());
  CHECK(f.at(0).real() == Approx(0.7071067812).epsilon(1e-10));

  const GridSpec fine(0.05, 600);
  const double mass = fine.h() * project(soliton_sampler(), fine).values().squaredNorm();
  CHECK(mass == Approx(2.0).epsilon(1e-6));
}

TEST_CASE("finite element norm") {
  CHECK(fe_h1_norm(LatticeField::zeros(GridSpec(0.5, 2))) == 0.0);
  const auto [d, m] = fe_h1_parts(hat());
  CHECK(d == Approx(2.0).epsilon(1e-15));
  CHECK(m == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(fe_h1_norm(hat()) == Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-15));

  std::mt19937_64 rng(21);
  const GridSpec g(0.3, 10);
  const auto f = oracle::random_field(g, rng);
  CHECK(fe_h1_parts(f).first == Approx(oracle::kinetic(f)).epsilon(1e-13));
  const double L = g.h() * (g.K() + 1);
  const double quad = oracle::integrate([&](double x) { return std::norm(interpolate(f, x)); }, -L, L, 2 * (g.K() + 1));
  CHECK(fe_h1_parts(f).second == Approx(quad).epsilon(1e-12));
}

TEST_CASE("operations preserve parity bitwise") {
  std::mt19937_64 rng(4);
  const GridSpec g(0.2, 15);
  const auto f = oracle::random_symmetric(g, rng);
  for (const auto& out : {laplacian(f), dst_inverse(dst_forward(f), true)}) {
    for (int j = 1; j <= g.K(); ++j) CHECK(out.at(j) == out.at(-j));
  }
}
