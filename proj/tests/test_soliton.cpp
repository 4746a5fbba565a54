#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "dnls/observables.hpp"
#include "dnls/soliton.hpp"
#include "oracles.hpp"

using namespace dnls;
using doctest::Approx;

namespace {

// a sech(b x) and its second derivative, with a = 1/sqrt 2, b = 1/2.
double sech(double x) { return 1.0 / std::cosh(x); }
double eta_ref(double x) { return sech(0.5 * x) / std::sqrt(2.0); }
double eta_xx(double x) {
  const double s = sech(0.5 * x);
  return 0.25 * s * (1.0 - 2.0 * s * s) / std::sqrt(2.0);
}

}  // namespace

TEST_CASE("continuum profile") {
  CHECK(eta(0.0) == Approx(0.7071067812).epsilon(1e-10));
  for (double x : {0.0, 1.0, 5.0}) {
    const double e = eta(x);
    CHECK(e == Approx(eta_ref(x)).epsilon(1e-15));
    CHECK(std::abs(-eta_xx(x) - e * e * e + kContinuumMultiplier * e) <= 1e-12);
    CHECK(eta(-x) == eta(x));
  }
  CHECK(oracle::integrate([](double x) { return eta(x) * eta(x); }, -80.0, 80.0, 4000) == Approx(2.0).epsilon(1e-12));
  const auto s = soliton_sampler();
  for (double x : {0.0, 3.0, 20.0}) CHECK(std::abs(s(x)) <= s.c1 * std::exp(-s.nu * std::abs(x)));
}

TEST_CASE("discrete soliton contract") {
  const GridSpec g(0.2, 100);
  const auto pack = discrete_soliton(g);
  CHECK(pack.converged);
  CHECK(pack.discrete.is_real());
  CHECK(pack.discrete.symmetric());
  CHECK(pack.discrete.at(0).real() > 0.0);
  CHECK(pack.mass_target == Approx(mass_h(pack.sampled)).epsilon(1e-15));
  CHECK(mass_h(pack.discrete) == Approx(pack.mass_target).epsilon(1e-12));
  CHECK(pack.kkt_residual <= 1e-10);
  CHECK(pack.projected_residual <= 1e-10);

  const auto r = grad_h(pack.discrete) + grad_mass(pack.discrete) * cplx{pack.lambda_mu};
  CHECK(norm_mu(mu_riesz(r)) <= 1e-10);
  CHECK(pack.lambda_mu == Approx(0.25).epsilon(0.05));
  CHECK(hamiltonian_h(pack.discrete) <= hamiltonian_h(pack.sampled));

  for (std::size_t i = 1; i < pack.log.size(); ++i) CHECK(pack.log[i].energy <= pack.log[i - 1].energy + 1e-14);
}

TEST_CASE("explicit mass target and input guards") {
  const GridSpec g(0.25, 60);
  SolitonOptions opt;
  opt.mass_target = 1.0;
  const auto pack = discrete_soliton(g, opt);
  CHECK(mass_h(pack.discrete) == Approx(1.0).epsilon(1e-12));
  CHECK(pack.converged);

  opt.mass_target = 1e-9;
  CHECK_THROWS_AS(discrete_soliton(g, opt), std::invalid_argument);
  SolitonOptions bad_tol;
  bad_tol.tol = 0.0;
  CHECK_THROWS_AS(discrete_soliton(g, bad_tol), std::invalid_argument);
  SolitonOptions bad_it;
  bad_it.maxit = 0;
  CHECK_THROWS_AS(discrete_soliton(g, bad_it), std::invalid_argument);

  SolitonOptions one;
  one.maxit = 1;
  one.tol = 1e-14;
  try {
    discrete_soliton(g, one);
    FAIL("expected SolitonSolveError");
  } catch (const SolitonSolveError& e) {
    CHECK_FALSE(e.best().converged);
    CHECK(mass_h(e.best().discrete) == Approx(mass_h(e.best().sampled)).epsilon(1e-12));
  }
}

TEST_CASE("consistency with the sampled profile under refinement") {
  std::vector<double> c;
  std::vector<double> lambda;
  for (double h : {0.4, 0.2, 0.1}) {
    const GridSpec g(h, static_cast<int>(std::lround(20.0 / h)));
    const auto pack = discrete_soliton(g);
    CHECK(pack.converged);
    c.push_back(norm_mu(pack.discrete - pack.sampled) / h);
    lambda.push_back(pack.lambda_mu);
  }
  for (std::size_t i = 1; i < c.size(); ++i) {
    CHECK(c[i] <= 2.0 * c[i - 1]);
    CHECK(c[i] * 0.5 < c[i - 1]);
    CHECK(std::abs(lambda[i] - 0.25) < std::abs(lambda[i - 1] - 0.25));
  }
  CHECK(lambda.back() == Approx(0.25).epsilon(1e-3));

  double prev = INFINITY;
  for (int K : {20, 40, 80}) {
    const GridSpec g(0.2, K);
    const auto pack = discrete_soliton(g);
    const double d = norm_mu(pack.discrete - pack.sampled);
    CHECK(d <= prev);
    prev = d;
  }
}

TEST_CASE("discrete soliton minimizes energy at fixed mass") {
  const GridSpec g(0.25, 60);
  const auto pack = discrete_soliton(g);
  const double H0 = hamiltonian_h(pack.discrete);
  const double m = mass_h(pack.discrete);
  std::mt19937_64 rng(41);
  for (int i = 0; i < 100; ++i) {
    auto v = oracle::random_field(g, rng);
    v = v * cplx{1e-3 / norm_mu(v)};
    auto p = pack.discrete + v;
    p = p * cplx{std::sqrt(m / mass_h(p))};
    CHECK(hamiltonian_h(p) >= H0 - 1e-14);
  }
}

TEST_CASE("mu Riesz map inverts I - w Delta_h") {
  std::mt19937_64 rng(43);
  const GridSpec g(0.3, 20);
  const auto f = oracle::random_field(g, rng);
  for (auto w : {SeminormWeight::fe_exact, SeminormWeight::doubled}) {
    const auto r = mu_riesz(f, w);
    const auto back = r - laplacian(r) * cplx{weight_value(w)};
    CHECK((back - f).values().norm() <= 1e-12 * f.values().norm());
  }
}

TEST_CASE("convergence log csv") {
  const auto pack = discrete_soliton(GridSpec(0.4, 30));
  std::ostringstream os;
  write_convergence_csv(os, pack);
  const std::string s = os.str();
  CHECK(s.rfind("iteration,energy,residual,step\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == static_cast<long>(pack.log.size()) + 1);
}
