#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "dnls/harness.hpp"
#include "dnls/observables.hpp"
#include "dnls/soliton.hpp"

namespace dnls {

namespace {

std::string param(const char* name, double v) {
  std::ostringstream os;
  os << name << '=' << v;
  return os.str();
}

// Constants may shrink under refinement but must not grow by more than 2x
// per halving of h (or doubling of K).
bool stable_under_refinement(const std::vector<ValidationEntry>& e) {
  for (std::size_t i = 0; i + 1 < e.size(); ++i) {
    if (!std::isfinite(e[i + 1].value) || e[i + 1].value > 2.0 * e[i].value) return false;
  }
  return !e.empty();
}

LatticeField random_field(const GridSpec& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CVector v(grid.npoints());
  for (auto& z : v) z = {normal(rng), normal(rng)};
  return {grid, std::move(v), false};
}

std::vector<LatticeField> smooth_fields(const GridSpec& grid) {
  const ContinuousSampler packet{
      [](double x) { return std::exp(-x * x / 8.0) * std::polar(1.0, 0.5 * x); }, 1.0, 0.0};
  const ContinuousSampler bump{[](double x) { return cplx{1.0 / std::cosh(x)}; }, 2.0, 1.0};
  return {project(soliton_sampler(), grid), project(packet, grid), project(bump, grid)};
}

int window(double half_width, double h) { return static_cast<int>(std::lround(half_width / h)); }

}  // namespace

double soliton_tail_energy(double h, int K) {
  double jumps = 0.0, mass = 0.0;
  double prev = 0.0;  // the truncated field vanishes up to j = K
  for (int j = K + 1;; ++j) {
    const double v = eta(h * j);
    jumps += (v - prev) * (v - prev);
    mass += v * v;
    if (v < 1e-200) break;
    prev = v;
  }
  return 2.0 * (jumps / h + h * mass);
}

double soliton_interpolation_error(const GridSpec& grid) {
  static constexpr std::array<double, 5> x = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                              0.9061798459386640};
  static constexpr std::array<double, 5> w = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                              0.2369268850561891, 0.2369268850561891};
  const LatticeField f = project(soliton_sampler(), grid);
  const double h = grid.h();
  const int K = grid.K();
  auto deta = [](double s) { return -std::tanh(0.5 * s) / (2.0 * std::sqrt(2.0) * std::cosh(0.5 * s)); };
  double acc = 0.0;
  for (int j = 0; j <= K; ++j) {
    const double a = f.at(j).real(), b = f.at(j + 1).real();
    const double slope = (b - a) / h;
    for (std::size_t q = 0; q < x.size(); ++q) {
      const double s = 0.5 * (1.0 + x[q]);
      const double pos = h * (j + s);
      const double e0 = (1.0 - s) * a + s * b - eta(pos);
      const double e1 = slope - deta(pos);
      acc += 0.5 * h * w[q] * (e0 * e0 + e1 * e1);
    }
  }
  const double L = h * (K + 1);
  const double one_minus_T = 2.0 / (1.0 + std::exp(L));
  const double T = 1.0 - one_minus_T;
  acc += one_minus_T + one_minus_T * (1.0 + T + T * T) / 12.0;
  return std::sqrt(2.0 * acc);
}

double kinetic_operator_norm(const GridSpec& grid, double tau, SeminormWeight wt, int iterations, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  LatticeField v = random_field(grid, rng);
  v = v * cplx{1.0 / norm_mu(v, wt)};
  double estimate = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const LatticeField u = laplacian(v) * cplx{tau};
    estimate = norm_mu(u, wt);
    v = u * cplx{1.0 / estimate};
  }
  return estimate;
}

ValidationReport validate(const ValidationSpec& spec) {
  ValidationReport report;
  std::vector<double> hs = spec.hs;
  std::sort(hs.begin(), hs.end(), std::greater<>());

  ValidationCheck norm_eq{"norm_equivalence", "|mu-norm^2 - H1(i_h f)^2| / (h H1^2) stable as h halves", {}, false};
  ValidationCheck mass{"mass_closeness", "|N(i_h f) - N_h(f)| / h stable as h halves", {}, false};
  ValidationCheck energy{"energy_closeness", "|H(i_h f) - H_h(f)| / h stable as h halves", {}, false};
  ValidationCheck interp{"interpolation_error", "|i_h pi eta - eta|_H1 / eps(mu) stable as h halves", {}, false};
  ValidationCheck sobolev{"discrete_sobolev", "mu-norm^2 / ((4/h^2 + 1) h sum|f|^2) <= 1 on random fields", {}, true};
  ValidationCheck op3{"kinetic_norm_vs_3tau_h2", "power-iteration |tau Delta_h|_mu / (3 tau/h^2) <= 1", {}, true};
  ValidationCheck op4{"kinetic_norm_vs_4tau_h2", "power-iteration |tau Delta_h|_mu / (4 tau/h^2) <= 1", {}, true};

  std::mt19937_64 rng(spec.seed);
  for (double h : hs) {
    const GridSpec grid(h, window(spec.half_width, h));
    double c_norm = 0.0, c_mass = 0.0, c_energy = 0.0;
    for (const auto& f : smooth_fields(grid)) {
      const auto [d, m] = fe_h1_parts(f);
      const double fe2 = d + m;
      const double mu2 = std::pow(norm_mu(f, spec.weight), 2);
      c_norm = std::max(c_norm, std::abs(mu2 - fe2) / (h * fe2));
      c_mass = std::max(c_mass, std::abs(interpolant_mass(f) - mass_h(f)) / h);
      c_energy = std::max(c_energy, std::abs(interpolant_hamiltonian(f) - hamiltonian_h(f)) / h);
    }
    norm_eq.entries.push_back({param("h", h), c_norm});
    mass.entries.push_back({param("h", h), c_mass});
    energy.entries.push_back({param("h", h), c_energy});
    interp.entries.push_back(
        {param("h", h), soliton_interpolation_error(grid) / epsilon_mu(h, grid.K(), 0.0, spec.nu)});

    double worst = 0.0;
    for (int i = 0; i < spec.random_fields; ++i) {
      const LatticeField f = random_field(grid, rng);
      const double bound = (4.0 / (h * h) + 1.0) * mass_h(f);
      worst = std::max(worst, std::pow(norm_mu(f, spec.weight), 2) / bound);
    }
    sobolev.entries.push_back({param("h", h), worst});
    sobolev.pass = sobolev.pass && worst <= 1.0 + 1e-12;

    const double tau = spec.tau_over_h2 * h * h;
    const double measured = kinetic_operator_norm(grid, tau, spec.weight);
    op3.entries.push_back({param("h", h), measured / (3.0 * tau / (h * h))});
    op4.entries.push_back({param("h", h), measured / (4.0 * tau / (h * h))});
    op3.pass = op3.pass && op3.entries.back().value <= 1.0;
    op4.pass = op4.pass && op4.entries.back().value <= 1.0 + 1e-12;
  }
  norm_eq.pass = stable_under_refinement(norm_eq.entries);
  mass.pass = stable_under_refinement(mass.entries);
  energy.pass = stable_under_refinement(energy.entries);
  interp.pass = stable_under_refinement(interp.entries);

  ValidationCheck gamma_bound{"tail_gamma_bound",
                              "gamma = tail * h^2 * exp(nu K h) bounded (non-increasing in K)", {}, false};
  ValidationCheck gamma_sharp{"tail_gamma_sharp", "tail * h^2 * exp(2 nu K h) within 2x across K", {}, false};
  std::vector<int> Ks = spec.tail_Ks;
  std::sort(Ks.begin(), Ks.end());
  const double ht = spec.tail_h;
  for (int K : Ks) {
    const double tail = soliton_tail_energy(ht, K);
    gamma_bound.entries.push_back({param("K", K), tail * ht * ht * std::exp(spec.nu * K * ht)});
    gamma_sharp.entries.push_back({param("K", K), tail * ht * ht * std::exp(2.0 * spec.nu * K * ht)});
  }
  gamma_bound.pass = !gamma_bound.entries.empty();
  for (std::size_t i = 0; i + 1 < gamma_bound.entries.size(); ++i) {
    gamma_bound.pass = gamma_bound.pass && gamma_bound.entries[i + 1].value <= gamma_bound.entries[i].value;
  }
  if (!gamma_sharp.entries.empty()) {
    const auto [lo, hi] = std::minmax_element(gamma_sharp.entries.begin(), gamma_sharp.entries.end(),
                                              [](const auto& a, const auto& b) { return a.value < b.value; });
    gamma_sharp.pass = lo->value > 0.0 && hi->value <= 2.0 * lo->value;
  }

  report.checks = {norm_eq, mass, energy, interp, gamma_bound, gamma_sharp, sobolev, op3, op4};
  return report;
}

bool ValidationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

const ValidationCheck& ValidationReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no validation check named " + name);
}

void print_validation(std::ostream& os, const ValidationReport& report) {
  for (const auto& c : report.checks) {
    os << (c.pass ? "PASS " : "FAIL ") << c.name << "  (" << c.expectation << ")\n";
    for (const auto& e : c.entries) {
      os << "    " << std::left << std::setw(10) << e.parameter << std::right << std::setprecision(6)
         << std::scientific << e.value << std::defaultfloat << '\n';
    }
  }
}

json to_json(const ValidationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json entries = json::array();
    for (const auto& e : c.entries) entries.push_back({{"parameter", e.parameter}, {"value", e.value}});
    checks.push_back({{"name", c.name}, {"expectation", c.expectation}, {"pass", c.pass}, {"entries", entries}});
  }
  return {{"all_pass", report.all_pass()}, {"checks", checks}};
}

}  // namespace dnls
