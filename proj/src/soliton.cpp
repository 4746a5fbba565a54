#include "dnls/soliton.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>

#include "dnls/observables.hpp"

namespace dnls {

double eta(double x) {
  return 1.0 / (std::sqrt(2.0) * std::cosh(0.5 * x));
}

ContinuousSampler soliton_sampler() {
  return {[](double x) { return cplx{eta(x)}; }, std::sqrt(2.0), 0.5};
}

LatticeField mu_riesz(const LatticeField& f, SeminormWeight w) {
  auto spec = dst_forward(f);
  const double wt = weight_value(w);
  const RVector om = omegas(f.grid());
  for (Eigen::Index k = 0; k < spec.coeffs.size(); ++k) spec.coeffs[k] /= 1.0 + wt * om[k];
  return dst_inverse(spec, f.symmetric());
}

namespace {

struct Objective {
  SolitonObjective kind;
  std::unique_ptr<FilterTable> table;

  double value(const LatticeField& f) const {
    if (!table) return hamiltonian_h(f);
    return split_energies(f).kinetic + table->evaluate(f);
  }
  LatticeField gradient(const LatticeField& f) const {
    if (!table) return grad_h(f);
    return grad_kinetic(f) + table->gradient(f);
  }
};

struct Residuals {
  LatticeField direction;  // projected mu-gradient
  double projected = 0.0;
  double kkt = 0.0;
  double lambda = 0.0;
};

Residuals residuals(const Objective& obj, const LatticeField& psi, SeminormWeight w) {
  const LatticeField g = obj.gradient(psi);
  const LatticeField m = grad_mass(psi);
  const LatticeField Pg = mu_riesz(g, w);
  const LatticeField Pm = mu_riesz(m, w);
  const double c = real_inner(g, Pm) / real_inner(m, Pm);
  Residuals r{Pg - Pm * cplx{c}};
  r.projected = std::sqrt(std::max(0.0, real_inner(r.direction, g - m * cplx{c})));
  r.lambda = -real_inner(g, m) / real_inner(m, m);
  const LatticeField kkt = g + m * cplx{r.lambda};
  r.kkt = std::sqrt(std::max(0.0, real_inner(mu_riesz(kkt, w), kkt)));
  return r;
}

LatticeField rescale_to_mass(const LatticeField& f, double target) {
  return f * cplx{std::sqrt(target / mass_h(f))};
}

}  // namespace

SolitonPack discrete_soliton(const GridSpec& grid, const SolitonOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("discrete_soliton: tol must be positive");
  if (options.maxit < 1) throw std::invalid_argument("discrete_soliton: maxit must be >= 1");

  SolitonPack pack{soliton_sampler(), LatticeField::zeros(grid), LatticeField::zeros(grid), 0.0, 0.0, 0.0, 0.0, 0, false, {}};
  pack.sampled = project(pack.profile, grid);
  pack.mass_target = options.mass_target.value_or(mass_h(pack.sampled));
  if (!(pack.mass_target >= 1e-8)) {
    throw std::invalid_argument("discrete_soliton: mass_target below 1e-8 (the zero field is the trivial minimizer)");
  }

  Objective obj{options.objective, nullptr};
  if (options.objective == SolitonObjective::modified_resummed) {
    obj.table = std::make_unique<FilterTable>(grid, options.tau, Composition::potential_first, true);
  }

  LatticeField psi = rescale_to_mass(pack.sampled, pack.mass_target);
  double energy = obj.value(psi);
  Residuals res = residuals(obj, psi, options.weight);
  double step = 0.5;
  int increases = 0;
  constexpr double kArmijo = 1e-4;
  constexpr double kMaxStep = 4.0;
  const double slack = 8.0 * std::numeric_limits<double>::epsilon();
  const double kNoise = 256.0 * std::numeric_limits<double>::epsilon();

  auto finish = [&](int it, bool converged) {
    pack.discrete = psi;
    pack.lambda_mu = res.lambda;
    pack.kkt_residual = res.kkt;
    pack.projected_residual = res.projected;
    pack.iterations = it;
    pack.converged = converged;
  };

  pack.log.push_back({0, energy, std::max(res.projected, res.kkt), 0.0});
  for (int it = 1; it <= options.maxit; ++it) {
    if (std::max(res.projected, res.kkt) <= options.tol) {
      finish(it - 1, true);
      return pack;
    }
    const double decrease = res.projected * res.projected;
    LatticeField trial = psi;
    double trial_energy = energy;
    bool accepted = false;
    std::optional<Residuals> trial_res;
    for (int bt = 0; bt < 60; ++bt) {
      trial = rescale_to_mass(psi - res.direction * cplx{step}, pack.mass_target);
      trial_energy = obj.value(trial);
      if (trial_energy <= energy - kArmijo * step * decrease + slack * std::abs(energy)) {
        accepted = true;
        break;
      }
      // Below the resolution of the energy, fall back on the residual.
      if (std::abs(trial_energy - energy) <= kNoise * std::abs(energy)) {
        trial_res = residuals(obj, trial, options.weight);
        if (std::max(trial_res->projected, trial_res->kkt) < std::max(res.projected, res.kkt)) {
          accepted = true;
          break;
        }
        trial_res.reset();
      }
      step *= 0.5;
    }
    if (!accepted) {
      finish(it, false);
      throw SolitonSolveError("discrete_soliton: line search failed at iteration " + std::to_string(it), pack);
    }
    increases = trial_energy > energy ? increases + 1 : 0;
    psi = std::move(trial);
    energy = trial_energy;
    res = trial_res ? std::move(*trial_res) : residuals(obj, psi, options.weight);
    pack.log.push_back({it, energy, std::max(res.projected, res.kkt), step});
    if (increases > 100) {
      finish(it, false);
      throw SolitonSolveError("discrete_soliton: energy increased over 100 consecutive iterations", pack);
    }
    step = std::min(kMaxStep, 1.25 * step);
  }
  if (std::max(res.projected, res.kkt) <= options.tol) {
    finish(options.maxit, true);
    return pack;
  }
  finish(options.maxit, false);
  throw SolitonSolveError("discrete_soliton: no convergence after " + std::to_string(options.maxit) +
                              " iterations (residual " + std::to_string(std::max(res.projected, res.kkt)) + ")",
                          pack);
}

void write_convergence_csv(std::ostream& os, const SolitonPack& pack) {
  os << "iteration,energy,residual,step\n";
  os.precision(17);
  for (const auto& r : pack.log) os << r.iteration << ',' << r.energy << ',' << r.residual << ',' << r.step << '\n';
}

}  // namespace dnls
