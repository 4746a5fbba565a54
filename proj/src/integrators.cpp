#include "dnls/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>

#include "dnls/observables.hpp"

namespace dnls {

std::string to_string(StepperKind k) {
  switch (k) {
    case StepperKind::lie_AP: return "lie_AP";
    case StepperKind::lie_PA: return "lie_PA";
    case StepperKind::taylor2_then_P: return "taylor2_then_P";
    case StepperKind::dfp: return "dfp";
  }
  return "unknown";
}

StepperKind stepper_kind_from_string(const std::string& s) {
  if (s == "lie_AP") return StepperKind::lie_AP;
  if (s == "lie_PA") return StepperKind::lie_PA;
  if (s == "taylor2_then_P" || s == "taylor2") return StepperKind::taylor2_then_P;
  if (s == "dfp") return StepperKind::dfp;
  throw std::invalid_argument("unknown stepper kind '" + s + "'");
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup: return "blowup";
    case RunStatus::dfp_failure: return "dfp_failure";
  }
  return "unknown";
}

void StepperConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("StepperConfig: tau must be positive");
  if (!(dfp_tol > 0.0)) throw std::invalid_argument("StepperConfig: dfp_tol must be positive");
  if (dfp_maxit < 1) throw std::invalid_argument("StepperConfig: dfp_maxit must be >= 1");
  if (!(blowup_threshold > 0.0)) throw std::invalid_argument("StepperConfig: blowup_threshold must be positive");
}

namespace {

// Sine-basis round trips on raw storage; symmetric fields use the half/odd path
// and only odd coefficients are touched.
void to_spectrum(const SineBasis& basis, const CVector& psi, bool sym, CVector& coeffs, CVector& scratch) {
  const int K = basis.K();
  if (sym) {
    basis.forward_half(psi.tail(K + 1), scratch);
    coeffs.setZero(psi.size());
    for (int kk = 0; kk <= K; ++kk) coeffs[2 * kk] = scratch[kk];
  } else {
    basis.apply(psi, coeffs);
  }
}

void from_spectrum(const SineBasis& basis, const CVector& coeffs, bool sym, CVector& psi, CVector& scratch) {
  const int K = basis.K();
  if (sym) {
    CVector odd(K + 1);
    for (int kk = 0; kk <= K; ++kk) odd[kk] = coeffs[2 * kk];
    basis.inverse_half(odd, scratch);
    psi.tail(K + 1) = scratch;
    for (int j = 1; j <= K; ++j) psi[K - j] = psi[K + j];
  } else {
    basis.apply(coeffs, psi);
  }
}

void apply_potential(CVector& psi, double tau) {
  for (auto& v : psi) v *= std::polar(1.0, tau * std::norm(v));
}

void apply_laplacian(const CVector& v, double inv_h2, CVector& out) {
  const auto n = v.size();
  out.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx left = i > 0 ? v[i - 1] : cplx{};
    const cplx right = i + 1 < n ? v[i + 1] : cplx{};
    out[i] = ((right + left) - 2.0 * v[i]) * inv_h2;
  }
}

double mu_norm_raw(const CVector& v, double h) {
  const auto n = v.size();
  double diff = std::norm(v[0]) + std::norm(v[n - 1]);
  for (Eigen::Index i = 0; i + 1 < n; ++i) diff += std::norm(v[i + 1] - v[i]);
  return std::sqrt(diff / h + h * v.squaredNorm());
}

// Allocation-free single-step machinery for one (grid, tau).
class Propagator {
 public:
  Propagator(const GridSpec& grid, const StepperConfig& config)
      : grid_(grid), basis_(grid.basis()), config_(config), inv_h2_(1.0 / (grid.h() * grid.h())) {
    const RVector om = omegas(grid);
    const double tau = config.tau;
    kinetic_phase_.resize(om.size());
    dfp_lhs_.resize(om.size());
    dfp_rhs_.resize(om.size());
    for (Eigen::Index k = 0; k < om.size(); ++k) {
      kinetic_phase_[k] = std::polar(1.0, -tau * om[k]);
      dfp_lhs_[k] = 1.0 / cplx{1.0, 0.5 * tau * om[k]};
      dfp_rhs_[k] = cplx{1.0, -0.5 * tau * om[k]};
    }
  }

  void kinetic(CVector& psi, bool sym) {
    if (sym) {
      const int K = grid_.K();
      basis_.forward_half(psi.tail(K + 1), odd_);
      for (int kk = 0; kk <= K; ++kk) odd_[kk] *= kinetic_phase_[2 * kk];
      basis_.inverse_half(odd_, half_);
      psi.tail(K + 1) = half_;
      for (int j = 1; j <= K; ++j) psi[K - j] = psi[K + j];
    } else {
      basis_.apply(psi, coeffs_);
      coeffs_.array() *= kinetic_phase_.array();
      basis_.apply(coeffs_, psi);
    }
  }

  void taylor2(CVector& psi) {
    const double tau = config_.tau;
    apply_laplacian(psi, inv_h2_, lap_);
    apply_laplacian(lap_, inv_h2_, lap2_);
    psi += cplx{0.0, tau} * lap_ - (0.5 * tau * tau) * lap2_;
  }

  // Returns (iterations, last increment).
  std::pair<int, double> dfp(CVector& psi, bool sym) {
    const double tau = config_.tau;
    const double h = grid_.h();
    to_spectrum(basis_, psi, sym, coeffs_, odd_);
    CVector rhs = coeffs_.cwiseProduct(dfp_rhs_);
    CVector x = psi;
    double inc = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= config_.dfp_maxit; ++it) {
      nonlinear_.resize(psi.size());
      for (Eigen::Index i = 0; i < psi.size(); ++i) {
        nonlinear_[i] = cplx{0.0, 0.25 * tau} * (std::norm(x[i]) + std::norm(psi[i])) * (x[i] + psi[i]);
      }
      to_spectrum(basis_, nonlinear_, sym, coeffs_, odd_);
      coeffs_ = (rhs + coeffs_).cwiseProduct(dfp_lhs_);
      CVector next(psi.size());
      from_spectrum(basis_, coeffs_, sym, next, half_);
      inc = mu_norm_raw(next - x, h);
      x.swap(next);
      if (!x.allFinite()) break;
      if (inc <= config_.dfp_tol) {
        psi = x;
        return {it, inc};
      }
    }
    throw DfpFailure("dfp_step: no convergence after " + std::to_string(config_.dfp_maxit) +
                         " iterations (last increment " + std::to_string(inc) + ")",
                     inc);
  }

  void advance(CVector& psi, bool sym) {
    switch (config_.kind) {
      case StepperKind::lie_AP:
        apply_potential(psi, config_.tau);
        kinetic(psi, sym);
        break;
      case StepperKind::lie_PA:
        kinetic(psi, sym);
        apply_potential(psi, config_.tau);
        break;
      case StepperKind::taylor2_then_P:
        apply_potential(psi, config_.tau);
        taylor2(psi);
        break;
      case StepperKind::dfp:
        dfp(psi, sym);
        break;
    }
  }

 private:
  GridSpec grid_;
  const SineBasis& basis_;
  StepperConfig config_;
  double inv_h2_;
  CVector kinetic_phase_, dfp_lhs_, dfp_rhs_;
  CVector coeffs_, odd_, half_, lap_, lap2_, nonlinear_;
};

}  // namespace

LatticeField potential_flow(const LatticeField& f, double tau) {
  CVector v = f.values();
  apply_potential(v, tau);
  return {f.grid(), std::move(v), f.symmetric()};
}

LatticeField kinetic_flow(const LatticeField& f, double tau) {
  StepperConfig cfg;
  cfg.tau = tau;
  Propagator prop(f.grid(), cfg);
  CVector v = f.values();
  prop.kinetic(v, f.symmetric());
  return {f.grid(), std::move(v), f.symmetric()};
}

LatticeField taylor2_kinetic(const LatticeField& f, double tau) {
  StepperConfig cfg;
  cfg.tau = tau;
  Propagator prop(f.grid(), cfg);
  CVector v = f.values();
  prop.taylor2(v);
  return {f.grid(), std::move(v), f.symmetric()};
}

DfpResult dfp_step(const LatticeField& f, double tau, double tol, int maxit) {
  StepperConfig cfg;
  cfg.kind = StepperKind::dfp;
  cfg.tau = tau;
  cfg.dfp_tol = tol;
  cfg.dfp_maxit = maxit;
  Propagator prop(f.grid(), cfg);
  CVector v = f.values();
  const auto [iterations, residual] = prop.dfp(v, f.symmetric());
  return {LatticeField(f.grid(), std::move(v), f.symmetric()), iterations, residual};
}

LatticeField step(const LatticeField& f, const StepperConfig& config) {
  Propagator prop(f.grid(), config);
  CVector v = f.values();
  prop.advance(v, f.symmetric());
  return {f.grid(), std::move(v), f.symmetric(), !v.allFinite()};
}

std::int64_t step_count(double t_end, double tau) {
  return static_cast<std::int64_t>(std::ceil(t_end / tau - 1e-9));
}

EnergyReport energy_report(const LatticeField& f, double tau, Composition order, const FilterTable* table,
                           const std::optional<LatticeField>& reference, SeminormWeight weight) {
  EnergyReport r;
  const auto [kinetic, potential] = split_energies(f);
  r.H_A = kinetic;
  r.H_P = potential;
  r.H_h = kinetic + potential;
  r.N_h = mass_h(f);
  r.H_bracket = bracket_energy(f, tau);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (table) {
    const double sgn = order == Composition::potential_first ? -1.0 : 1.0;
    r.H_mod_phys = r.H_h + 0.5 * sgn * r.H_bracket;
    r.H_mod_spec = kinetic + table->evaluate(f);
  } else {
    r.H_mod_phys = nan;
    r.H_mod_spec = nan;
  }
  if (reference) {
    r.dist = orbit_distance(f, *reference, weight).dist;
    try {
      r.chart = orbit_coordinates(f, *reference);
    } catch (const ChartDomainError&) {
      r.chart.reset();
    }
  } else {
    r.dist = nan;
  }
  return r;
}

TrajectoryRecord integrate(const LatticeField& f0, const StepperConfig& config, const IntegrateOptions& options) {
  config.validate();
  if (!(options.t_end > 0.0)) throw std::invalid_argument("integrate: t_end must be positive");
  if (options.cadence < 1) throw std::invalid_argument("integrate: cadence must be >= 1");
  if (options.reference) require_same_grid(f0.grid(), options.reference->grid());

  const GridSpec& grid = f0.grid();
  const bool sym = f0.symmetric();
  const std::int64_t nsteps = step_count(options.t_end, config.tau);
  const bool lie = config.kind == StepperKind::lie_AP || config.kind == StepperKind::lie_PA;
  const Composition order =
      config.kind == StepperKind::lie_PA ? Composition::kinetic_first : Composition::potential_first;

  std::unique_ptr<FilterTable> table;
  if (options.modified_energy && lie && cfl_check(grid.h(), config.tau, options.cfl_M).pass) {
    table = std::make_unique<FilterTable>(grid, config.tau, order, sym);
  }

  std::set<std::int64_t> snapshot_steps;
  for (double t : options.snapshot_times) {
    if (t < 0.0) continue;
    snapshot_steps.insert(std::min(nsteps, static_cast<std::int64_t>(std::llround(t / config.tau))));
  }

  TrajectoryRecord rec;
  rec.config = config;
  Propagator prop(grid, config);
  CVector psi = f0.values();

  auto record = [&](std::int64_t n, bool finite) {
    const double t = static_cast<double>(n) * config.tau;
    TrajectorySample s;
    s.step = n;
    s.t = t;
    if (finite) {
      const LatticeField field(grid, psi, sym);
      s.report = energy_report(field, config.tau, order, table.get(), options.reference, options.weight);
      s.max_abs = field.max_abs();
      if (options.hook) options.hook(n, t, field);
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.report = {nan, nan, nan, nan, nan, nan, nan, nan, std::nullopt};
      s.max_abs = std::numeric_limits<double>::infinity();
    }
    rec.samples.push_back(std::move(s));
  };
  auto snapshot = [&](std::int64_t n) {
    if (snapshot_steps.count(n)) {
      rec.snapshots.push_back({n, static_cast<double>(n) * config.tau, LatticeField(grid, psi, sym)});
    }
  };

  record(0, true);
  snapshot(0);
  for (std::int64_t n = 1; n <= nsteps; ++n) {
    try {
      prop.advance(psi, sym);
    } catch (const DfpFailure& e) {
      rec.status = RunStatus::dfp_failure;
      rec.message = e.what();
      rec.steps_taken = n - 1;
      return rec;
    }
    rec.steps_taken = n;
    const bool finite = psi.allFinite();
    if (!finite || psi.cwiseAbs().maxCoeff() > config.blowup_threshold) {
      rec.status = RunStatus::blowup;
      rec.message = "sup|psi| exceeded " + std::to_string(config.blowup_threshold) + " at step " + std::to_string(n);
      record(n, finite);
      return rec;
    }
    if (n % options.cadence == 0 || n == nsteps) record(n, true);
    snapshot(n);
  }
  return rec;
}

}  // namespace dnls
