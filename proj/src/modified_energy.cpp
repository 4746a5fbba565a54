#include "dnls/modified_energy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "dnls/observables.hpp"

namespace dnls {

std::vector<Rational> bernoulli(int kmax) {
  if (kmax < 0) throw std::invalid_argument("bernoulli: kmax must be >= 0");
  std::vector<Rational> B(kmax + 1);
  B[0] = 1;
  for (int k = 1; k <= kmax; ++k) {
    // binom(k+1, j) built incrementally
    boost::multiprecision::cpp_int binom = 1;
    Rational acc = 0;
    for (int j = 0; j < k; ++j) {
      acc += Rational(binom) * B[j];
      binom = binom * (k + 1 - j) / (j + 1);
    }
    B[k] = -acc / (k + 1);
  }
  return B;
}

std::vector<double> bernoulli_double(int kmax) {
  const auto B = bernoulli(kmax);
  std::vector<double> out;
  out.reserve(B.size());
  for (const auto& b : B) out.push_back(static_cast<double>(b));
  return out;
}

std::complex<double> phi_filter(double y) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double k = std::round(y / two_pi);
  if (k != 0.0 && std::abs(y - k * two_pi) < 1e-9) {
    throw PoleError("phi_filter: argument " + std::to_string(y) + " sits on a pole");
  }
  if (std::abs(y) < 1e-8) return {1.0 - y * y / 12.0, -0.5 * y};
  const double half = 0.5 * y;
  return {half / std::tan(half), -half};
}

CflReport cfl_check(double h, double tau, int M) {
  if (!(h > 0.0) || !(tau > 0.0) || M < 0) throw std::invalid_argument("cfl_check: need h, tau > 0 and M >= 0");
  CflReport r;
  r.ratio = tau / (h * h);
  r.bound = 2.0 * std::numbers::pi / (3.0 * (2 * M + 3));
  r.pass = r.ratio < r.bound;
  return r;
}

namespace {

// W_abcd = sum_j v_a v_b v_c v_d via product-to-sum: only combinations with
// +-a+-b+-c+-d = 0 mod 2N contribute, each with weight +-1/(2N).
double quartic_overlap(int a, int b, int c, int d, int N) {
  const int twoN = 2 * N;
  const std::array<int, 8> s = {a - b + c - d, a - b - c + d, a - b + c + d, a - b - c - d,
                                a + b + c - d, a + b - c + d, a + b + c + d, a + b - c - d};
  constexpr std::array<int, 8> sign = {1, 1, -1, -1, -1, -1, 1, 1};
  int acc = 0;
  for (int i = 0; i < 8; ++i) {
    if (s[i] % twoN == 0) acc += sign[i];
  }
  return acc / static_cast<double>(twoN);
}

// Distinct d in [1, N-1] that can pair with (a, b, c); at most 8.
int admissible_d(int a, int b, int c, int N, std::array<int, 8>& out) {
  const int twoN = 2 * N;
  const std::array<int, 8> x = {a - b + c, b + c - a, b - a - c, a - b - c,
                                a + b + c, c - a - b, -a - b - c, a + b - c};
  int count = 0;
  for (int v : x) {
    int d = ((v % twoN) + twoN) % twoN;
    if (d < 1 || d > N - 1) continue;
    if (std::find(out.begin(), out.begin() + count, d) == out.begin() + count) out[count++] = d;
  }
  return count;
}

std::vector<int> active_modes(int n, bool odd_only) {
  std::vector<int> modes;
  for (int k = 1; k <= n; ++k) {
    if (!odd_only || (k % 2 == 1)) modes.push_back(k);
  }
  return modes;
}

double filter_sign(Composition order) {
  return order == Composition::potential_first ? -1.0 : 1.0;
}

}  // namespace

std::complex<double> resonant_quartic_sum(const LatticeField& f,
                                          const std::function<std::complex<double>(double)>& weight) {
  const auto& grid = f.grid();
  const int n = grid.npoints();
  const int N = n + 1;
  const auto spec = dst_forward(f);
  const RVector w = omegas(grid);
  const auto modes = active_modes(n, f.symmetric());
  std::complex<double> total{};
  std::array<int, 8> ds{};
  for (int a : modes) {
    for (int b : modes) {
      const auto cab = spec.mode(a) * spec.mode(b);
      for (int c : modes) {
        const int nd = admissible_d(a, b, c, N, ds);
        for (int i = 0; i < nd; ++i) {
          const int d = ds[i];
          if (f.symmetric() && d % 2 == 0) continue;
          const double W = quartic_overlap(a, b, c, d, N);
          if (W == 0.0) continue;
          const double Omega = w[a - 1] + w[b - 1] - w[c - 1] - w[d - 1];
          total += W * cab * std::conj(spec.mode(c) * spec.mode(d)) * weight(Omega);
        }
      }
    }
  }
  return total;
}

FilterTable::FilterTable(const GridSpec& grid, double tau, Composition order, bool odd_modes_only)
    : grid_(grid), tau_(tau), odd_only_(odd_modes_only) {
  const int n = grid.npoints();
  const int N = n + 1;
  if (n > std::numeric_limits<std::uint16_t>::max()) throw std::invalid_argument("FilterTable: grid too large");
  const RVector w = omegas(grid);
  const auto modes = active_modes(n, odd_modes_only);
  const double sgn = filter_sign(order);
  std::array<int, 8> ds{};
  for (std::size_t ia = 0; ia < modes.size(); ++ia) {
    const int a = modes[ia];
    for (std::size_t ib = ia; ib < modes.size(); ++ib) {
      const int b = modes[ib];
      for (int c : modes) {
        if (c < a) continue;  // (a, b) <= (c, d) lexicographically, c <= d
        const int nd = admissible_d(a, b, c, N, ds);
        for (int i = 0; i < nd; ++i) {
          const int d = ds[i];
          if (d < c || (odd_modes_only && d % 2 == 0)) continue;
          if (c == a && d < b) continue;
          const double W = quartic_overlap(a, b, c, d, N);
          if (W == 0.0) continue;
          const double Omega = w[a - 1] + w[b - 1] - w[c - 1] - w[d - 1];
          const double phase = tau * Omega;
          if (std::abs(phase) >= 2.0 * std::numbers::pi - 1e-9) {
            throw PoleError("FilterTable: |tau Omega| = " + std::to_string(std::abs(phase)) +
                            " leaves the pole-free disc; the CFL gate should have rejected this step");
          }
          max_phase_ = std::max(max_phase_, std::abs(phase));
          const bool diag = (a == c && b == d);
          const double mult = (a != b ? 2.0 : 1.0) * (c != d ? 2.0 : 1.0) * (diag ? 1.0 : 2.0);
          entries_.push_back({static_cast<std::uint16_t>(a), static_cast<std::uint16_t>(b),
                              static_cast<std::uint16_t>(c), static_cast<std::uint16_t>(d),
                              mult * W * phi_filter(sgn * phase)});
        }
      }
    }
  }
}

double FilterTable::evaluate(const LatticeField& f) const {
  require_same_grid(f.grid(), grid_);
  if (odd_only_ && !f.symmetric()) {
    throw std::invalid_argument("FilterTable: odd-mode table used on a field not flagged symmetric");
  }
  const auto spec = dst_forward(f);
  const auto& c = spec.coeffs;
  double acc = 0.0;
  for (const auto& e : entries_) {
    const auto mono = c[e.a - 1] * c[e.b - 1] * std::conj(c[e.c - 1] * c[e.d - 1]);
    acc += (e.weight * mono).real();
  }
  return -0.5 * grid_.h() * acc;
}

LatticeField FilterTable::gradient(const LatticeField& f) const {
  require_same_grid(f.grid(), grid_);
  if (odd_only_ && !f.symmetric()) {
    throw std::invalid_argument("FilterTable: odd-mode table used on a field not flagged symmetric");
  }
  const auto spec = dst_forward(f);
  const auto& c = spec.coeffs;
  CVector G = CVector::Zero(c.size());
  for (const auto& e : entries_) {
    const auto ca = c[e.a - 1], cb = c[e.b - 1];
    const auto cc = std::conj(c[e.c - 1]), cd = std::conj(c[e.d - 1]);
    G[e.a - 1] += std::conj(e.weight * cb * cc * cd);
    G[e.b - 1] += std::conj(e.weight * ca * cc * cd);
    G[e.c - 1] += e.weight * ca * cb * cd;
    G[e.d - 1] += e.weight * ca * cb * cc;
  }
  return dst_inverse({grid_, -0.5 * G}, f.symmetric());
}

double hz1_spectral(const LatticeField& f, double tau, Composition order) {
  return FilterTable(f.grid(), tau, order, f.symmetric()).evaluate(f);
}

double h_modified(const LatticeField& f, const ModifiedEnergyConfig& config) {
  const auto gate = cfl_check(f.grid().h(), config.tau, config.M);
  if (!gate.pass) {
    throw CflError("h_modified: tau/h^2 = " + std::to_string(gate.ratio) + " violates the bound " +
                   std::to_string(gate.bound));
  }
  const auto [kinetic, potential] = split_energies(f);
  if (config.mode == ModifiedEnergyMode::first_order_physical) {
    // B_1 = -1/2 term; the sign follows the composition order.
    const double sgn = filter_sign(config.order);
    return kinetic + potential + 0.5 * sgn * bracket_energy(f, config.tau);
  }
  return kinetic + hz1_spectral(f, config.tau, config.order);
}

DriftReport drift_report(const TrajectoryRecord& record, ModifiedEnergyMode mode) {
  DriftReport out;
  if (record.samples.empty()) return out;
  auto hmod = [mode](const EnergyReport& r) {
    return mode == ModifiedEnergyMode::resummed_spectral ? r.H_mod_spec : r.H_mod_phys;
  };
  const auto& first = record.samples.front().report;
  auto& s = out.summary;
  for (const auto& sample : record.samples) {
    DriftRow row;
    row.step = sample.step;
    row.t = sample.t;
    row.N_h = sample.report.N_h;
    row.H_h = sample.report.H_h;
    row.H_mod = hmod(sample.report);
    row.dN = row.N_h - first.N_h;
    row.dH = row.H_h - first.H_h;
    row.dHmod = row.H_mod - hmod(first);
    // std::max drops NaN when it is the second argument; keep it visible.
    auto track = [](double& m, double v) {
      m = (std::isnan(v) || std::isnan(m)) ? std::numeric_limits<double>::quiet_NaN() : std::max(m, std::abs(v));
    };
    track(s.max_dN, row.dN);
    track(s.max_dH, row.dH);
    track(s.max_dHmod, row.dHmod);
    out.rows.push_back(row);
  }
  const auto& last = out.rows.back();
  s.terminal_dN = std::abs(last.dN);
  s.terminal_dH = std::abs(last.dH);
  s.terminal_dHmod = std::abs(last.dHmod);
  const double steps = std::max<double>(1.0, static_cast<double>(last.step - out.rows.front().step));
  s.per_step_dN = s.terminal_dN / steps;
  s.per_step_dH = s.terminal_dH / steps;
  s.per_step_dHmod = s.terminal_dHmod / steps;
  return out;
}

void write_drift_csv(std::ostream& os, const DriftReport& report) {
  os << "step,t,N_h,H_h,H_mod,dN,dH,dHmod\n";
  os.precision(17);
  for (const auto& r : report.rows) {
    os << r.step << ',' << r.t << ',' << r.N_h << ',' << r.H_h << ',' << r.H_mod << ',' << r.dN << ','
       << r.dH << ',' << r.dHmod << '\n';
  }
}

}  // namespace dnls
