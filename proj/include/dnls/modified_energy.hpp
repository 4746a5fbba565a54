#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dnls/lattice.hpp"
#include "dnls/trajectory.hpp"

namespace dnls {

using Rational = boost::multiprecision::cpp_rational;

class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class CflError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// B_0..B_kmax from sum_{j<=k} C(k+1, j) B_j = 0, B_0 = 1 (so B_1 = -1/2).
std::vector<Rational> bernoulli(int kmax);
std::vector<double> bernoulli_double(int kmax);

/// x / (e^x - 1) at x = i y: (y/2) cot(y/2) - i y/2, with phi(0) = 1.
/// Throws PoleError within 1e-9 of a nonzero multiple of 2 pi.
std::complex<double> phi_filter(double y);

struct CflReport {
  double ratio = 0.0;  // tau / h^2
  double bound = 0.0;  // 2 pi / (3 (2M + 3))
  bool pass = false;
};

CflReport cfl_check(double h, double tau, int M);

/// Which factor of a Lie step acts first. `potential_first` is
/// psi -> Phi_A(Phi_P(psi)).
enum class Composition { potential_first, kinetic_first };

/// sum over (a,b,c,d) of W_abcd c_a c_b conj(c_c c_d) weight(Omega_abcd),
/// W_abcd = sum_j v_a v_b v_c v_d and Omega = w_a + w_b - w_c - w_d. With a
/// unit weight this is sum_j |psi_j|^4. Only the selection-rule survivors are
/// visited: for each (a, b, c) the admissible d solve +-a+-b+-c+-d = 0 mod 2N.
std::complex<double> resonant_quartic_sum(const LatticeField& f,
                                          const std::function<std::complex<double>(double)>& weight);

/// Filter weights phi(-+ i tau Omega) for every surviving quartic monomial on
/// one grid, folded over the index symmetries. Immutable once built.
class FilterTable {
 public:
  FilterTable(const GridSpec& grid, double tau, Composition order, bool odd_modes_only);

  const GridSpec& grid() const { return grid_; }
  double tau() const { return tau_; }
  bool odd_modes_only() const { return odd_only_; }
  std::size_t size() const { return entries_.size(); }
  /// Largest |tau Omega| among the entries; always < 2 pi.
  double max_phase() const { return max_phase_; }

  /// H_{Z1}(f) = -(h/2) Re sum W c c conj(c c) phi(...).
  double evaluate(const LatticeField& f) const;
  /// Gradient of evaluate() in the real pairing <., .>_h.
  LatticeField gradient(const LatticeField& f) const;

 private:
  struct Entry {
    std::uint16_t a, b, c, d;
    std::complex<double> weight;
  };
  GridSpec grid_;
  double tau_;
  bool odd_only_;
  double max_phase_ = 0.0;
  std::vector<Entry> entries_;
};

/// Resummed first-order correction of the potential part. Equals H_P at
/// tau = 0 and H_P -+ bracket_energy/2 to first order in tau.
double hz1_spectral(const LatticeField& f, double tau, Composition order = Composition::potential_first);

enum class ModifiedEnergyMode { first_order_physical, resummed_spectral };

struct ModifiedEnergyConfig {
  ModifiedEnergyMode mode = ModifiedEnergyMode::resummed_spectral;
  int M = 0;
  double tau = 0.0;
  Composition order = Composition::potential_first;
};

/// Throws CflError when the gate fails for (h, tau, M).
double h_modified(const LatticeField& f, const ModifiedEnergyConfig& config);

struct DriftRow {
  std::int64_t step = 0;
  double t = 0.0;
  double N_h = 0.0, H_h = 0.0, H_mod = 0.0;
  double dN = 0.0, dH = 0.0, dHmod = 0.0;
};

struct DriftSummary {
  double max_dN = 0.0, max_dH = 0.0, max_dHmod = 0.0;
  double terminal_dN = 0.0, terminal_dH = 0.0, terminal_dHmod = 0.0;
  /// terminal drift divided by the number of steps
  double per_step_dN = 0.0, per_step_dH = 0.0, per_step_dHmod = 0.0;
};

struct DriftReport {
  std::vector<DriftRow> rows;
  DriftSummary summary;
};

/// Drift of N_h, H_h and the selected modified energy relative to the first
/// sample. NaN modified energies propagate as NaN.
DriftReport drift_report(const TrajectoryRecord& record, ModifiedEnergyMode mode);

/// Columns: step,t,N_h,H_h,H_mod,dN,dH,dHmod.
void write_drift_csv(std::ostream& os, const DriftReport& report);

}  // namespace dnls
