#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dnls {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Weight on the difference term of the discrete energy norm.
/// `fe_exact` (1) makes the seminorm coincide with the H^1 seminorm of the
/// piecewise-linear interpolant; `doubled` (2) is the literal written form.
enum class SeminormWeight { fe_exact = 1, doubled = 2 };

inline double weight_value(SeminormWeight w) { return static_cast<double>(static_cast<int>(w)); }

class SineBasis;

/// Uniform lattice x_j = j h, j = -K..K, with implicit zeros at +-(K+1).
class GridSpec {
 public:
  GridSpec(double h, int K);

  double h() const { return h_; }
  int K() const { return K_; }
  int npoints() const { return 2 * K_ + 1; }
  /// Half-window width K h.
  double half_width() const { return h_ * K_; }
  /// Storage index of lattice site j.
  int index(int j) const { return j + K_; }
  double x(int j) const { return h_ * j; }

  const SineBasis& basis() const { return *basis_; }

  bool operator==(const GridSpec& o) const { return h_ == o.h_ && K_ == o.K_; }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }

 private:
  double h_;
  int K_;
  std::shared_ptr<const SineBasis> basis_;
};

void require_same_grid(const GridSpec& a, const GridSpec& b);

/// Complex amplitudes psi_j on the interior sites of a grid.
///
/// A field flagged symmetric satisfies psi_j == psi_{-j} bitwise; the
/// constructor rejects asymmetric input carrying the flag. Non-finite
/// values are rejected unless the field is explicitly marked diverged.
class LatticeField {
 public:
  LatticeField(GridSpec grid, CVector values, bool symmetric, bool diverged = false);

  static LatticeField zeros(const GridSpec& grid);
  /// Mirrors the j >= 0 half onto j < 0 and sets the symmetric flag.
  static LatticeField mirrored(const GridSpec& grid, CVector values);
  static LatticeField from_real(const GridSpec& grid, const RVector& values, bool symmetric);

  const GridSpec& grid() const { return grid_; }
  const CVector& values() const { return values_; }
  bool symmetric() const { return symmetric_; }
  bool diverged() const { return diverged_; }
  int size() const { return static_cast<int>(values_.size()); }

  /// Value at lattice site j; zero outside the window.
  cplx at(int j) const {
    return (j < -grid_.K() || j > grid_.K()) ? cplx{} : values_[grid_.index(j)];
  }

  bool is_real() const;
  double max_abs() const;

  LatticeField operator+(const LatticeField& o) const;
  LatticeField operator-(const LatticeField& o) const;
  LatticeField operator*(cplx s) const;
  friend LatticeField operator*(cplx s, const LatticeField& f) { return f * s; }

 private:
  GridSpec grid_;
  CVector values_;
  bool symmetric_;
  bool diverged_;
};

/// Coefficients c_k, k = 1..2K+1, in the orthonormal Dirichlet sine basis.
/// Storage position k-1 holds mode k.
struct SineSpectrum {
  GridSpec grid;
  CVector coeffs;

  cplx mode(int k) const { return coeffs[k - 1]; }
};

/// Orthonormal eigenbasis of the Dirichlet lattice Laplacian on 2K+1 sites.
///
/// v_k(j) = sqrt(2/N) sin(k pi (j+K+1)/N), N = 2K+2. The matrix is symmetric
/// and its own inverse. A reduced pair of matrices acting on the j >= 0 half
/// and on odd modes serves symmetric fields.
class SineBasis {
 public:
  explicit SineBasis(int K);

  int K() const { return K_; }
  int n() const { return n_; }
  /// S(k-1, j+K) = v_k(j).
  const Eigen::MatrixXd& matrix() const { return S_; }

  /// Full transform, in place on interleaved complex storage.
  void apply(const CVector& in, CVector& out) const;
  /// Symmetric fields: half values (j = 0..K) to odd-mode coefficients.
  void forward_half(const CVector& half, CVector& odd) const;
  void inverse_half(const CVector& odd, CVector& half) const;

 private:
  int K_;
  int n_;
  Eigen::MatrixXd S_;
  Eigen::MatrixXd fwd_half_t_;  // transposed (K+1)x(K+1) reduced forward map
  Eigen::MatrixXd inv_half_t_;
};

/// Shared basis for half-width K; cached and read-only.
std::shared_ptr<const SineBasis> sine_basis(int K);

/// Symmetric real-valued sampler with an exponential decay bound
/// |value(x)| <= c1 exp(-nu |x|).
struct ContinuousSampler {
  std::function<cplx(double)> evaluator;
  double c1 = 0.0;
  double nu = 0.0;

  cplx operator()(double x) const { return evaluator(x); }
};

LatticeField laplacian(const LatticeField& f);

SineSpectrum dst_forward(const LatticeField& f);
LatticeField dst_inverse(const SineSpectrum& s, bool symmetric = false);

/// Eigenvalue of -Delta_h on mode k: (4/h^2) sin^2(k pi / (2(2K+2))).
double omega(const GridSpec& grid, int k);
RVector omegas(const GridSpec& grid);

double norm_mu(const LatticeField& f, SeminormWeight w = SeminormWeight::fe_exact);
/// Seminorm part only: h sum |psi_{j+1}-psi_j|^2 / h^2 over all jumps, without weight.
double difference_sum(const LatticeField& f);

/// h sum f_j conj(g_j); its real part is the real L^2 pairing.
cplx mass_inner(const LatticeField& f, const LatticeField& g);
/// Adds the weighted difference pairing so energy_inner(f, f) == norm_mu(f)^2.
cplx energy_inner(const LatticeField& f, const LatticeField& g,
                  SeminormWeight w = SeminormWeight::fe_exact);
inline double real_inner(const LatticeField& f, const LatticeField& g) {
  return mass_inner(f, g).real();
}

LatticeField project(const ContinuousSampler& sampler, const GridSpec& grid);

/// Exact H^1(R) norm of the piecewise-linear interpolant.
double fe_h1_norm(const LatticeField& f);
/// The two parts of fe_h1_norm^2: (int |d/dx i_h f|^2, int |i_h f|^2).
std::pair<double, double> fe_h1_parts(const LatticeField& f);
/// Value of the interpolant at x.
cplx interpolate(const LatticeField& f, double x);

}  // namespace dnls
