#include "dnls/lattice.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace dnls {

namespace {

void check_symmetric(const CVector& v) {
  const auto n = v.size();
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    if (v[i] != v[n - 1 - i]) {
      throw std::invalid_argument("LatticeField: values flagged symmetric are not mirror-symmetric");
    }
  }
}

// Views interleaved complex storage as a 2 x n real matrix.
Eigen::Map<const Eigen::MatrixXd> as_real(const CVector& v) {
  return {reinterpret_cast<const double*>(v.data()), 2, v.size()};
}
Eigen::Map<Eigen::MatrixXd> as_real(CVector& v) {
  return {reinterpret_cast<double*>(v.data()), 2, v.size()};
}

}  // namespace

GridSpec::GridSpec(double h, int K) : h_(h), K_(K) {
  if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("GridSpec: h must be positive");
  if (K < 1) throw std::invalid_argument("GridSpec: K must be >= 1");
  basis_ = sine_basis(K);
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (a != b) throw GridMismatch("fields live on different grids");
}

LatticeField::LatticeField(GridSpec grid, CVector values, bool symmetric, bool diverged)
    : grid_(std::move(grid)), values_(std::move(values)), symmetric_(symmetric), diverged_(diverged) {
  if (values_.size() != grid_.npoints()) {
    throw std::invalid_argument("LatticeField: expected " + std::to_string(grid_.npoints()) +
                                " values, got " + std::to_string(values_.size()));
  }
  if (!diverged_ && !values_.allFinite()) {
    throw std::invalid_argument("LatticeField: non-finite value in a field not marked diverged");
  }
  if (symmetric_ && !diverged_) check_symmetric(values_);
}

LatticeField LatticeField::zeros(const GridSpec& grid) {
  return {grid, CVector::Zero(grid.npoints()), true};
}

LatticeField LatticeField::mirrored(const GridSpec& grid, CVector values) {
  const int K = grid.K();
  for (int j = 1; j <= K; ++j) values[K - j] = values[K + j];
  return {grid, std::move(values), true};
}

LatticeField LatticeField::from_real(const GridSpec& grid, const RVector& values, bool symmetric) {
  return {grid, values.cast<cplx>(), symmetric};
}

bool LatticeField::is_real() const {
  return (values_.imag().array() == 0.0).all();
}

double LatticeField::max_abs() const {
  return values_.size() ? values_.cwiseAbs().maxCoeff() : 0.0;
}

LatticeField LatticeField::operator+(const LatticeField& o) const {
  require_same_grid(grid_, o.grid_);
  return {grid_, values_ + o.values_, symmetric_ && o.symmetric_};
}

LatticeField LatticeField::operator-(const LatticeField& o) const {
  require_same_grid(grid_, o.grid_);
  return {grid_, values_ - o.values_, symmetric_ && o.symmetric_};
}

LatticeField LatticeField::operator*(cplx s) const {
  return {grid_, values_ * s, symmetric_};
}

SineBasis::SineBasis(int K) : K_(K), n_(2 * K + 1) {
  const int N = 2 * K + 2;
  const double scale = std::sqrt(2.0 / N);
  S_.resize(n_, n_);
  // Reduce (k m) mod 2N before taking the sine: exact symmetry, small arguments.
  for (int r = 0; r < n_; ++r) {
    for (int c = 0; c < n_; ++c) {
      const long q = (static_cast<long>(r + 1) * (c + 1)) % (2L * N);
      S_(r, c) = scale * std::sin(std::numbers::pi * static_cast<double>(q) / N);
    }
  }
  const int half = K + 1;
  fwd_half_t_.resize(half, half);
  inv_half_t_.resize(half, half);
  for (int kk = 0; kk < half; ++kk) {
    const int row = 2 * kk;  // mode k = 2kk+1
    for (int j = 0; j <= K; ++j) {
      fwd_half_t_(j, kk) = (j == 0 ? 1.0 : 2.0) * S_(row, j + K);
      inv_half_t_(kk, j) = S_(row, j + K);
    }
  }
}

void SineBasis::apply(const CVector& in, CVector& out) const {
  out.resize(n_);
  as_real(out).noalias() = as_real(in) * S_;
}

void SineBasis::forward_half(const CVector& half, CVector& odd) const {
  odd.resize(K_ + 1);
  as_real(odd).noalias() = as_real(half) * fwd_half_t_;
}

void SineBasis::inverse_half(const CVector& odd, CVector& half) const {
  half.resize(K_ + 1);
  as_real(half).noalias() = as_real(odd) * inv_half_t_;
}

std::shared_ptr<const SineBasis> sine_basis(int K) {
  static std::mutex mutex;
  static std::map<int, std::shared_ptr<const SineBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[K];
  if (!slot) slot = std::make_shared<const SineBasis>(K);
  return slot;
}

LatticeField laplacian(const LatticeField& f) {
  const auto& v = f.values();
  const int n = f.size();
  const double inv_h2 = 1.0 / (f.grid().h() * f.grid().h());
  CVector out(n);
  for (int i = 0; i < n; ++i) {
    const cplx left = i > 0 ? v[i - 1] : cplx{};
    const cplx right = i + 1 < n ? v[i + 1] : cplx{};
    out[i] = ((right + left) - 2.0 * v[i]) * inv_h2;
  }
  return {f.grid(), std::move(out), f.symmetric(), f.diverged()};
}

SineSpectrum dst_forward(const LatticeField& f) {
  const auto& basis = f.grid().basis();
  const int K = f.grid().K();
  SineSpectrum s{f.grid(), CVector::Zero(f.size())};
  if (f.symmetric()) {
    CVector odd;
    basis.forward_half(f.values().tail(K + 1), odd);
    for (int kk = 0; kk <= K; ++kk) s.coeffs[2 * kk] = odd[kk];
  } else {
    basis.apply(f.values(), s.coeffs);
  }
  return s;
}

LatticeField dst_inverse(const SineSpectrum& s, bool symmetric) {
  const auto& basis = s.grid.basis();
  const int K = s.grid.K();
  CVector out(s.grid.npoints());
  if (symmetric) {
    CVector odd(K + 1), half;
    for (int kk = 0; kk <= K; ++kk) odd[kk] = s.coeffs[2 * kk];
    basis.inverse_half(odd, half);
    out.tail(K + 1) = half;
    return LatticeField::mirrored(s.grid, std::move(out));
  }
  basis.apply(s.coeffs, out);
  return {s.grid, std::move(out), false};
}

double omega(const GridSpec& grid, int k) {
  if (k < 1 || k > grid.npoints()) throw std::out_of_range("omega: mode index out of range");
  const double s = std::sin(k * std::numbers::pi / (2.0 * (2 * grid.K() + 2)));
  return 4.0 / (grid.h() * grid.h()) * s * s;
}

RVector omegas(const GridSpec& grid) {
  RVector w(grid.npoints());
  for (int k = 1; k <= grid.npoints(); ++k) w[k - 1] = omega(grid, k);
  return w;
}

double difference_sum(const LatticeField& f) {
  const auto& v = f.values();
  const int n = f.size();
  double acc = std::norm(v[0]);  // jump from the zero at -(K+1)
  for (int i = 0; i + 1 < n; ++i) acc += std::norm(v[i + 1] - v[i]);
  acc += std::norm(v[n - 1]);
  return acc / f.grid().h();
}

double norm_mu(const LatticeField& f, SeminormWeight w) {
  return std::sqrt(energy_inner(f, f, w).real());
}

cplx mass_inner(const LatticeField& f, const LatticeField& g) {
  require_same_grid(f.grid(), g.grid());
  // Eigen's dot conjugates its first argument.
  return f.grid().h() * g.values().dot(f.values());
}

cplx energy_inner(const LatticeField& f, const LatticeField& g, SeminormWeight w) {
  require_same_grid(f.grid(), g.grid());
  const auto& a = f.values();
  const auto& b = g.values();
  const int n = f.size();
  auto jump = [n](const CVector& v, int i) {  // v_{i} - v_{i-1}, i = 0..n
    const cplx hi = i < n ? v[i] : cplx{};
    const cplx lo = i > 0 ? v[i - 1] : cplx{};
    return hi - lo;
  };
  cplx diff{};
  for (int i = 0; i <= n; ++i) diff += jump(a, i) * std::conj(jump(b, i));
  const double h = f.grid().h();
  return weight_value(w) * diff / h + mass_inner(f, g);
}

LatticeField project(const ContinuousSampler& sampler, const GridSpec& grid) {
  const int K = grid.K();
  CVector v(grid.npoints());
  for (int j = 0; j <= K; ++j) v[K + j] = sampler(grid.x(j));
  return LatticeField::mirrored(grid, std::move(v));
}

std::pair<double, double> fe_h1_parts(const LatticeField& f) {
  const int K = f.grid().K();
  const double h = f.grid().h();
  double deriv = 0.0, mass = 0.0;
  for (int j = -K - 1; j <= K; ++j) {
    const cplx a = f.at(j), b = f.at(j + 1);
    deriv += std::norm(b - a) / h;
    mass += h / 3.0 * (std::norm(a) + std::norm(b) + (a * std::conj(b)).real());
  }
  return {deriv, mass};
}

double fe_h1_norm(const LatticeField& f) {
  const auto [d, m] = fe_h1_parts(f);
  return std::sqrt(d + m);
}

cplx interpolate(const LatticeField& f, double x) {
  const double t = x / f.grid().h();
  const double fl = std::floor(t);
  const int j = static_cast<int>(fl);
  const double s = t - fl;
  return (1.0 - s) * f.at(j) + s * f.at(j + 1);
}

}  // namespace dnls
