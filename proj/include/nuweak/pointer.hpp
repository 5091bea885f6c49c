#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nuweak/errors.hpp"
#include "nuweak/kinematics.hpp"

// Finite-dimensional von Neumann measurement model: a Gaussian pointer
// coupled impulsively to a Hermitian observable. Covers the strong-regime
// pointer mixture, weak values under pre- and post-selection, and the
// expectation-value equivalence between the two regimes.
//
// The impulsive coupling is applied as the exact unitary kick e^{i A x_D};
// there is no time discretization of the impulse.

namespace nuweak {

class QuantumState {
 public:
  explicit QuantumState(std::vector<complexd> amplitudes)
      : c_(std::move(amplitudes)) {
    if (c_.empty()) throw std::invalid_argument("QuantumState: empty vector");
    double n2 = 0.0;
    for (const auto& c : c_) n2 += std::norm(c);
    if (!(n2 > 0.0))
      throw std::invalid_argument("QuantumState: zero-norm vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : c_) c *= inv;
  }

  std::size_t dim() const { return c_.size(); }
  complexd operator[](std::size_t i) const { return c_[i]; }

  // <this|other>
  complexd overlap(const QuantumState& other) const {
    if (other.dim() != dim())
      throw std::invalid_argument("QuantumState: dimension mismatch");
    complexd acc;
    for (std::size_t i = 0; i < c_.size(); ++i)
      acc += std::conj(c_[i]) * other.c_[i];
    return acc;
  }

 private:
  std::vector<complexd> c_;
};

// Hermitian observable with its eigendecomposition cached at construction.
class Observable {
 public:
  Observable(std::size_t dim, const std::vector<complexd>& row_major)
      : dim_(dim) {
    if (dim_ == 0 || row_major.size() != dim_ * dim_)
      throw std::invalid_argument("Observable: matrix must be dim x dim");
    m_.resize(dim_, dim_);
    double defect = 0.0;
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        m_(i, j) = row_major[i * dim_ + j];
        defect = std::max(defect,
                          std::abs(row_major[i * dim_ + j] -
                                   std::conj(row_major[j * dim_ + i])));
      }
    if (defect >= 1e-12)
      throw std::invalid_argument("Observable: matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("Observable: eigendecomposition failed");
    evals_ = solver.eigenvalues();
    evecs_ = solver.eigenvectors();
  }

  static Observable diagonal(const std::vector<double>& eigenvalues) {
    const std::size_t n = eigenvalues.size();
    std::vector<complexd> m(n * n);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = eigenvalues[i];
    return Observable(n, m);
  }

  std::size_t dim() const { return dim_; }
  complexd entry(std::size_t i, std::size_t j) const { return m_(i, j); }
  double eigenvalue(std::size_t k) const { return evals_(k); }

  // <e_k|psi>
  complexd eigenvector_overlap(std::size_t k, const QuantumState& psi) const {
    complexd acc;
    for (std::size_t i = 0; i < dim_; ++i)
      acc += std::conj(evecs_(i, k)) * psi[i];
    return acc;
  }

  // <bra|A^n|ket> via the spectral decomposition.
  complexd matrix_element_power(const QuantumState& bra,
                                const QuantumState& ket, int n) const {
    if (bra.dim() != dim_ || ket.dim() != dim_)
      throw std::invalid_argument("Observable: state dimension mismatch");
    if (n < 0) throw std::invalid_argument("Observable: negative power");
    complexd acc;
    for (std::size_t k = 0; k < dim_; ++k)
      acc += std::pow(evals_(k), n) * std::conj(eigenvector_overlap(k, bra)) *
             eigenvector_overlap(k, ket);
    return acc;
  }

  // Smallest nonzero eigenvalue spacing, or 0 when the spectrum is
  // degenerate to rounding.
  double min_nonzero_spacing() const {
    std::vector<double> ev(evals_.data(), evals_.data() + dim_);
    const double spread = std::abs(ev.back() - ev.front());
    const double tol = 1e-12 * std::max(1.0, spread);
    double best = 0.0;
    for (std::size_t k = 1; k < ev.size(); ++k) {
      const double gap = ev[k] - ev[k - 1];
      if (gap > tol && (best == 0.0 || gap < best)) best = gap;
    }
    return best;
  }

 private:
  std::size_t dim_;
  Eigen::MatrixXcd m_;
  Eigen::VectorXd evals_;   // ascending
  Eigen::MatrixXcd evecs_;  // columns
};

// Gaussian pointer wavefunction phi(p_D) with <p_D> = center and spread
// sigma_p; |phi|^2 integrates to 1.
struct GaussianPointer {
  double sigma_p = 0.0;
  double center = 0.0;

  double density(double p_D) const {
    const double x = p_D - center;
    return std::exp(-x * x / (2.0 * sigma_p * sigma_p)) /
           (sigma_p * std::sqrt(2.0 * M_PI));
  }
  complexd amplitude(double p_D) const {
    const double x = p_D - center;
    return std::pow(2.0 * M_PI * sigma_p * sigma_p, -0.25) *
           std::exp(-x * x / (4.0 * sigma_p * sigma_p));
  }
};

enum class MeasurementRegime { strong, weak, intermediate };

struct RegimeReport {
  MeasurementRegime tag = MeasurementRegime::weak;
  // sigma_p / min nonzero eigenvalue spacing; NaN when the spectrum is
  // degenerate (nothing to resolve, measurement is vacuously weak).
  double ratio = std::numeric_limits<double>::quiet_NaN();
};

struct RegimeThresholds {
  double strong_below = 0.1;
  double weak_above = 10.0;
};

inline RegimeReport measurement_regime(const Observable& obs,
                                       const GaussianPointer& pointer,
                                       const RegimeThresholds& thr = {}) {
  RegimeReport rep;
  const double spacing = obs.min_nonzero_spacing();
  if (spacing == 0.0) return rep;  // degenerate spectrum
  rep.ratio = pointer.sigma_p / spacing;
  if (rep.ratio < thr.strong_below)
    rep.tag = MeasurementRegime::strong;
  else if (rep.ratio > thr.weak_above)
    rep.tag = MeasurementRegime::weak;
  else
    rep.tag = MeasurementRegime::intermediate;
  return rep;
}

// P_f(p_D) = sum_k |<e_k|psi_i>|^2 |phi(p_D - a_k)|^2. Exact for any
// sigma_p.
inline double pointer_distribution_strong(const QuantumState& psi_i,
                                          const Observable& obs,
                                          const GaussianPointer& pointer,
                                          double p_D) {
  if (psi_i.dim() != obs.dim())
    throw std::invalid_argument(
        "pointer_distribution_strong: dimension mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < obs.dim(); ++k) {
    const double w = std::norm(obs.eigenvector_overlap(k, psi_i));
    acc += w * pointer.density(p_D - obs.eigenvalue(k));
  }
  return acc;
}

inline constexpr double kDefaultOverlapFloor = 1e-12;

// A_w^n = <psi_f|A^n|psi_i> / <psi_f|psi_i>.
inline complexd weak_value(const QuantumState& psi_i,
                           const QuantumState& psi_f, const Observable& obs,
                           int order = 1,
                           double overlap_floor = kDefaultOverlapFloor) {
  const complexd ov = psi_f.overlap(psi_i);
  if (std::abs(ov) <= overlap_floor)
    throw near_orthogonal_error(
        "weak_value: post-selection nearly orthogonal to pre-selection");
  return obs.matrix_element_power(psi_f, psi_i, order) / ov;
}

struct WeakPointerSample {
  double density = 0.0;  // unnormalized
  complexd overlap{};    // <psi_f|psi_i>
  complexd weak_value{};
  MeasurementRegime regime = MeasurementRegime::weak;
};

// First-order post-selected pointer distribution
//   |<psi_f|psi_i>|^2 e^{(Im A_w)^2 / 2 sigma_p^2} |phi(p_D - Re A_w)|^2.
// The regime tag reports whether the first-order truncation is trustworthy;
// outside the weak regime the value is still returned, the caller decides.
inline WeakPointerSample pointer_distribution_weak_postselected(
    const QuantumState& psi_i, const QuantumState& psi_f,
    const Observable& obs, const GaussianPointer& pointer, double p_D,
    double overlap_floor = kDefaultOverlapFloor) {
  WeakPointerSample out;
  out.regime = measurement_regime(obs, pointer).tag;
  out.overlap = psi_f.overlap(psi_i);
  if (std::abs(out.overlap) <= overlap_floor)
    throw near_orthogonal_error(
        "pointer_distribution_weak_postselected: post-selection nearly "
        "orthogonal to pre-selection");
  out.weak_value = obs.matrix_element_power(psi_f, psi_i, 1) / out.overlap;
  const double im = out.weak_value.imag();
  out.density = std::norm(out.overlap) *
                std::exp(im * im / (2.0 * pointer.sigma_p * pointer.sigma_p)) *
                pointer.density(p_D - out.weak_value.real());
  return out;
}

// Pointer mean of the fully entangled post-measurement state, which equals
// <psi_i|A|psi_i> independently of sigma_p. Both routes are evaluated and
// compared; a mismatch indicates a broken eigendecomposition.
inline double pointer_expectation(const QuantumState& psi_i,
                                  const Observable& obs,
                                  const GaussianPointer& pointer) {
  (void)pointer;  // the mixture mean is sigma_p-independent
  double mixture = 0.0;
  for (std::size_t k = 0; k < obs.dim(); ++k)
    mixture += std::norm(obs.eigenvector_overlap(k, psi_i)) *
               obs.eigenvalue(k);
  const double direct = obs.matrix_element_power(psi_i, psi_i, 1).real();
  if (std::abs(mixture - direct) > 1e-10)
    throw std::logic_error(
        "pointer_expectation: mixture mean disagrees with direct matrix "
        "element");
  return mixture;
}

}  // namespace nuweak
