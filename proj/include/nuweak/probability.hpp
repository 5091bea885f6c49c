#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nuweak/kinematics.hpp"
#include "nuweak/quadrature.hpp"
#include "nuweak/weakflavor.hpp"

// Closed-form oscillation probabilities: the standard-formalism expression
// (dimensionful, with its normalization defect kept on display) and the
// weak-value expression (dimensionless, unit flavor sum), plus the
// brute-force time integral of the flavor current that connects them.

namespace nuweak {

// The damping exponent Delta_eps^2 / 8 sigma_e^2 admits two readings of
// Delta_eps. `standard` is Delta_eps = xi dm2 / 2E (an energy, matching the
// production/detection coherence condition); `as_written` keeps an extra
// factor of L. Both are provided; `standard` is the default.
enum class DeltaEpsConvention { standard, as_written };

struct PairDecoherence {
  std::size_t a = 0;  // a > b
  std::size_t b = 0;
  double osc_phase = 0.0;            // dm2_ab L / 2E, antisymmetric in (a, b)
  double wp_separation = 0.0;        // (L / L_coh^{ab})^2
  double prod_det_coherence = 0.0;   // Delta_eps_ab^2 / 8 sigma_e^2
};

struct DecoherenceFactors {
  std::vector<PairDecoherence> pairs;  // ordered (1,0), (2,0), (2,1)

  const PairDecoherence& pair(std::size_t a, std::size_t b) const {
    for (const auto& p : pairs)
      if ((p.a == a && p.b == b) || (p.a == b && p.b == a)) return p;
    throw std::invalid_argument("DecoherenceFactors: no such pair");
  }
  double phase(std::size_t a, std::size_t b) const {
    const auto& p = pair(a, b);
    return (p.a == a) ? p.osc_phase : -p.osc_phase;
  }
};

inline DecoherenceFactors decoherence_factors(
    const MassStateKinematics& kin, const PacketWidths& widths, double L,
    DeltaEpsConvention convention = DeltaEpsConvention::standard) {
  if (L < 0.0)
    throw std::invalid_argument("decoherence_factors: L must be >= 0");
  DecoherenceFactors out;
  for (std::size_t a = 1; a < kin.n_states(); ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      PairDecoherence p;
      p.a = a;
      p.b = b;
      const double dm2 = kin.dm2(a, b);
      p.osc_phase = dm2 * L / (2.0 * kin.E);
      const double lcoh = coherence_length(kin.E, dm2, widths.sigma_x);
      const double ratio = L / lcoh;  // 0 for degenerate masses (lcoh = inf)
      p.wp_separation = ratio * ratio;
      double delta_eps = kin.xi * dm2 / (2.0 * kin.E);
      if (convention == DeltaEpsConvention::as_written) delta_eps *= L;
      const double se = sigma_e(widths, kin.velocity[a], kin.velocity[b]);
      p.prod_det_coherence = delta_eps * delta_eps / (8.0 * se * se);
      out.pairs.push_back(p);
    }
  }
  return out;
}

enum class ProbabilityMode { standard, weak_closed, weak_quadrature };
enum class ProbabilityDimension { dimensionless, length };

struct ProbabilityResult {
  double value = 0.0;
  // Imaginary residue of the double sum before taking the real part; exactly
  // the rounding noise for Hermitian-symmetric sums.
  double imag_part = 0.0;
  ProbabilityMode mode = ProbabilityMode::weak_closed;
  ProbabilityDimension dimension = ProbabilityDimension::dimensionless;
};

namespace detail {

inline complexd pair_weight(const MixingMatrix& U, std::size_t alpha,
                            std::size_t beta, std::size_t a, std::size_t b) {
  return std::conj(U(alpha, a)) * U(beta, a) * U(alpha, b) *
         std::conj(U(beta, b));
}

}  // namespace detail

// Standard-formalism probability. Dimensionful (a length in natural units):
// its flavor sum is 2 sqrt(2 pi) sigma_xP sigma_xD / sigma_x *
// sum_a |U_{alpha a}|^2 / v_a rather than 1.
inline ProbabilityResult probability_standard(
    const MixingMatrix& U, const MassStateKinematics& kin,
    const PacketWidths& widths, std::size_t alpha, std::size_t beta, double L,
    DeltaEpsConvention convention = DeltaEpsConvention::standard) {
  const auto fac = decoherence_factors(kin, widths, L, convention);
  const double pref = 2.0 * std::sqrt(2.0 * M_PI) * widths.sigma_xP *
                      widths.sigma_xD / widths.sigma_x;
  complexd sum;
  const std::size_t n = kin.n_states();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double va = kin.velocity[a], vb = kin.velocity[b];
      const double kfac = std::sqrt(2.0 / (va * va + vb * vb));
      double phase = 0.0, damp = 0.0;
      if (a != b) {
        const auto& p = fac.pair(a, b);
        phase = fac.phase(a, b);
        damp = p.wp_separation + p.prod_det_coherence;
      }
      sum += detail::pair_weight(U, alpha, beta, a, b) * kfac *
             std::exp(-damp) * std::exp(complexd(0.0, -phase));
    }
  }
  ProbabilityResult out;
  out.value = pref * sum.real();
  out.imag_part = pref * sum.imag();
  out.mode = ProbabilityMode::standard;
  out.dimension = ProbabilityDimension::length;
  return out;
}

struct ProbabilityOptions {
  // true drops the kinematic prefactor sqrt(2/(v_a^2+v_b^2)) p_a /
  // sqrt(eps_a eps_b) (it is 1 + O(m^2/E^2)); false keeps it.
  bool simplify = true;
  DeltaEpsConvention delta_eps = DeltaEpsConvention::standard;
  // Replace the verbatim p_a in the kinematic factor by sqrt(p_a p_b);
  // the difference is O(m^2/E^2) and only matters with simplify = false.
  bool symmetrize = false;
};

// Weak-value route, closed form. Dimensionless; the flavor sum is 1.
inline ProbabilityResult probability_weak_closed(
    const MixingMatrix& U, const MassStateKinematics& kin,
    const PacketWidths& widths, std::size_t alpha, std::size_t beta, double L,
    const ProbabilityOptions& options = {}) {
  const auto fac = decoherence_factors(kin, widths, L, options.delta_eps);
  complexd sum;
  const std::size_t n = kin.n_states();
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      double kfac = 1.0;
      if (!options.simplify) {
        const double va = kin.velocity[a], vb = kin.velocity[b];
        const double p_eff =
            options.symmetrize
                ? std::sqrt(kin.momentum[a] * kin.momentum[b])
                : kin.momentum[a];
        kfac = std::sqrt(2.0 / (va * va + vb * vb)) * p_eff /
               std::sqrt(kin.epsilon[a] * kin.epsilon[b]);
      }
      double phase = 0.0, damp = 0.0;
      if (a != b) {
        const auto& p = fac.pair(a, b);
        phase = fac.phase(a, b);
        damp = p.wp_separation + p.prod_det_coherence;
      }
      sum += detail::pair_weight(U, alpha, beta, a, b) * kfac *
             std::exp(-damp) * std::exp(complexd(0.0, -phase));
    }
  }
  ProbabilityResult out;
  out.value = sum.real();
  out.imag_part = sum.imag();
  out.mode = ProbabilityMode::weak_closed;
  out.dimension = ProbabilityDimension::dimensionless;
  return out;
}

struct TimeWindowSpec {
  // Window: [min_a L/v_a - k sigma_x, max_a L/v_a + k sigma_x], k >= 8.
  double half_width_sigmas = 10.0;
  int initial_nodes = 2048;
  int max_nodes = 1 << 21;
  double self_tol = 1e-9;
};

// P_{alpha beta}(L) = int dT J_{alpha beta}(L, T), brute force. Agrees with
// probability_weak_closed(simplify = false) up to the neglected
// imaginary-part integral and the first-order phase truncation.
inline ProbabilityResult probability_weak_quadrature(
    const MixingMatrix& U, const MassStateKinematics& kin,
    const PacketWidths& widths, std::size_t alpha, std::size_t beta, double L,
    const TimeWindowSpec& window = {}) {
  if (window.half_width_sigmas < 8.0)
    throw std::invalid_argument(
        "probability_weak_quadrature: window must span at least 8 sigma_x");
  double t_lo = std::numeric_limits<double>::infinity();
  double t_hi = -std::numeric_limits<double>::infinity();
  double dm2_max = 0.0;
  for (std::size_t a = 0; a < kin.n_states(); ++a) {
    t_lo = std::min(t_lo, L / kin.velocity[a]);
    t_hi = std::max(t_hi, L / kin.velocity[a]);
    for (std::size_t b = 0; b < a; ++b)
      dm2_max = std::max(dm2_max, std::abs(kin.dm2(a, b)));
  }
  const double v_min =
      *std::min_element(kin.velocity.begin(), kin.velocity.end());
  const double pad = window.half_width_sigmas * widths.sigma_x / v_min;
  t_lo -= pad;
  t_hi += pad;

  // Resolve both the envelope and the interference beat
  // (period 4 pi E / (xi dm2) when xi != 0).
  const double beat_freq = std::abs(kin.xi) * dm2_max / (2.0 * kin.E);
  const double cycles = beat_freq * (t_hi - t_lo) / (2.0 * M_PI);
  double n0 = std::max<double>(window.initial_nodes,
                               64.0 * (t_hi - t_lo) / widths.sigma_x);
  if (cycles > 1.0) n0 = std::max(n0, 32.0 * std::ceil(cycles));
  const int nodes =
      static_cast<int>(std::min(n0, static_cast<double>(window.max_nodes)));

  auto integrand = [&](double T) {
    return flavor_current(U, kin, widths, alpha, beta, L, T).J;
  };
  const auto res = quadrature::integrate_adaptive(
      integrand, t_lo, t_hi, nodes, window.max_nodes, window.self_tol, 1e-30);
  ProbabilityResult out;
  out.value = res.value;
  out.mode = ProbabilityMode::weak_quadrature;
  out.dimension = ProbabilityDimension::dimensionless;
  return out;
}

}  // namespace nuweak
