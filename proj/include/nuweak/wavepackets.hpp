#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nuweak/kinematics.hpp"
#include "nuweak/quadrature.hpp"

// Gaussian momentum-space envelopes with the correlated one-particle
// normalization, the closed-form coordinate-space amplitude for sharply
// peaked packets, and a brute-force momentum quadrature with the exact
// dispersion relation E_a(p) = sqrt(p^2 + m_a^2).

namespace nuweak {

// phi(p - center) = (2 pi sigma_p^2)^(-1/4) exp(-(p - center)^2 / 4 sigma_p^2),
// normalized so that int |phi|^2 dp = 1.
struct GaussianEnvelope {
  double center = 0.0;
  double sigma_p = 0.0;

  double amplitude(double p) const {
    const double q = p - center;
    return std::pow(2.0 * M_PI * sigma_p * sigma_p, -0.25) *
           std::exp(-q * q / (4.0 * sigma_p * sigma_p));
  }
  double density(double p) const {
    const double a = amplitude(p);
    return a * a;
  }
};

// Production and detection envelopes combine into a single envelope of width
// sigma_p normalized to one detected particle; they are never normalized
// separately.
inline GaussianEnvelope correlated_envelope(const PacketWidths& widths,
                                            double p_center) {
  return GaussianEnvelope{p_center, widths.sigma_p};
}

struct ComplexAmplitude {
  complexd value{};
  double L = 0.0;
  double T = 0.0;
};

// A_a(L,T) = (2 pi 2 eps_a)^(-1/2) (2 pi / sigma_x^2)^(1/4)
//            * exp(-i eps_a T + i p_a L - (L - v_a T)^2 / 4 sigma_x^2).
//
// The phase is evaluated as -eps_a (T - L) - (m_a^2/2E) L, which is the same
// number with the O(E*T) cancellation done analytically; near the light cone
// this keeps the phase accurate even when eps*T alone overflows double
// precision granularity.
inline ComplexAmplitude amplitude_mass_closed(const MassStateKinematics& kin,
                                              std::size_t a,
                                              const PacketWidths& widths,
                                              double L, double T) {
  const double eps = kin.epsilon[a];
  const double v = kin.velocity[a];
  const double sx2 = widths.sigma_x * widths.sigma_x;
  const double y = L - v * T;
  const double pref = std::pow(2.0 * M_PI * 2.0 * eps, -0.5) *
                      std::pow(2.0 * M_PI / sx2, 0.25);
  const double phase = -(eps * (T - L) + kin.energy_momentum_split(a) * L);
  ComplexAmplitude out;
  out.value = pref * std::exp(complexd(-y * y / (4.0 * sx2), phase));
  out.L = L;
  out.T = T;
  return out;
}

struct QuadratureSpec {
  double half_width_sigmas = 10.0;  // window = center +/- k sigma_p, k >= 8
  int initial_nodes = 2048;
  int max_nodes = 1 << 21;
  double self_tol = 1e-9;
};

namespace detail {

// Node-count heuristic for the oscillatory integrand: total phase variation
// across the window is roughly 2 k sigma_p |L - vT| from the linear term plus
// k sigma_p |T| (slope spread) from dispersion curvature.
inline int oscillation_nodes(const QuadratureSpec& spec, double p_lo,
                             double p_hi, double m, double L, double T,
                             double v_center) {
  auto slope = [m](double p) { return p / std::sqrt(p * p + m * m); };
  const double slope_spread =
      std::abs(slope(p_hi) - slope(std::max(p_lo, 1e-300)));
  const double half_width = 0.5 * (p_hi - p_lo);
  const double cycles = (2.0 * half_width * std::abs(L - v_center * T) +
                         slope_spread * half_width * std::abs(T)) /
                        (2.0 * M_PI);
  double n = spec.initial_nodes;
  if (cycles > 1.0) n = std::max(n, 32.0 * std::ceil(cycles));
  return static_cast<int>(std::min(n, static_cast<double>(spec.max_nodes)));
}

}  // namespace detail

// Brute-force oracle for A_a(L,T):
//   int dp / (sqrt(2 pi) sqrt(2 E_a(p))) phi(p - p_a) e^{-i E_a(p) T + i p L}
// with the exact dispersion relation. Agrees with the closed form inside the
// sharp-peak validity window; the residual difference measures the
// linearization, which is the point of keeping both routes.
inline ComplexAmplitude amplitude_mass_quadrature(
    const MassStateKinematics& kin, std::size_t a, const PacketWidths& widths,
    double L, double T, const QuadratureSpec& spec = {}) {
  if (spec.half_width_sigmas < 8.0)
    throw std::invalid_argument(
        "amplitude_mass_quadrature: window must span at least 8 sigma_p");
  const double m = kin.masses[a];
  const double p_a = kin.momentum[a];
  const GaussianEnvelope env = correlated_envelope(widths, p_a);
  const double p_lo = p_a - spec.half_width_sigmas * widths.sigma_p;
  const double p_hi = p_a + spec.half_width_sigmas * widths.sigma_p;

  auto integrand = [&](double p) -> complexd {
    const double E_p = std::sqrt(p * p + m * m);
    const double theta = p * L - E_p * T;
    return env.amplitude(p) / (std::sqrt(2.0 * M_PI) * std::sqrt(2.0 * E_p)) *
           std::exp(complexd(0.0, theta));
  };

  const int n0 = detail::oscillation_nodes(spec, p_lo, p_hi, m, L, T,
                                           kin.velocity[a]);
  const auto res = quadrature::integrate_adaptive(
      integrand, p_lo, p_hi, n0, spec.max_nodes, spec.self_tol);
  ComplexAmplitude out;
  out.value = res.value;
  out.L = L;
  out.T = T;
  return out;
}

// A_{alpha beta}(L,T) = sum_a U*_{alpha a} U_{beta a} A_a(L,T).
inline ComplexAmplitude amplitude_flavor(
    const MixingMatrix& U, std::size_t alpha, std::size_t beta,
    const std::vector<ComplexAmplitude>& per_mass) {
  if (per_mass.size() != U.n_flavors())
    throw std::invalid_argument(
        "amplitude_flavor: need one amplitude per mass eigenstate");
  ComplexAmplitude out;
  out.L = per_mass.empty() ? 0.0 : per_mass[0].L;
  out.T = per_mass.empty() ? 0.0 : per_mass[0].T;
  for (std::size_t a = 0; a < per_mass.size(); ++a)
    out.value += std::conj(U(alpha, a)) * U(beta, a) * per_mass[a].value;
  return out;
}

}  // namespace nuweak
