#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nuweak/errors.hpp"
#include "nuweak/kinematics.hpp"
#include "nuweak/pointer.hpp"
#include "nuweak/wavepackets.hpp"

// Neutrino-specific weak values: the momentum and energy measured by the
// detection region under flavor post-selection, the flavor probability
// density/current built from them, and a finite-difference check of the
// continuity equation.

namespace nuweak {

struct FlavorWeakValues {
  complexd p_w{};
  complexd eps_w{};
  double L = 0.0;
  double T = 0.0;
  std::size_t alpha = 0;
  std::size_t beta = 0;
};

struct CurrentSample {
  double rho = 0.0;  // 2 Re{eps_w} |A_ab|^2, units 1/length
  double J = 0.0;    // 2 Re{p_w} |A_ab|^2, units 1/time
  double L = 0.0;
  double T = 0.0;
  std::size_t alpha = 0;
  std::size_t beta = 0;
};

// <nu_a^D| p |nu_a^P(L,T)> = (p_a + i (L - v_a T) / 2 sigma_x^2) A_a(L,T).
// The imaginary part vanishes on the classical trajectory L = v_a T.
inline complexd momentum_matrix_element(const MassStateKinematics& kin,
                                        std::size_t a,
                                        const PacketWidths& widths, double L,
                                        double T) {
  const double y = L - kin.velocity[a] * T;
  const complexd factor(kin.momentum[a],
                        y / (2.0 * widths.sigma_x * widths.sigma_x));
  return factor * amplitude_mass_closed(kin, a, widths, L, T).value;
}

// Energy analogue under the linearized dispersion E_a(p) ~ eps_a + v_a (p -
// p_a): <nu_a^D| H |nu_a^P(L,T)> = (eps_a + i v_a (L - v_a T) / 2 sigma_x^2)
// A_a(L,T).
inline complexd energy_matrix_element(const MassStateKinematics& kin,
                                      std::size_t a,
                                      const PacketWidths& widths, double L,
                                      double T) {
  const double v = kin.velocity[a];
  const double y = L - v * T;
  const complexd factor(kin.epsilon[a],
                        v * y / (2.0 * widths.sigma_x * widths.sigma_x));
  return factor * amplitude_mass_closed(kin, a, widths, L, T).value;
}

namespace detail {

struct FlavorSums {
  complexd amplitude{};   // A_ab = sum_a W_a A_a
  complexd p_numer{};     // sum_a W_a <p>_a
  complexd eps_numer{};   // sum_a W_a <H>_a
  double amp_scale = 0.0;  // max_a |A_a|, reference for the overlap floor
};

inline FlavorSums flavor_sums(const MixingMatrix& U,
                              const MassStateKinematics& kin,
                              const PacketWidths& widths, std::size_t alpha,
                              std::size_t beta, double L, double T) {
  if (kin.n_states() != U.n_flavors())
    throw std::invalid_argument(
        "weakflavor: mixing matrix and kinematics disagree on the number of "
        "states");
  FlavorSums s;
  const double sx2 = widths.sigma_x * widths.sigma_x;
  for (std::size_t a = 0; a < kin.n_states(); ++a) {
    const complexd w = std::conj(U(alpha, a)) * U(beta, a);
    const complexd A = amplitude_mass_closed(kin, a, widths, L, T).value;
    const double y = L - kin.velocity[a] * T;
    s.amplitude += w * A;
    s.p_numer += w * complexd(kin.momentum[a], y / (2.0 * sx2)) * A;
    s.eps_numer +=
        w * complexd(kin.epsilon[a], kin.velocity[a] * y / (2.0 * sx2)) * A;
    s.amp_scale = std::max(s.amp_scale, std::abs(A));
  }
  return s;
}

inline void check_overlap(const FlavorSums& s, double floor,
                          const char* where) {
  // |A_ab| is dimensionful; the floor is relative to the largest per-mass
  // amplitude at the same point.
  if (std::abs(s.amplitude) <= floor * s.amp_scale)
    throw near_orthogonal_error(std::string(where) +
                                ": flavor essentially absent at (L, T)");
}

}  // namespace detail

// p_w^{ab}(L,T) = <nu_b^D| p |nu_a^P(L,T)> / <nu_b^D|nu_a^P(L,T)>.
inline complexd weak_momentum(const MixingMatrix& U,
                              const MassStateKinematics& kin,
                              const PacketWidths& widths, std::size_t alpha,
                              std::size_t beta, double L, double T,
                              double overlap_floor = kDefaultOverlapFloor) {
  const auto s = detail::flavor_sums(U, kin, widths, alpha, beta, L, T);
  detail::check_overlap(s, overlap_floor, "weak_momentum");
  return s.p_numer / s.amplitude;
}

inline complexd weak_energy(const MixingMatrix& U,
                            const MassStateKinematics& kin,
                            const PacketWidths& widths, std::size_t alpha,
                            std::size_t beta, double L, double T,
                            double overlap_floor = kDefaultOverlapFloor) {
  const auto s = detail::flavor_sums(U, kin, widths, alpha, beta, L, T);
  detail::check_overlap(s, overlap_floor, "weak_energy");
  return s.eps_numer / s.amplitude;
}

inline FlavorWeakValues flavor_weak_values(
    const MixingMatrix& U, const MassStateKinematics& kin,
    const PacketWidths& widths, std::size_t alpha, std::size_t beta, double L,
    double T, double overlap_floor = kDefaultOverlapFloor) {
  const auto s = detail::flavor_sums(U, kin, widths, alpha, beta, L, T);
  detail::check_overlap(s, overlap_floor, "flavor_weak_values");
  return FlavorWeakValues{s.p_numer / s.amplitude, s.eps_numer / s.amplitude,
                          L, T, alpha, beta};
}

// rho_ab = 2 Re{eps_w} |A_ab|^2 and J_ab = 2 Re{p_w} |A_ab|^2, evaluated as
// 2 Re{numerator * conj(A_ab)} so the weak-value pole at zeros of A_ab
// cancels analytically instead of numerically.
inline CurrentSample flavor_current(const MixingMatrix& U,
                                    const MassStateKinematics& kin,
                                    const PacketWidths& widths,
                                    std::size_t alpha, std::size_t beta,
                                    double L, double T) {
  const auto s = detail::flavor_sums(U, kin, widths, alpha, beta, L, T);
  CurrentSample out;
  out.rho = 2.0 * std::real(s.eps_numer * std::conj(s.amplitude));
  out.J = 2.0 * std::real(s.p_numer * std::conj(s.amplitude));
  out.L = L;
  out.T = T;
  out.alpha = alpha;
  out.beta = beta;
  return out;
}

struct ContinuityResidual {
  double raw = 0.0;         // sum_beta [d_T rho + d_L J]
  double normalized = 0.0;  // raw / (rho_alpha * E)
};

// Central-difference residual of the flavor-summed continuity equation.
// For the linearized-dispersion amplitudes the analytic residual is
// O(m^4/E^3) * rho, so the finite-difference value converges to a small
// model floor rather than to zero.
inline ContinuityResidual continuity_residual(const MixingMatrix& U,
                                              const MassStateKinematics& kin,
                                              const PacketWidths& widths,
                                              std::size_t alpha, double L,
                                              double T, double h) {
  const double h_max =
      std::min(widths.sigma_x, 2.0 * M_PI / kin.E) / 50.0;
  if (!(h > 0.0) || h > h_max)
    throw std::invalid_argument(
        "continuity_residual: step must satisfy 0 < h <= min(sigma_x, "
        "2 pi / E) / 50");
  double raw = 0.0;
  double rho_here = 0.0;
  for (std::size_t beta = 0; beta < U.n_flavors(); ++beta) {
    const auto t_plus = flavor_current(U, kin, widths, alpha, beta, L, T + h);
    const auto t_minus = flavor_current(U, kin, widths, alpha, beta, L, T - h);
    const auto l_plus = flavor_current(U, kin, widths, alpha, beta, L + h, T);
    const auto l_minus = flavor_current(U, kin, widths, alpha, beta, L - h, T);
    raw += (t_plus.rho - t_minus.rho) / (2.0 * h) +
           (l_plus.J - l_minus.J) / (2.0 * h);
    rho_here += flavor_current(U, kin, widths, alpha, beta, L, T).rho;
  }
  ContinuityResidual out;
  out.raw = raw;
  out.normalized = raw / (rho_here * kin.E);
  return out;
}

}  // namespace nuweak
