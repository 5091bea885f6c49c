#pragma once

// Test-only brute-force oracles. These deliberately re-derive quantities from
// the defining integrals rather than calling the closed-form code paths they
// are used to check.

#include <cmath>
#include <complex>
#include <functional>

#include "nuweak/kinematics.hpp"
#include "nuweak/pointer.hpp"
#include "nuweak/quadrature.hpp"

namespace oracle {

using nuweak::complexd;

enum class Weight { one, momentum, energy };

// int dp w(p) phi(p - p_a) e^{-i E_a(p) T + i p L} / (sqrt(2 pi) sqrt(2
// E_a(p))) with the exact dispersion E_a(p) = sqrt(p^2 + m^2), over
// p_a +/- half_width_sigmas * sigma_p.
inline complexd moment_quadrature(double m, double p_a, double sigma_p,
                                  double L, double T, Weight weight,
                                  double half_width_sigmas = 10.0,
                                  int nodes = 1 << 15) {
  const double lo = p_a - half_width_sigmas * sigma_p;
  const double hi = p_a + half_width_sigmas * sigma_p;
  auto f = [&](double p) -> complexd {
    const double E_p = std::sqrt(p * p + m * m);
    double w = 1.0;
    if (weight == Weight::momentum) w = p;
    if (weight == Weight::energy) w = E_p;
    const double q = p - p_a;
    const double envelope =
        std::pow(2.0 * M_PI * sigma_p * sigma_p, -0.25) *
        std::exp(-q * q / (4.0 * sigma_p * sigma_p));
    return w * envelope /
           (std::sqrt(2.0 * M_PI) * std::sqrt(2.0 * E_p)) *
           std::exp(complexd(0.0, p * L - E_p * T));
  };
  return nuweak::quadrature::integrate(f, lo, hi, nodes);
}

// Exact post-selected pointer wavefunction: the impulsive kick applied by
// spectral decomposition, Omega(p_D) = sum_k <psi_f|e_k><e_k|psi_i>
// phi(p_D - center - a_k). No weak-regime truncation anywhere.
inline double exact_postselected_density(const nuweak::QuantumState& psi_i,
                                         const nuweak::QuantumState& psi_f,
                                         const nuweak::Observable& obs,
                                         const nuweak::GaussianPointer& ptr,
                                         double p_D) {
  complexd omega;
  for (std::size_t k = 0; k < obs.dim(); ++k) {
    const complexd c = std::conj(obs.eigenvector_overlap(k, psi_f)) *
                       obs.eigenvector_overlap(k, psi_i);
    omega += c * ptr.amplitude(p_D - obs.eigenvalue(k));
  }
  return std::norm(omega);
}

// Mean of the exact post-selected pointer distribution via quadrature.
inline double exact_postselected_mean(const nuweak::QuantumState& psi_i,
                                      const nuweak::QuantumState& psi_f,
                                      const nuweak::Observable& obs,
                                      const nuweak::GaussianPointer& ptr,
                                      int nodes = 1 << 14) {
  double span = std::max(std::abs(obs.eigenvalue(0)),
                         std::abs(obs.eigenvalue(obs.dim() - 1)));
  const double reach = ptr.center + span + 15.0 * ptr.sigma_p;
  auto dens = [&](double p) {
    return exact_postselected_density(psi_i, psi_f, obs, ptr, p);
  };
  const double norm =
      nuweak::quadrature::integrate(dens, -reach, reach, nodes);
  const double first = nuweak::quadrature::integrate(
      [&](double p) { return p * dens(p); }, -reach, reach, nodes);
  return first / norm;
}

}  // namespace oracle
