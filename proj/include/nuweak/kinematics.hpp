#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

// Mixing-matrix construction and relativistic per-mass-eigenstate kinematics
// with the effective production/detection packet widths.
//
// Conventions:
//  - Natural units throughout (hbar = c = 1).
//  - MixingMatrix rows are flavor indices (e, mu, tau = 0, 1, 2), columns are
//    mass indices (nu_1, nu_2, nu_3 = 0, 1, 2).
//  - The 3-flavor matrix is the standard product R23 * diag-phase * R13 * R12,
//    i.e. U[0][2] = sin(theta13) * exp(-i * delta_cp).
//  - The expansion parameter xi splits the m^2 correction between mean energy
//    and mean momentum: xi = 0 is equal-energy, xi = 1 equal-momentum.

namespace nuweak {

using complexd = std::complex<double>;

class MixingMatrix {
 public:
  MixingMatrix(std::size_t n_flavors, std::vector<complexd> entries)
      : n_(n_flavors), u_(std::move(entries)) {
    if (n_ == 0 || u_.size() != n_ * n_)
      throw std::invalid_argument("MixingMatrix: entries must be n x n");
  }

  static MixingMatrix identity(std::size_t n) {
    std::vector<complexd> u(n * n, complexd(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) u[i * n + i] = 1.0;
    return MixingMatrix(n, std::move(u));
  }

  std::size_t n_flavors() const { return n_; }

  // Row = flavor alpha, column = mass a.
  complexd operator()(std::size_t alpha, std::size_t a) const {
    return u_[alpha * n_ + a];
  }

  // max_ij |(U U^dag)_ij - delta_ij|
  double unitarity_defect() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < n_; ++j) {
        complexd acc(0.0, 0.0);
        for (std::size_t a = 0; a < n_; ++a)
          acc += (*this)(i, a) * std::conj((*this)(j, a));
        if (i == j) acc -= 1.0;
        worst = std::max(worst, std::abs(acc));
      }
    }
    return worst;
  }

 private:
  std::size_t n_;
  std::vector<complexd> u_;  // row-major, flavor x mass
};

// 2-flavor: one angle, no phase, [[cos, sin], [-sin, cos]].
// 3-flavor: angles = (theta12, theta13, theta23) plus the CP phase.
inline MixingMatrix build_pmns(const std::vector<double>& angles_rad,
                               double cp_phase_rad, int n_flavors) {
  if (n_flavors == 2) {
    if (angles_rad.size() != 1)
      throw std::invalid_argument(
          "build_pmns: 2-flavor mixing takes exactly one angle");
    if (cp_phase_rad != 0.0)
      throw std::invalid_argument(
          "build_pmns: 2-flavor mixing has no CP phase");
    const double c = std::cos(angles_rad[0]);
    const double s = std::sin(angles_rad[0]);
    return MixingMatrix(2, {complexd(c), complexd(s), complexd(-s),
                            complexd(c)});
  }
  if (n_flavors == 3) {
    if (angles_rad.size() != 3)
      throw std::invalid_argument(
          "build_pmns: 3-flavor mixing takes (theta12, theta13, theta23)");
    const double c12 = std::cos(angles_rad[0]), s12 = std::sin(angles_rad[0]);
    const double c13 = std::cos(angles_rad[1]), s13 = std::sin(angles_rad[1]);
    const double c23 = std::cos(angles_rad[2]), s23 = std::sin(angles_rad[2]);
    const complexd eid = std::polar(1.0, cp_phase_rad);
    const complexd emid = std::polar(1.0, -cp_phase_rad);
    return MixingMatrix(
        3, {complexd(c12 * c13), complexd(s12 * c13), s13 * emid,
            -s12 * c23 - c12 * s23 * s13 * eid,
            c12 * c23 - s12 * s23 * s13 * eid, complexd(s23 * c13),
            s12 * s23 - c12 * c23 * s13 * eid,
            -c12 * s23 - s12 * c23 * s13 * eid, complexd(c23 * c13)});
  }
  throw std::invalid_argument("build_pmns: n_flavors must be 2 or 3");
}

// Per-eigenstate mean energies, momenta and group velocities to first order
// in m^2/E^2 around the massless-process energy E.
struct MassStateKinematics {
  double E = 0.0;
  double xi = 0.0;
  std::vector<double> masses;
  std::vector<double> epsilon;   // eps_a = E + xi m_a^2 / 2E
  std::vector<double> momentum;  // p_a = E - (1 - xi) m_a^2 / 2E
  std::vector<double> velocity;  // v_a = 1 - m_a^2 / 2E^2
  // False when some m_a/E exceeds 0.1; the formulas degrade smoothly there,
  // so this is a warning flag, not an error.
  bool relativistic = true;

  std::size_t n_states() const { return masses.size(); }

  // eps_a - p_a collapses to m_a^2/2E identically in this model; computing it
  // directly keeps large phases well conditioned.
  double energy_momentum_split(std::size_t a) const {
    return masses[a] * masses[a] / (2.0 * E);
  }

  double dm2(std::size_t a, std::size_t b) const {
    return masses[a] * masses[a] - masses[b] * masses[b];
  }
};

inline MassStateKinematics mass_kinematics(double E,
                                           const std::vector<double>& masses,
                                           double xi) {
  if (!(E > 0.0)) throw std::invalid_argument("mass_kinematics: E must be > 0");
  if (masses.empty())
    throw std::invalid_argument("mass_kinematics: empty mass list");
  MassStateKinematics kin;
  kin.E = E;
  kin.xi = xi;
  kin.masses = masses;
  for (const double m : masses) {
    if (m < 0.0)
      throw std::invalid_argument("mass_kinematics: negative mass");
    if (m >= E)
      throw std::domain_error(
          "mass_kinematics: non-relativistic input (m >= E)");
    if (m / E > 0.1) kin.relativistic = false;
    const double r = m * m / (2.0 * E);
    kin.epsilon.push_back(E + xi * r);
    kin.momentum.push_back(E - (1.0 - xi) * r);
    kin.velocity.push_back(1.0 - r / E);
  }
  return kin;
}

// Production/detection widths and the combined effective resolutions.
// sigma_x * sigma_p = 1/2 holds exactly by construction.
struct PacketWidths {
  double sigma_xP = 0.0;
  double sigma_xD = 0.0;
  double sigma_pP = 0.0;
  double sigma_pD = 0.0;
  double sigma_x = 0.0;  // sqrt(sigma_xP^2 + sigma_xD^2)
  double sigma_p = 0.0;  // 1 / (2 sigma_x)
};

inline PacketWidths packet_widths(double sigma_xP, double sigma_xD) {
  if (!(sigma_xP > 0.0) || !(sigma_xD > 0.0))
    throw std::invalid_argument("packet_widths: widths must be > 0");
  PacketWidths w;
  w.sigma_xP = sigma_xP;
  w.sigma_xD = sigma_xD;
  w.sigma_pP = 0.5 / sigma_xP;
  w.sigma_pD = 0.5 / sigma_xD;
  w.sigma_x = std::hypot(sigma_xP, sigma_xD);
  w.sigma_p = 0.5 / w.sigma_x;
  return w;
}

// Effective energy resolution for the pair (a, b):
// sigma_e^2 = (v_a^2 + v_b^2)/2 * sigma_p^2.
inline double sigma_e(const PacketWidths& widths, double v_a, double v_b) {
  return widths.sigma_p * std::sqrt(0.5 * (v_a * v_a + v_b * v_b));
}

// L_coh = 4 sqrt(2) E^2 sigma_x / |dm2|; degenerate masses never decohere.
inline double coherence_length(double E, double dm2, double sigma_x) {
  if (dm2 == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * std::sqrt(2.0) * E * E * sigma_x / std::abs(dm2);
}

}  // namespace nuweak
