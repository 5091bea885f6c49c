#pragma once

// Physical constants and unit conversions (natural units, hbar = c = 1).
// All library math is carried out in powers of GeV; conversions to and from
// laboratory units live here and are used only by the scan/CLI layer.

namespace nuweak::constants {

// CODATA. Single source of truth for every unit conversion below.
inline constexpr double hbar_c_mev_fm = 197.3269804;

inline constexpr double fm_per_km = 1e18;
inline constexpr double fm_per_m = 1e15;
inline constexpr double mev_per_gev = 1e3;

// 1 fm expressed in GeV^-1.
inline constexpr double fm_to_per_gev = mev_per_gev / hbar_c_mev_fm;

inline constexpr double km_to_per_gev = fm_per_km * fm_to_per_gev;  // ~5.0677e18
inline constexpr double m_to_per_gev = fm_per_m * fm_to_per_gev;    // ~5.0677e15

inline constexpr double ev_to_gev = 1e-9;
inline constexpr double ev2_to_gev2 = 1e-18;

inline constexpr double per_gev_to_km = 1.0 / km_to_per_gev;
inline constexpr double per_gev_to_m = 1.0 / m_to_per_gev;
inline constexpr double gev2_to_ev2 = 1.0 / ev2_to_gev2;

}  // namespace nuweak::constants
