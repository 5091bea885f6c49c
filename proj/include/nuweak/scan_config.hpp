#pragma once

#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <istream>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nuweak/constants.hpp"
#include "nuweak/errors.hpp"
#include "nuweak/kinematics.hpp"
#include "nuweak/probability.hpp"

// Scan configuration: one canonical JSON document, validated with key-path
// diagnostics, plus the conversion of laboratory units (km, m, GeV, eV^2)
// into the natural units the library works in.

namespace nuweak {

enum class ScanMode {
  standard,
  weak_closed,
  weak_quadrature,
  current_profile,
  pointer_demo
};

inline const char* to_string(ScanMode m) {
  switch (m) {
    case ScanMode::standard: return "standard";
    case ScanMode::weak_closed: return "weak_closed";
    case ScanMode::weak_quadrature: return "weak_quadrature";
    case ScanMode::current_profile: return "current_profile";
    case ScanMode::pointer_demo: return "pointer_demo";
  }
  return "?";
}

struct PointerDemoConfig {
  double sigma_p = 1.0;
  double center = 0.0;
  // Exactly one of: a plain eigenvalue list (diagonal observable) or a full
  // Hermitian matrix with entries given as [re, im].
  std::optional<std::vector<double>> eigenvalues;
  std::optional<std::vector<std::vector<complexd>>> matrix;
  std::vector<complexd> psi_i;
  std::optional<std::vector<complexd>> psi_f;
  double p_min = -5.0;
  double p_max = 5.0;
  int p_points = 101;
};

struct ScanConfig {
  int n_flavors = 2;
  std::vector<double> angles_rad;
  double delta_cp_rad = 0.0;
  std::optional<std::vector<double>> masses_eV;
  std::optional<std::vector<double>> dm2_eV2;
  std::vector<double> E_GeV;  // grid; a single number is a 1-point grid
  double xi = 0.5;
  double sigma_xP_m = 0.0;
  double sigma_xD_m = 0.0;
  std::vector<double> L_km;
  std::vector<std::pair<int, int>> flavor_pairs;  // empty = all pairs
  ScanMode mode = ScanMode::weak_closed;

  // conventions
  DeltaEpsConvention delta_eps = DeltaEpsConvention::standard;
  bool simplify = true;
  bool symmetrize = false;

  // quadrature tuning (weak_quadrature mode)
  TimeWindowSpec window;

  // current_profile mode: detection times T = L/v_mean + offset
  std::vector<double> T_offset_m;

  // pointer_demo mode
  std::optional<PointerDemoConfig> pointer;
};

namespace cfg_detail {

using json = nlohmann::json;

[[noreturn]] inline void fail(const std::string& path,
                              const std::string& what) {
  throw config_error(path + ": " + what);
}

inline void require_keys(const json& j, const std::string& path,
                         const std::vector<std::string>& known) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const auto& k : known)
      if (it.key() == k) ok = true;
    if (!ok) fail(path.empty() ? it.key() : path + "." + it.key(),
                  "unknown key");
  }
}

inline double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline std::vector<double> get_grid(const json& j, const std::string& path,
                                    bool strictly_increasing) {
  std::vector<double> g;
  if (j.is_number()) {
    g.push_back(j.get<double>());
    return g;
  }
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
  for (const auto& v : j) {
    if (!v.is_number()) fail(path, "expected numbers");
    g.push_back(v.get<double>());
  }
  if (strictly_increasing) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > g[i - 1]))
        fail(path, "grid must be strictly increasing (at index " +
                       std::to_string(i) + ")");
  }
  return g;
}

inline complexd get_complex(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() ||
      !j[1].is_number())
    fail(path, "expected [re, im]");
  return complexd(j[0].get<double>(), j[1].get<double>());
}

inline std::vector<complexd> get_complex_vector(const json& j,
                                                const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a nonempty array");
  std::vector<complexd> out;
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(get_complex(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

inline json complex_to_json(const complexd& c) {
  return json::array({c.real(), c.imag()});
}

}  // namespace cfg_detail

inline ScanConfig load_config(const nlohmann::json& j) {
  using cfg_detail::fail;
  using cfg_detail::get_grid;
  using cfg_detail::get_number;
  if (!j.is_object()) throw config_error("config root must be an object");
  cfg_detail::require_keys(
      j, "",
      {"n_flavors", "angles_rad", "delta_cp_rad", "masses_eV", "dm2_eV2",
       "E_GeV", "xi", "sigma_xP_m", "sigma_xD_m", "L_km", "flavor_pairs",
       "mode", "conventions", "quadrature", "current", "pointer"});

  ScanConfig c;
  for (const char* k : {"n_flavors", "angles_rad", "E_GeV", "sigma_xP_m",
                        "sigma_xD_m", "L_km"})
    if (!j.contains(k)) fail(k, "missing required key");

  if (!j["n_flavors"].is_number_integer())
    fail("n_flavors", "expected an integer");
  c.n_flavors = j["n_flavors"].get<int>();
  if (c.n_flavors != 2 && c.n_flavors != 3)
    fail("n_flavors", "must be 2 or 3");

  c.angles_rad = get_grid(j["angles_rad"], "angles_rad", false);
  const std::size_t want_angles = (c.n_flavors == 2) ? 1 : 3;
  if (c.angles_rad.size() != want_angles)
    fail("angles_rad", "expected " + std::to_string(want_angles) +
                           " angle(s) for n_flavors = " +
                           std::to_string(c.n_flavors));

  if (j.contains("delta_cp_rad"))
    c.delta_cp_rad = get_number(j["delta_cp_rad"], "delta_cp_rad");
  if (c.n_flavors == 2 && c.delta_cp_rad != 0.0)
    fail("delta_cp_rad", "2-flavor mixing has no CP phase");

  const bool has_masses = j.contains("masses_eV");
  const bool has_dm2 = j.contains("dm2_eV2");
  if (has_masses && has_dm2)
    fail("masses_eV", "exactly one of masses_eV and dm2_eV2 must be given "
                      "(both present)");
  if (!has_masses && !has_dm2)
    fail("masses_eV", "exactly one of masses_eV and dm2_eV2 must be given "
                      "(none present)");
  if (has_masses) {
    auto m = get_grid(j["masses_eV"], "masses_eV", false);
    if (m.size() != static_cast<std::size_t>(c.n_flavors))
      fail("masses_eV", "expected one mass per flavor");
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i] < 0.0)
        fail("masses_eV[" + std::to_string(i) + "]", "must be >= 0");
    c.masses_eV = std::move(m);
  } else {
    auto d = get_grid(j["dm2_eV2"], "dm2_eV2", false);
    if (d.size() != static_cast<std::size_t>(c.n_flavors) - 1)
      fail("dm2_eV2", "expected n_flavors - 1 squared-mass differences");
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i] < 0.0)
        fail("dm2_eV2[" + std::to_string(i) + "]",
             "must be >= 0 under the m_lightest = 0 convention");
    c.dm2_eV2 = std::move(d);
  }

  c.E_GeV = get_grid(j["E_GeV"], "E_GeV", true);
  for (std::size_t i = 0; i < c.E_GeV.size(); ++i)
    if (!(c.E_GeV[i] > 0.0))
      fail("E_GeV[" + std::to_string(i) + "]", "must be > 0");

  if (j.contains("xi")) c.xi = get_number(j["xi"], "xi");

  c.sigma_xP_m = get_number(j["sigma_xP_m"], "sigma_xP_m");
  c.sigma_xD_m = get_number(j["sigma_xD_m"], "sigma_xD_m");
  if (!(c.sigma_xP_m > 0.0)) fail("sigma_xP_m", "must be > 0");
  if (!(c.sigma_xD_m > 0.0)) fail("sigma_xD_m", "must be > 0");

  c.L_km = get_grid(j["L_km"], "L_km", true);
  if (c.L_km.front() < 0.0) fail("L_km[0]", "must be >= 0");

  if (j.contains("flavor_pairs")) {
    const auto& fp = j["flavor_pairs"];
    if (!fp.is_array()) fail("flavor_pairs", "expected an array of [a, b]");
    for (std::size_t i = 0; i < fp.size(); ++i) {
      const std::string path = "flavor_pairs[" + std::to_string(i) + "]";
      if (!fp[i].is_array() || fp[i].size() != 2 ||
          !fp[i][0].is_number_integer() || !fp[i][1].is_number_integer())
        fail(path, "expected [alpha, beta] integer indices");
      const int a = fp[i][0].get<int>(), b = fp[i][1].get<int>();
      if (a < 0 || a >= c.n_flavors || b < 0 || b >= c.n_flavors)
        fail(path, "flavor index out of range");
      c.flavor_pairs.emplace_back(a, b);
    }
  }

  if (j.contains("mode")) {
    const std::string m = j["mode"].is_string() ? j["mode"].get<std::string>()
                                                : std::string();
    if (m == "standard") c.mode = ScanMode::standard;
    else if (m == "weak_closed") c.mode = ScanMode::weak_closed;
    else if (m == "weak_quadrature") c.mode = ScanMode::weak_quadrature;
    else if (m == "current_profile") c.mode = ScanMode::current_profile;
    else if (m == "pointer_demo") c.mode = ScanMode::pointer_demo;
    else
      fail("mode", "expected one of standard, weak_closed, weak_quadrature, "
                   "current_profile, pointer_demo");
  }

  if (j.contains("conventions")) {
    const auto& cv = j["conventions"];
    if (!cv.is_object()) fail("conventions", "expected an object");
    cfg_detail::require_keys(cv, "conventions",
                             {"delta_eps", "simplify", "symmetrize"});
    if (cv.contains("delta_eps")) {
      const std::string d = cv["delta_eps"].is_string()
                                ? cv["delta_eps"].get<std::string>()
                                : std::string();
      if (d == "standard") c.delta_eps = DeltaEpsConvention::standard;
      else if (d == "as_written") c.delta_eps = DeltaEpsConvention::as_written;
      else fail("conventions.delta_eps", "expected standard or as_written");
    }
    if (cv.contains("simplify")) {
      if (!cv["simplify"].is_boolean())
        fail("conventions.simplify", "expected a boolean");
      c.simplify = cv["simplify"].get<bool>();
    }
    if (cv.contains("symmetrize")) {
      if (!cv["symmetrize"].is_boolean())
        fail("conventions.symmetrize", "expected a boolean");
      c.symmetrize = cv["symmetrize"].get<bool>();
    }
  }

  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    if (!q.is_object()) fail("quadrature", "expected an object");
    cfg_detail::require_keys(
        q, "quadrature",
        {"half_width_sigmas", "initial_nodes", "max_nodes", "self_tol"});
    if (q.contains("half_width_sigmas"))
      c.window.half_width_sigmas =
          get_number(q["half_width_sigmas"], "quadrature.half_width_sigmas");
    if (q.contains("initial_nodes"))
      c.window.initial_nodes = static_cast<int>(
          get_number(q["initial_nodes"], "quadrature.initial_nodes"));
    if (q.contains("max_nodes"))
      c.window.max_nodes = static_cast<int>(
          get_number(q["max_nodes"], "quadrature.max_nodes"));
    if (q.contains("self_tol"))
      c.window.self_tol = get_number(q["self_tol"], "quadrature.self_tol");
    if (c.window.half_width_sigmas < 8.0)
      fail("quadrature.half_width_sigmas", "must be >= 8");
  }

  if (c.mode == ScanMode::current_profile) {
    if (!j.contains("current") || !j["current"].is_object() ||
        !j["current"].contains("T_offset_m"))
      fail("current.T_offset_m", "missing required key for mode "
                                 "current_profile");
    cfg_detail::require_keys(j["current"], "current", {"T_offset_m"});
    c.T_offset_m =
        get_grid(j["current"]["T_offset_m"], "current.T_offset_m", true);
  } else if (j.contains("current")) {
    fail("current", "only valid with mode current_profile");
  }

  if (c.mode == ScanMode::pointer_demo) {
    if (!j.contains("pointer") || !j["pointer"].is_object())
      fail("pointer", "missing required section for mode pointer_demo");
    const auto& p = j["pointer"];
    cfg_detail::require_keys(p, "pointer",
                             {"sigma_p", "center", "eigenvalues", "matrix",
                              "psi_i", "psi_f", "p_min", "p_max", "p_points"});
    PointerDemoConfig pc;
    if (!p.contains("sigma_p")) fail("pointer.sigma_p", "missing required key");
    pc.sigma_p = get_number(p["sigma_p"], "pointer.sigma_p");
    if (!(pc.sigma_p > 0.0)) fail("pointer.sigma_p", "must be > 0");
    if (p.contains("center"))
      pc.center = get_number(p["center"], "pointer.center");
    const bool has_ev = p.contains("eigenvalues");
    const bool has_mat = p.contains("matrix");
    if (has_ev == has_mat)
      fail("pointer.eigenvalues",
           "exactly one of eigenvalues and matrix must be given");
    if (has_ev)
      pc.eigenvalues = get_grid(p["eigenvalues"], "pointer.eigenvalues",
                                false);
    if (has_mat) {
      const auto& m = p["matrix"];
      if (!m.is_array() || m.empty()) fail("pointer.matrix", "expected rows");
      std::vector<std::vector<complexd>> rows;
      for (std::size_t i = 0; i < m.size(); ++i) {
        rows.push_back(cfg_detail::get_complex_vector(
            m[i], "pointer.matrix[" + std::to_string(i) + "]"));
        if (rows.back().size() != m.size())
          fail("pointer.matrix", "must be square");
      }
      pc.matrix = std::move(rows);
    }
    if (!p.contains("psi_i")) fail("pointer.psi_i", "missing required key");
    pc.psi_i = cfg_detail::get_complex_vector(p["psi_i"], "pointer.psi_i");
    if (p.contains("psi_f"))
      pc.psi_f = cfg_detail::get_complex_vector(p["psi_f"], "pointer.psi_f");
    if (p.contains("p_min")) pc.p_min = get_number(p["p_min"], "pointer.p_min");
    if (p.contains("p_max")) pc.p_max = get_number(p["p_max"], "pointer.p_max");
    if (!(pc.p_max > pc.p_min)) fail("pointer.p_max", "must exceed p_min");
    if (p.contains("p_points")) {
      if (!p["p_points"].is_number_integer())
        fail("pointer.p_points", "expected an integer");
      pc.p_points = p["p_points"].get<int>();
    }
    if (pc.p_points < 2) fail("pointer.p_points", "must be >= 2");
    const std::size_t dim =
        has_ev ? pc.eigenvalues->size() : pc.matrix->size();
    if (pc.psi_i.size() != dim)
      fail("pointer.psi_i", "dimension mismatch with the observable");
    if (pc.psi_f && pc.psi_f->size() != dim)
      fail("pointer.psi_f", "dimension mismatch with the observable");
    c.pointer = std::move(pc);
  } else if (j.contains("pointer")) {
    fail("pointer", "only valid with mode pointer_demo");
  }

  return c;
}

inline ScanConfig load_config(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return load_config(j);
}

inline ScanConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  return load_config(in);
}

// Canonical serialized form; load(save(c)) == c.
inline nlohmann::json save_config(const ScanConfig& c) {
  nlohmann::json j;
  j["n_flavors"] = c.n_flavors;
  j["angles_rad"] = c.angles_rad;
  j["delta_cp_rad"] = c.delta_cp_rad;
  if (c.masses_eV) j["masses_eV"] = *c.masses_eV;
  if (c.dm2_eV2) j["dm2_eV2"] = *c.dm2_eV2;
  j["E_GeV"] = c.E_GeV;
  j["xi"] = c.xi;
  j["sigma_xP_m"] = c.sigma_xP_m;
  j["sigma_xD_m"] = c.sigma_xD_m;
  j["L_km"] = c.L_km;
  if (!c.flavor_pairs.empty()) {
    nlohmann::json fp = nlohmann::json::array();
    for (const auto& [a, b] : c.flavor_pairs)
      fp.push_back(nlohmann::json::array({a, b}));
    j["flavor_pairs"] = fp;
  }
  j["mode"] = to_string(c.mode);
  j["conventions"] = {
      {"delta_eps",
       c.delta_eps == DeltaEpsConvention::standard ? "standard"
                                                   : "as_written"},
      {"simplify", c.simplify},
      {"symmetrize", c.symmetrize}};
  j["quadrature"] = {{"half_width_sigmas", c.window.half_width_sigmas},
                     {"initial_nodes", c.window.initial_nodes},
                     {"max_nodes", c.window.max_nodes},
                     {"self_tol", c.window.self_tol}};
  if (c.mode == ScanMode::current_profile)
    j["current"] = {{"T_offset_m", c.T_offset_m}};
  if (c.mode == ScanMode::pointer_demo && c.pointer) {
    nlohmann::json p;
    p["sigma_p"] = c.pointer->sigma_p;
    p["center"] = c.pointer->center;
    if (c.pointer->eigenvalues) p["eigenvalues"] = *c.pointer->eigenvalues;
    if (c.pointer->matrix) {
      nlohmann::json m = nlohmann::json::array();
      for (const auto& row : *c.pointer->matrix) {
        nlohmann::json r = nlohmann::json::array();
        for (const auto& e : row) r.push_back(cfg_detail::complex_to_json(e));
        m.push_back(r);
      }
      p["matrix"] = m;
    }
    nlohmann::json psi = nlohmann::json::array();
    for (const auto& e : c.pointer->psi_i)
      psi.push_back(cfg_detail::complex_to_json(e));
    p["psi_i"] = psi;
    if (c.pointer->psi_f) {
      nlohmann::json psf = nlohmann::json::array();
      for (const auto& e : *c.pointer->psi_f)
        psf.push_back(cfg_detail::complex_to_json(e));
      p["psi_f"] = psf;
    }
    p["p_min"] = c.pointer->p_min;
    p["p_max"] = c.pointer->p_max;
    p["p_points"] = c.pointer->p_points;
    j["pointer"] = p;
  }
  return j;
}

// Everything the scan kernels need, in natural units (GeV powers).
struct NaturalParams {
  MixingMatrix U = MixingMatrix::identity(2);
  std::vector<double> masses_GeV;
  std::vector<double> E_GeV;
  double xi = 0.5;
  PacketWidths widths;           // GeV^-1 lengths
  std::vector<double> L_nat;     // GeV^-1
  std::vector<double> T_offset_nat;
  std::vector<std::pair<int, int>> pairs;  // resolved (all pairs if empty)
};

inline NaturalParams to_natural_units(const ScanConfig& c) {
  using namespace constants;
  NaturalParams p;
  p.U = build_pmns(c.angles_rad, c.delta_cp_rad, c.n_flavors);
  if (c.masses_eV) {
    for (const double m : *c.masses_eV) p.masses_GeV.push_back(m * ev_to_gev);
  } else {
    // m_lightest = 0 convention: masses^2 = (0, dm2...)
    p.masses_GeV.push_back(0.0);
    for (const double d : *c.dm2_eV2)
      p.masses_GeV.push_back(std::sqrt(d * ev2_to_gev2));
  }
  p.E_GeV = c.E_GeV;
  p.xi = c.xi;
  p.widths = packet_widths(c.sigma_xP_m * m_to_per_gev,
                           c.sigma_xD_m * m_to_per_gev);
  for (const double l : c.L_km) p.L_nat.push_back(l * km_to_per_gev);
  for (const double t : c.T_offset_m)
    p.T_offset_nat.push_back(t * m_to_per_gev);
  p.pairs = c.flavor_pairs;
  if (p.pairs.empty())
    for (int a = 0; a < c.n_flavors; ++a)
      for (int b = 0; b < c.n_flavors; ++b) p.pairs.emplace_back(a, b);
  return p;
}

}  // namespace nuweak
