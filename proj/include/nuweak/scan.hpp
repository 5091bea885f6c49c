#pragma once

#include <atomic>
#include <cstdio>
#include <functional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "nuweak/pointer.hpp"
#include "nuweak/scan_config.hpp"

// Deterministic scan execution and CSV/JSON emission. Rows are computed
// independently (optionally by a thread pool) into index order, so the
// emitted bytes do not depend on the thread count.
//
// CSV dialect: comma separator, '.' decimal point, %.16e scientific floats
// (17 significant digits), one header row, LF line endings.

namespace nuweak {

struct ScanRow {
  double L_km = 0.0;
  double E_GeV = 0.0;
  int alpha = 0;
  int beta = 0;
  ScanMode mode = ScanMode::weak_closed;
  double value = 0.0;
  std::vector<PairDecoherence> pair_factors;  // fixed pair order (2,1),(3,1),(3,2)
};

struct CurrentRow {
  double L_km = 0.0;
  double T_offset_m = 0.0;
  double E_GeV = 0.0;
  int alpha = 0;
  int beta = 0;
  double rho = 0.0;  // natural units (GeV)
  double J = 0.0;    // natural units (GeV)
};

struct PointerRow {
  double p_D = 0.0;
  double density_strong = 0.0;
  double density_weak = 0.0;
  bool has_weak = false;
};

struct ScanResult {
  ScanMode mode = ScanMode::weak_closed;
  int n_flavors = 2;
  std::vector<ScanRow> rows;
  std::vector<CurrentRow> current_rows;
  std::vector<PointerRow> pointer_rows;
  std::vector<std::string> warnings;
};

namespace scan_detail {

// Runs jobs 0..count-1 on `threads` workers; each job writes only its own
// slot, so scheduling cannot affect the output. The first failing index (by
// index order, not completion order) is reported.
inline void run_indexed(std::size_t count, int threads,
                        const std::function<void(std::size_t)>& job) {
  if (threads < 1) threads = 1;
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(count);
  std::vector<std::thread> pool;
  auto worker = [&]() {
    for (std::size_t i = next.fetch_add(1); i < count;
         i = next.fetch_add(1)) {
      try {
        job(i);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      } catch (...) {
        errors[i] = "unknown error";
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < count; ++i)
    if (!errors[i].empty()) throw scan_numeric_error(errors[i]);
}

inline std::string coord_tag(double L_km, double E_GeV) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "at L_km=%.6g, E_GeV=%.6g: ", L_km, E_GeV);
  return buf;
}

}  // namespace scan_detail

inline ScanResult run_scan(const ScanConfig& cfg, int threads = 1) {
  const NaturalParams par = to_natural_units(cfg);
  ScanResult result;
  result.mode = cfg.mode;
  result.n_flavors = cfg.n_flavors;

  // Relativistic-validity guard: warn, never fail.
  {
    double mmax = 0.0;
    for (const double m : par.masses_GeV) mmax = std::max(mmax, m);
    const double E_min = par.E_GeV.front();
    if (mmax / E_min > 0.1)
      result.warnings.push_back(
          "m/E exceeds 0.1 at the smallest grid energy; first-order "
          "kinematics degrade");
  }

  if (cfg.mode == ScanMode::pointer_demo) {
    const PointerDemoConfig& pc = *cfg.pointer;
    const Observable obs =
        pc.eigenvalues ? Observable::diagonal(*pc.eigenvalues)
                       : [&] {
                           const std::size_t d = pc.matrix->size();
                           std::vector<complexd> flat;
                           for (const auto& row : *pc.matrix)
                             flat.insert(flat.end(), row.begin(), row.end());
                           return Observable(d, flat);
                         }();
    const QuantumState psi_i(pc.psi_i);
    const std::optional<QuantumState> psi_f =
        pc.psi_f ? std::optional<QuantumState>(QuantumState(*pc.psi_f))
                 : std::nullopt;
    const GaussianPointer pointer{pc.sigma_p, pc.center};
    result.pointer_rows.resize(pc.p_points);
    scan_detail::run_indexed(
        pc.p_points, threads, [&](std::size_t i) {
          PointerRow row;
          row.p_D = pc.p_min +
                    (pc.p_max - pc.p_min) * static_cast<double>(i) /
                        (pc.p_points - 1);
          row.density_strong =
              pointer_distribution_strong(psi_i, obs, pointer, row.p_D);
          if (psi_f) {
            row.density_weak = pointer_distribution_weak_postselected(
                                   psi_i, *psi_f, obs, pointer, row.p_D)
                                   .density;
            row.has_weak = true;
          }
          result.pointer_rows[i] = row;
        });
    return result;
  }

  if (cfg.mode == ScanMode::current_profile) {
    const std::size_t nL = par.L_nat.size();
    const std::size_t nT = par.T_offset_nat.size();
    const std::size_t nE = par.E_GeV.size();
    const std::size_t nP = par.pairs.size();
    result.current_rows.resize(nL * nE * nT * nP);
    scan_detail::run_indexed(
        result.current_rows.size(), threads, [&](std::size_t idx) {
          const std::size_t ip = idx % nP;
          const std::size_t it = (idx / nP) % nT;
          const std::size_t ie = (idx / (nP * nT)) % nE;
          const std::size_t il = idx / (nP * nT * nE);
          const double E = par.E_GeV[ie];
          const double L = par.L_nat[il];
          try {
            const auto kin = mass_kinematics(E, par.masses_GeV, par.xi);
            double v_mean = 0.0;
            for (const double v : kin.velocity) v_mean += v;
            v_mean /= kin.n_states();
            const double T = L / v_mean + par.T_offset_nat[it];
            const auto [alpha, beta] = par.pairs[ip];
            const auto sample = flavor_current(par.U, kin, par.widths, alpha,
                                               beta, L, T);
            CurrentRow row;
            row.L_km = cfg.L_km[il];
            row.T_offset_m = cfg.T_offset_m[it];
            row.E_GeV = E;
            row.alpha = alpha;
            row.beta = beta;
            row.rho = sample.rho;
            row.J = sample.J;
            result.current_rows[idx] = row;
          } catch (const std::exception& e) {
            throw scan_numeric_error(
                scan_detail::coord_tag(cfg.L_km[il], E) + e.what());
          }
        });
    return result;
  }

  // Probability scan: L outer, E inner, flavor pairs innermost.
  const std::size_t nL = par.L_nat.size();
  const std::size_t nE = par.E_GeV.size();
  const std::size_t nP = par.pairs.size();
  result.rows.resize(nL * nE * nP);
  const ProbabilityOptions options{cfg.simplify, cfg.delta_eps,
                                   cfg.symmetrize};
  scan_detail::run_indexed(
      result.rows.size(), threads, [&](std::size_t idx) {
        const std::size_t ip = idx % nP;
        const std::size_t ie = (idx / nP) % nE;
        const std::size_t il = idx / (nP * nE);
        const double E = par.E_GeV[ie];
        const double L = par.L_nat[il];
        const auto [alpha, beta] = par.pairs[ip];
        try {
          const auto kin = mass_kinematics(E, par.masses_GeV, par.xi);
          ScanRow row;
          row.L_km = cfg.L_km[il];
          row.E_GeV = E;
          row.alpha = alpha;
          row.beta = beta;
          row.mode = cfg.mode;
          switch (cfg.mode) {
            case ScanMode::standard:
              row.value = probability_standard(par.U, kin, par.widths, alpha,
                                               beta, L, cfg.delta_eps)
                              .value;
              break;
            case ScanMode::weak_closed:
              row.value = probability_weak_closed(par.U, kin, par.widths,
                                                  alpha, beta, L, options)
                              .value;
              break;
            case ScanMode::weak_quadrature:
              row.value = probability_weak_quadrature(par.U, kin, par.widths,
                                                      alpha, beta, L,
                                                      cfg.window)
                              .value;
              break;
            default:
              break;
          }
          row.pair_factors =
              decoherence_factors(kin, par.widths, L, cfg.delta_eps).pairs;
          result.rows[idx] = std::move(row);
        } catch (const std::exception& e) {
          throw scan_numeric_error(scan_detail::coord_tag(cfg.L_km[il], E) +
                                   e.what());
        }
      });
  return result;
}

namespace scan_detail {

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

inline std::string pair_suffix(const PairDecoherence& p) {
  return std::to_string(p.a + 1) + std::to_string(p.b + 1);
}

}  // namespace scan_detail

inline void write_csv(std::ostream& out, const ScanResult& r) {
  using scan_detail::sci;
  if (r.mode == ScanMode::pointer_demo) {
    const bool weak = !r.pointer_rows.empty() && r.pointer_rows[0].has_weak;
    out << "p_D,density_strong";
    if (weak) out << ",density_weak";
    out << "\n";
    for (const auto& row : r.pointer_rows) {
      out << sci(row.p_D) << ',' << sci(row.density_strong);
      if (weak) out << ',' << sci(row.density_weak);
      out << "\n";
    }
    return;
  }
  if (r.mode == ScanMode::current_profile) {
    out << "L_km,T_offset_m,E_GeV,alpha,beta,rho,J\n";
    for (const auto& row : r.current_rows) {
      out << sci(row.L_km) << ',' << sci(row.T_offset_m) << ','
          << sci(row.E_GeV) << ',' << row.alpha << ',' << row.beta << ','
          << sci(row.rho) << ',' << sci(row.J) << "\n";
    }
    return;
  }
  out << "L_km,E_GeV,alpha,beta,mode,value";
  if (!r.rows.empty()) {
    for (const auto& p : r.rows[0].pair_factors) {
      const std::string s = scan_detail::pair_suffix(p);
      out << ",phase_" << s << ",damp_sep_" << s << ",damp_coh_" << s;
    }
  }
  out << "\n";
  for (const auto& row : r.rows) {
    out << sci(row.L_km) << ',' << sci(row.E_GeV) << ',' << row.alpha << ','
        << row.beta << ',' << to_string(row.mode) << ',' << sci(row.value);
    for (const auto& p : row.pair_factors)
      out << ',' << sci(p.osc_phase) << ',' << sci(p.wp_separation) << ','
          << sci(p.prod_det_coherence);
    out << "\n";
  }
}

inline void write_json(std::ostream& out, const ScanResult& r) {
  nlohmann::json j;
  j["mode"] = to_string(r.mode);
  nlohmann::json rows = nlohmann::json::array();
  if (r.mode == ScanMode::pointer_demo) {
    for (const auto& row : r.pointer_rows) {
      nlohmann::json o;
      o["p_D"] = row.p_D;
      o["density_strong"] = row.density_strong;
      if (row.has_weak) o["density_weak"] = row.density_weak;
      rows.push_back(o);
    }
  } else if (r.mode == ScanMode::current_profile) {
    for (const auto& row : r.current_rows) {
      rows.push_back({{"L_km", row.L_km},
                      {"T_offset_m", row.T_offset_m},
                      {"E_GeV", row.E_GeV},
                      {"alpha", row.alpha},
                      {"beta", row.beta},
                      {"rho", row.rho},
                      {"J", row.J}});
    }
  } else {
    for (const auto& row : r.rows) {
      nlohmann::json pairs = nlohmann::json::array();
      for (const auto& p : row.pair_factors)
        pairs.push_back({{"a", p.a + 1},
                         {"b", p.b + 1},
                         {"phase", p.osc_phase},
                         {"damp_sep", p.wp_separation},
                         {"damp_coh", p.prod_det_coherence}});
      rows.push_back({{"L_km", row.L_km},
                      {"E_GeV", row.E_GeV},
                      {"alpha", row.alpha},
                      {"beta", row.beta},
                      {"mode", to_string(row.mode)},
                      {"value", row.value},
                      {"pairs", pairs}});
    }
  }
  j["rows"] = rows;
  out << j.dump(2) << "\n";
}

}  // namespace nuweak
