// Command-line driver: loads a JSON scan configuration, runs the requested
// scan deterministically and writes CSV or JSON rows to a file or stdout.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "nuweak/scan.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitNumericError = 3;

struct CommonOpts {
  std::string config_path;
  std::string output = "-";
  std::string format = "csv";
  int threads = 1;
  int seed = 0;  // reserved; no stochastic paths yet
  std::string mode_override;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_mode) {
  cmd->add_option("--config", o.config_path, "JSON configuration file")
      ->required();
  cmd->add_option("--output", o.output, "output path, or - for stdout");
  cmd->add_option("--format", o.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--threads", o.threads, "worker threads (output is "
                                          "byte-identical for any count)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "reserved for future stochastic modes");
  if (with_mode)
    cmd->add_option("--mode", o.mode_override,
                    "override the config mode (standard, weak_closed, "
                    "weak_quadrature)")
        ->check(CLI::IsMember({"standard", "weak_closed", "weak_quadrature"}));
}

nuweak::ScanMode parse_mode(const std::string& s) {
  if (s == "standard") return nuweak::ScanMode::standard;
  if (s == "weak_closed") return nuweak::ScanMode::weak_closed;
  return nuweak::ScanMode::weak_quadrature;
}

int emit(const nuweak::ScanResult& result, const CommonOpts& o) {
  std::ostringstream body;
  if (o.format == "csv")
    nuweak::write_csv(body, result);
  else
    nuweak::write_json(body, result);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (o.output == "-") {
    std::cout << body.str();
    return 0;
  }
  std::ofstream out(o.output, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file: " << o.output << "\n";
    return kExitConfigError;
  }
  out << body.str();
  return 0;
}

int run(const CommonOpts& o, std::optional<nuweak::ScanMode> forced_mode) {
  nuweak::ScanConfig cfg;
  try {
    cfg = nuweak::load_config_file(o.config_path);
    if (!o.mode_override.empty()) cfg.mode = parse_mode(o.mode_override);
    if (forced_mode) {
      if (cfg.mode != *forced_mode && o.mode_override.empty())
        throw nuweak::config_error(
            std::string("mode: config requests ") +
            nuweak::to_string(cfg.mode) + " but this subcommand runs " +
            nuweak::to_string(*forced_mode));
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }
  try {
    const nuweak::ScanResult result = nuweak::run_scan(cfg, o.threads);
    return emit(result, o);
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumericError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wave-packet neutrino oscillation scans with weak-measurement "
               "detection"};
  app.require_subcommand(1);

  CommonOpts scan_opts, current_opts, pointer_opts;
  std::string validate_path;

  CLI::App* scan = app.add_subcommand(
      "scan", "probability vs baseline/energy grid");
  add_common(scan, scan_opts, true);

  CLI::App* current = app.add_subcommand(
      "current", "flavor density and current profiles (L, T grids)");
  add_common(current, current_opts, false);

  CLI::App* pointer = app.add_subcommand(
      "pointer", "pointer-model measurement distributions");
  add_common(pointer, pointer_opts, false);

  CLI::App* validate =
      app.add_subcommand("validate", "check a configuration and exit");
  validate->add_option("--config", validate_path, "JSON configuration file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  if (validate->parsed()) {
    try {
      const nuweak::ScanConfig cfg = nuweak::load_config_file(validate_path);
      const auto par = nuweak::to_natural_units(cfg);
      std::cout << "OK: mode=" << nuweak::to_string(cfg.mode)
                << " n_flavors=" << cfg.n_flavors
                << " L_points=" << cfg.L_km.size()
                << " E_points=" << cfg.E_GeV.size()
                << " pairs=" << par.pairs.size() << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return kExitConfigError;
    }
  }
  if (scan->parsed()) return run(scan_opts, std::nullopt);
  if (current->parsed())
    return run(current_opts, nuweak::ScanMode::current_profile);
  if (pointer->parsed())
    return run(pointer_opts, nuweak::ScanMode::pointer_demo);
  return kExitConfigError;
}
