// Run and sweep configuration read from YAML documents.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "qlwave/diagnostics.hpp"
#include "qlwave/eikonal.hpp"
#include "qlwave/radial_solver.hpp"

namespace qlwave {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

struct EikonalConfig {
  bool enabled = true;  // ignored for equations with H = 0
  EikonalParams params{};
  double nu = 0.9;
};

struct DiagnosticsConfig {
  std::vector<std::string> inequalities;  // energy, poincare, klainerman_sobolev, tangential, hormander, hormander_corollary
  std::vector<DecayQuantity> fits{DecayQuantity::DPhi, DecayQuantity::WeightedDPhi};
  double kappa = 0.0;
  double nu_prime = 0.5;
  int ks_stride = 1;
  int tangential_stride = 10;
  int energy_max_order = 0;  // E_{k,i} records up to this total order
  int energy_stride = 20;
  double fit_t1 = -1.0, fit_t2 = -1.0;
};

struct OutputConfig {
  int snapshot_stride = 20;
  int r_stride = 4;
  int curve_stride = 10;
};

struct RunConfig {
  Scenario scenario{};
  EikonalConfig eikonal{};
  DiagnosticsConfig diagnostics{};
  OutputConfig output{};
  std::string out_dir = "out";
};

struct SweepConfig {
  RunConfig base{};
  std::vector<double> epsilons;
  int parallel = 1;
};

inline const std::vector<std::string> kInequalityIds{"energy",     "poincare",  "klainerman_sobolev",
                                                     "tangential", "hormander", "hormander_corollary"};

/// Throws ConfigError with the offending line for parse errors, unknown keys
/// and invalid values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

/// Same document with a top-level `sweep: {epsilons: [...], parallel: n}`.
SweepConfig parse_sweep_config(const std::string& text);
SweepConfig load_sweep_config(const std::string& path);

}  // namespace qlwave
