// Solver, eikonal and diagnostics chained for one configuration.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qlwave/config.hpp"
#include "qlwave/diagnostics.hpp"
#include "qlwave/eikonal.hpp"
#include "qlwave/fitting.hpp"
#include "qlwave/radial_solver.hpp"

namespace qlwave {

struct EnergySeries {
  std::vector<double> t, E00, E00_weighted;
  std::vector<EnergyRecord> records;  // every energy_stride-th snapshot
};

struct RunResult {
  RunConfig config;
  Trajectory trajectory;
  std::optional<CharacteristicBundle> bundle;
  std::vector<EikonalFields> fields;
  std::optional<EikonalBoundsReport> eikonal;
  EnergySeries energy;
  std::optional<GrowthFit> growth;  // on E_{0,0}
  std::vector<DecayFitReport> fits;
  std::vector<InequalityReport> inequalities;
  std::vector<std::string> notes;  // stages skipped or failed

  int exit_code() const;
};

/// Never throws for solver or diagnostic failures; they land in notes and
/// the trajectory termination.
RunResult run_pipeline(const RunConfig& config);

/// Flat headline values, identical for a run and the matching sweep row.
struct SummaryRow {
  double epsilon = 0.0;
  std::string equation, termination;
  bool blowup = false;
  double t_star = kInvalid, r_star = kInvalid;
  double t_last = 0.0;
  long steps = 0;
  double gamma = kInvalid, gamma_residual = kInvalid;
  bool gamma_good = false;
  double decay_exponent = kInvalid, weighted_decay_exponent = kInvalid;
  double min_rho_q = kInvalid, c2_fit = kInvalid, eikonal_residual_exponent = kInvalid;
  int inequality_failures = 0;
};

SummaryRow summary_row(const RunResult& r);

}  // namespace qlwave
