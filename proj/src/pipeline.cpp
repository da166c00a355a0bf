#include "qlwave/pipeline.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace qlwave {

int RunResult::exit_code() const {
  switch (trajectory.termination) {
    case Termination::Completed: return 0;
    case Termination::BlowUp: return 2;
    default: return 1;
  }
}

namespace {

bool wants(const DiagnosticsConfig& d, const std::string& id) {
  return std::find(d.inequalities.begin(), d.inequalities.end(), id) != d.inequalities.end();
}

void compute_energy(RunResult& res) {
  const Trajectory& tr = res.trajectory;
  const DiagnosticsConfig& d = res.config.diagnostics;
  const WeightParams wp{d.kappa, tr.scenario.epsilon, d.nu_prime};
  const RadialSolver solver(tr.scenario);
  const bool weighted = !res.fields.empty();
  for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
    const RadialSnapshot& snap = tr.snapshots[k];
    const WeightField unit = WeightField::unit(snap.t, snap.size());
    res.energy.t.push_back(snap.t);
    res.energy.E00.push_back(basic_energy(snap, unit));
    WeightField w = unit;
    if (weighted) {
      w = weight_field(snap, res.fields[k], wp);
      res.energy.E00_weighted.push_back(basic_energy(snap, w));
    }
    if (d.energy_max_order > 0 && k % d.energy_stride == 0)
      res.energy.records.push_back(energy_record(solver, snap, w, d.energy_max_order));
  }
}

void fit_growth(RunResult& res) {
  const auto& t = res.energy.t;
  if (t.size() < 10) {
    res.notes.push_back("growth fit skipped: fewer than 10 snapshots");
    return;
  }
  const DiagnosticsConfig& d = res.config.diagnostics;
  const double t1 = d.fit_t1 >= 0 ? d.fit_t1 : 0.1 * t.back();
  const double t2 = d.fit_t2 >= 0 ? std::min(d.fit_t2, t.back()) : t.back();
  try {
    res.growth = growth_exponent(t, res.energy.E00, t1, t2);
  } catch (const std::invalid_argument& e) {
    res.notes.push_back(std::string("growth fit skipped: ") + e.what());
  }
}

}  // namespace

RunResult run_pipeline(const RunConfig& config) {
  RunResult res;
  res.config = config;
  const Scenario& s = config.scenario;
  res.trajectory = run(s);
  Trajectory& tr = res.trajectory;
  if (tr.snapshots.empty()) return res;
  const DiagnosticsConfig& d = config.diagnostics;

  if (config.eikonal.enabled) {
    try {
      res.bundle = trace_characteristics(tr, default_seeds(tr, config.eikonal.params), config.eikonal.params);
      res.fields = rho_fields(*res.bundle, tr);
      res.eikonal = verify_eikonal_bounds(res.fields, tr, s.epsilon, config.eikonal.nu, d.fit_t1, d.fit_t2);
    } catch (const std::exception& e) {
      res.notes.push_back(std::string("eikonal: ") + e.what());
      res.fields.clear();
      res.eikonal.reset();
    }
  }

  try {
    compute_energy(res);
  } catch (const std::exception& e) {
    res.notes.push_back(std::string("energy: ") + e.what());
  }
  fit_growth(res);

  for (DecayQuantity q : d.fits) {
    DecayFitParams fp;
    fp.t1 = d.fit_t1;
    fp.t2 = d.fit_t2 >= 0 ? std::min(d.fit_t2, tr.snapshots.back().t) : -1.0;
    fp.nu = config.eikonal.nu;
    try {
      res.fits.push_back(decay_fit(tr, res.fields, q, fp));
    } catch (const std::exception& e) {
      res.notes.push_back("fit " + to_string(q) + ": " + e.what());
    }
  }

  const WeightParams wp{d.kappa, s.epsilon, d.nu_prime};
  auto attempt = [&](const std::string& id, auto&& fn) {
    if (!wants(d, id)) return;
    try {
      fn();
    } catch (const std::exception& e) {
      res.notes.push_back(id + ": " + e.what());
    }
  };
  attempt("energy", [&] {
    if (res.fields.empty()) throw std::runtime_error("no eikonal fields");
    EnergyCheckParams ep;
    ep.weight = wp;
    res.inequalities.push_back(energy_inequality_check(tr, res.fields, ep));
  });
  attempt("poincare", [&] {
    if (res.fields.empty() || !res.eikonal) throw std::runtime_error("no eikonal fields");
    res.inequalities.push_back(poincare_check(tr, res.fields, wp, res.eikonal->c2_fit));
  });
  attempt("klainerman_sobolev", [&] { res.inequalities.push_back(klainerman_sobolev_check(tr, kKlainermanSobolevConstant, d.ks_stride)); });
  attempt("tangential", [&] {
    for (auto& r : tangential_check(tr, d.tangential_stride)) res.inequalities.push_back(std::move(r));
  });
  attempt("hormander", [&] { res.inequalities.push_back(hormander_check(tr)); });
  attempt("hormander_corollary", [&] { res.inequalities.push_back(hormander_corollary_check(tr)); });
  return res;
}

SummaryRow summary_row(const RunResult& r) {
  SummaryRow row;
  const Trajectory& tr = r.trajectory;
  row.epsilon = tr.scenario.epsilon;
  row.equation = to_string(tr.scenario.equation);
  row.termination = to_string(tr.termination);
  row.blowup = tr.blowup.has_value();
  if (tr.blowup) {
    row.t_star = tr.blowup->t_star;
    row.r_star = tr.blowup->r_star;
  }
  row.t_last = tr.snapshots.empty() ? 0.0 : tr.snapshots.back().t;
  row.steps = tr.steps;
  if (r.growth) {
    row.gamma = r.growth->gamma;
    row.gamma_residual = r.growth->residual;
    row.gamma_good = r.growth->good_quality;
  }
  for (const auto& f : r.fits) {
    if (f.quantity == DecayQuantity::DPhi) row.decay_exponent = f.fit.exponent;
    if (f.quantity == DecayQuantity::WeightedDPhi) row.weighted_decay_exponent = f.fit.exponent;
  }
  if (r.eikonal) {
    row.min_rho_q = r.eikonal->min_rho_q;
    row.c2_fit = r.eikonal->c2_fit;
    row.eikonal_residual_exponent = r.eikonal->residual_fit.exponent;
  }
  for (const auto& q : r.inequalities)
    if (!q.holds()) ++row.inequality_failures;
  return row;
}

}  // namespace qlwave
