#include "qlwave/output.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qlwave {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", x);
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

double number_or_nan(const json& j, const char* key) {
  return j.contains(key) && j[key].is_number() ? j[key].get<double>() : kInvalid;
}

std::ofstream open(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

void write_json(const json& j, const fs::path& file) {
  auto out = open(file);
  out << j.dump(2) << '\n';
}

void write_csv_row(std::ofstream& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out << ',';
    out << format_number(v);
    first = false;
  }
  out << '\n';
}

json fit_json(const PowerLawFit& f) {
  return {{"constant", number(f.constant)},
          {"exponent", number(f.exponent)},
          {"residual", number(f.residual)},
          {"samples", f.samples},
          {"degenerate", f.degenerate}};
}

json tensor_json(const RadialTensor& k) { return {{"tt", k.tt}, {"tr", k.tr}, {"rr", k.rr}, {"ang", k.ang}}; }

json scenario_json(const Scenario& s) {
  return {{"equation", to_string(s.equation)},
          {"c1", s.c1},
          {"k", tensor_json(s.k)},
          {"k2", tensor_json(s.k2)},
          {"epsilon", s.epsilon},
          {"data",
           {{"kind", s.data.kind == ProfileKind::Bump ? "bump" : "gaussian"},
            {"width", s.data.width},
            {"phi0_scale", s.data.phi0_scale},
            {"phi1_scale", s.data.phi1_scale}}},
          {"forcing",
           {{"amplitude", s.forcing.amplitude},
            {"t_center", s.forcing.t_center},
            {"t_half_width", s.forcing.t_half_width},
            {"r_half_width", s.forcing.r_half_width}}},
          {"dr", s.dr},
          {"r_max", s.effective_r_max()},
          {"cfl", s.cfl},
          {"t_end", s.t_end},
          {"output_every", s.output_every},
          {"blowup_factor", s.blowup_factor},
          {"dt_min", s.dt_min},
          {"speed_bound", s.speed_bound}};
}

}  // namespace

json to_json(const InequalityReport& r) {
  return {{"id", r.id},
          {"holds", r.holds()},
          {"min_margin", number(r.min_margin())},
          {"constant", number(r.constant)},
          {"paper_constant", number(r.paper_constant)},
          {"hypotheses_hold", r.hypotheses_hold},
          {"notes", r.notes},
          {"t", array(r.t)},
          {"lhs", array(r.lhs)},
          {"rhs", array(r.rhs)},
          {"margin", array(r.margin)}};
}

json to_json(const DecayFitReport& r) {
  return {{"quantity", to_string(r.quantity)},
          {"t1", number(r.t1)},
          {"t2", number(r.t2)},
          {"near_cone_only", r.near_cone_only},
          {"fit", fit_json(r.fit)},
          {"t", array(r.t)},
          {"value", array(r.value)}};
}

json to_json(const EikonalBoundsReport& r) {
  return {{"epsilon", number(r.epsilon)},
          {"nu", number(r.nu)},
          {"c1_hypothesis", number(r.c1_hypothesis)},
          {"c1_rho_q", number(r.c1_rho_q)},
          {"c1_q_ratio", number(r.c1_q_ratio)},
          {"rho_q_bound_holds", r.rho_q_bound_holds},
          {"q_ratio_bound_holds", r.q_ratio_bound_holds},
          {"c2_fit", number(r.c2_fit)},
          {"min_rho_q", number(r.min_rho_q)},
          {"rho_q_positive", r.rho_q_positive},
          {"max_method_gap", number(r.max_method_gap)},
          {"max_outside_error", number(r.max_outside_error)},
          {"residual_fit", fit_json(r.residual_fit)},
          {"points", r.points},
          {"residual_t", array(r.residual_t)},
          {"residual_sup", array(r.residual_sup)},
          {"weighted_residual_sup", array(r.weighted_residual_sup)}};
}

json to_json(const SummaryRow& r) {
  return {{"epsilon", number(r.epsilon)},
          {"equation", r.equation},
          {"termination", r.termination},
          {"blowup", r.blowup},
          {"t_star", number(r.t_star)},
          {"r_star", number(r.r_star)},
          {"t_last", number(r.t_last)},
          {"steps", r.steps},
          {"gamma", number(r.gamma)},
          {"gamma_residual", number(r.gamma_residual)},
          {"gamma_good", r.gamma_good},
          {"decay_exponent", number(r.decay_exponent)},
          {"weighted_decay_exponent", number(r.weighted_decay_exponent)},
          {"min_rho_q", number(r.min_rho_q)},
          {"c2_fit", number(r.c2_fit)},
          {"eikonal_residual_exponent", number(r.eikonal_residual_exponent)},
          {"inequality_failures", r.inequality_failures}};
}

SummaryRow summary_from_json(const json& j) {
  SummaryRow r;
  r.epsilon = number_or_nan(j, "epsilon");
  r.equation = j.at("equation").get<std::string>();
  r.termination = j.at("termination").get<std::string>();
  r.blowup = j.at("blowup").get<bool>();
  r.t_star = number_or_nan(j, "t_star");
  r.r_star = number_or_nan(j, "r_star");
  r.t_last = number_or_nan(j, "t_last");
  r.steps = j.at("steps").get<long>();
  r.gamma = number_or_nan(j, "gamma");
  r.gamma_residual = number_or_nan(j, "gamma_residual");
  r.gamma_good = j.at("gamma_good").get<bool>();
  r.decay_exponent = number_or_nan(j, "decay_exponent");
  r.weighted_decay_exponent = number_or_nan(j, "weighted_decay_exponent");
  r.min_rho_q = number_or_nan(j, "min_rho_q");
  r.c2_fit = number_or_nan(j, "c2_fit");
  r.eikonal_residual_exponent = number_or_nan(j, "eikonal_residual_exponent");
  r.inequality_failures = j.at("inequality_failures").get<int>();
  return r;
}

json to_json(const Classification& c) {
  json j = {{"kind", to_string(c.kind)},
            {"max_abs_A", number(c.max_abs_A)},
            {"growth_exponent", number(c.growth_exponent)},
            {"within_threshold", c.within_threshold},
            {"stiffness", c.stiffness}};
  if (c.kind == ClassificationKind::BlowUp) {
    j["s_star"] = number(c.s_star);
    j["q_star"] = number(c.q_star);
    j["omega_star"] = {c.omega_star.x(), c.omega_star.y(), c.omega_star.z()};
  }
  if (c.oracle_s_star) j["oracle_s_star"] = number(*c.oracle_s_star);
  return j;
}

std::vector<std::string> summary_header() {
  return {"epsilon", "equation", "termination", "blowup", "t_star", "r_star", "t_last", "steps", "gamma",
          "gamma_residual", "gamma_good", "decay_exponent", "weighted_decay_exponent", "min_rho_q", "c2_fit",
          "eikonal_residual_exponent", "inequality_failures"};
}

std::string summary_csv_line(const SummaryRow& r) {
  const auto n = [](double x) { return format_number(x); };
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}", n(r.epsilon), r.equation, r.termination,
                     r.blowup ? 1 : 0, n(r.t_star), n(r.r_star), n(r.t_last), r.steps, n(r.gamma), n(r.gamma_residual),
                     r.gamma_good ? 1 : 0, n(r.decay_exponent), n(r.weighted_decay_exponent), n(r.min_rho_q),
                     n(r.c2_fit), n(r.eikonal_residual_exponent), r.inequality_failures);
}

void write_summary_table(const std::vector<SummaryRow>& rows, const fs::path& file) {
  auto out = open(file);
  const auto h = summary_header();
  for (std::size_t i = 0; i < h.size(); ++i) out << (i ? "," : "") << h[i];
  out << '\n';
  for (const auto& r : rows) out << summary_csv_line(r) << '\n';
}

void write_run(const RunResult& r, const fs::path& dir) {
  fs::create_directories(dir / "snapshots");
  const Trajectory& tr = r.trajectory;
  const OutputConfig& oc = r.config.output;
  const SummaryRow row = summary_row(r);

  json summary = to_json(row);
  summary["message"] = tr.message;
  summary["notes"] = r.notes;
  if (tr.blowup) summary["blowup_reason"] = tr.blowup->reason;
  write_json(summary, dir / "summary.json");
  write_summary_table({row}, dir / "summary.csv");

  json report;
  report["summary"] = to_json(row);
  if (r.growth)
    report["growth"] = {{"gamma", number(r.growth->gamma)},
                        {"residual", number(r.growth->residual)},
                        {"samples", r.growth->samples},
                        {"good_quality", r.growth->good_quality}};
  report["eikonal"] = r.eikonal ? to_json(*r.eikonal) : json(nullptr);
  report["fits"] = json::array();
  for (const auto& f : r.fits) report["fits"].push_back(to_json(f));
  report["inequalities"] = json::object();
  for (const auto& q : r.inequalities) report["inequalities"][q.id] = to_json(q);
  report["notes"] = r.notes;
  write_json(report, dir / "report.json");

  {
    auto out = open(dir / "energy.csv");
    out << "t,E00,E00_weighted\n";
    for (std::size_t i = 0; i < r.energy.t.size(); ++i)
      write_csv_row(out, {r.energy.t[i], r.energy.E00[i],
                          i < r.energy.E00_weighted.size() ? r.energy.E00_weighted[i] : kInvalid});
  }
  if (!r.energy.records.empty()) {
    auto out = open(dir / "energy_records.csv");
    out << "t,k,i,E\n";
    for (const auto& rec : r.energy.records)
      for (int k = 0; k < 4; ++k)
        for (int i = 0; k + i < 4; ++i)
          if (std::isfinite(rec.E[k][i])) write_csv_row(out, {rec.t, double(k), double(i), rec.E[k][i]});
  }
  {
    auto out = open(dir / "inequalities.csv");
    out << "id,t,lhs,rhs,margin\n";
    for (const auto& q : r.inequalities)
      for (std::size_t i = 0; i < q.t.size(); ++i)
        out << q.id << ',' << format_number(q.t[i]) << ',' << format_number(q.lhs[i]) << ','
            << format_number(q.rhs[i]) << ',' << format_number(q.margin[i]) << '\n';
  }
  {
    json manifest;
    manifest["scenario"] = scenario_json(tr.scenario);
    manifest["termination"] = to_string(tr.termination);
    manifest["snapshots"] = json::array();
    for (std::size_t k = 0; k < tr.snapshots.size(); k += oc.snapshot_stride) {
      const RadialSnapshot& s = tr.snapshots[k];
      const std::string name = fmt::format("snapshots/snap_{:05d}.csv", k);
      manifest["snapshots"].push_back({{"index", k}, {"t", s.t}, {"file", name}});
      auto out = open(dir / name);
      out << "t,r,phi,dphi_dt,dphi_dr,dphi_dq,H_LL\n";
      for (int j = 0; j < s.size(); j += oc.r_stride)
        write_csv_row(out, {s.t, s.r(j), s.phi(j), s.phi_t(j), s.phi_r(j), 0.5 * (s.phi_r(j) - s.phi_t(j)),
                            h_ll(tr.scenario, s.phi(j))});
    }
    write_json(manifest, dir / "manifest.json");
  }
  if (r.bundle) {
    auto out = open(dir / "characteristics.csv");
    out << "label_rho,s,t,r,q,G\n";
    for (std::size_t c = 0; c < r.bundle->curves.size(); c += oc.curve_stride) {
      const auto& cv = r.bundle->curves[c];
      for (std::size_t i = 0; i < cv.t.size(); ++i) write_csv_row(out, {cv.label, cv.s[i], cv.t[i], cv.r[i], cv.q[i], cv.G[i]});
    }
  }
  if (!r.fields.empty()) {
    auto out = open(dir / "eikonal_fields.csv");
    out << "t,r,rho,rho_q_fd,rho_q_factor,valid,in_strip\n";
    for (std::size_t k = 0; k < r.fields.size(); k += oc.snapshot_stride) {
      const auto& f = r.fields[k];
      for (int j = 0; j < f.size(); j += oc.r_stride)
        write_csv_row(out, {f.t, f.r(j), f.rho(j), f.rho_q_fd(j), f.rho_q_factor(j), f.valid(j) ? 1.0 : 0.0,
                            f.in_strip(j) ? 1.0 : 0.0});
    }
  }
}

}  // namespace qlwave
