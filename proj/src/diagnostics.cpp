#include "qlwave/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlwave {

void InequalityReport::push(double time, double l, double r, double b) {
  t.push_back(time);
  lhs.push_back(l);
  rhs.push_back(r);
  base.push_back(b);
  margin.push_back(r - l);
}

bool InequalityReport::holds() const {
  return std::all_of(margin.begin(), margin.end(), [](double m) { return m >= 0; });
}

double InequalityReport::min_margin() const {
  return margin.empty() ? 0.0 : *std::min_element(margin.begin(), margin.end());
}

namespace {

constexpr double kFourPi = 4.0 * M_PI;

// Sets rhs = constant * base once the smallest admissible constant is known.
void close_with_measured_constant(InequalityReport& rep) {
  rep.constant = 0.0;
  std::size_t arg = rep.t.size();
  for (std::size_t i = 0; i < rep.t.size(); ++i)
    if (rep.base[i] > 0 && rep.lhs[i] / rep.base[i] > rep.constant) {
      rep.constant = rep.lhs[i] / rep.base[i];
      arg = i;
    }
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    rep.rhs[i] = i == arg ? rep.lhs[i] : rep.constant * rep.base[i];
    rep.margin[i] = rep.rhs[i] - rep.lhs[i];
  }
}

RadialTensor metric_derivative(const Scenario& s, double phi) {
  switch (s.equation) {
    case EquationKind::Model: {
      const double d = 2.0 * (1.0 + s.c1 * phi) * s.c1;
      return {0.0, 0.0, d, d};
    }
    case EquationKind::GeneralRadial: return s.k + s.k2 * (2.0 * phi);
    default: return {};
  }
}

double rho_grad_norm(const Scenario& s, double phi, double rt, double rr) {
  const RadialTensor H = metric_perturbation(s, phi);
  return (-1.0 + H.tt) * rt * rt + 2.0 * H.tr * rt * rr + (1.0 + H.rr) * rr * rr;
}

}  // namespace

WeightField WeightField::unit(double t, int n) {
  WeightField w;
  w.t = t;
  w.w = Eigen::ArrayXd::Ones(n);
  return w;
}

WeightField weight_field(double t, const Eigen::ArrayXd& phi, const Eigen::ArrayXd& rho, const WeightParams& p) {
  if (phi.size() != rho.size()) throw std::invalid_argument("weight_field: size mismatch");
  WeightField out;
  out.t = t;
  out.sigma = p.kappa * p.epsilon * std::log1p(t);
  out.w.resize(rho.size());
  const double floor = p.support_tol * (phi.size() ? phi.abs().maxCoeff() : 0.0);
  for (Eigen::Index j = 0; j < rho.size(); ++j) {
    double r = rho(j);
    if (r > 1.0) {
      if (std::abs(phi(j)) > floor && phi(j) != 0.0)
        throw std::domain_error("weight_field: rho = " + std::to_string(r) + " > 1 where phi is non-zero");
      r = 1.0;
    }
    out.w(j) = std::exp(out.sigma * std::pow(std::abs(r - 2.0), -p.nu_prime));
  }
  return out;
}

WeightField weight_field(const RadialSnapshot& snap, const EikonalFields& fields, const WeightParams& p) {
  return weight_field(snap.t, snap.phi, fields.rho, p);
}

double radial_integral(const Eigen::ArrayXd& f, double r0, double dr) {
  const Eigen::Index n = f.size();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!std::isfinite(f(j))) continue;
    const double r = r0 + j * dr;
    const double wt = (j == 0 || j == n - 1) ? 0.5 : 1.0;
    sum += wt * f(j) * r * r;
  }
  return kFourPi * sum * dr;
}

double basic_energy(const RadialSnapshot& snap, const WeightField& w) {
  Eigen::ArrayXd f(snap.size());
  for (int j = 0; j < snap.size(); ++j) f(j) = (snap.phi_t(j) * snap.phi_t(j) + snap.phi_r(j) * snap.phi_r(j)) * w.at(j);
  return radial_integral(f, snap.r0, snap.dr);
}

double reduced_energy(const RadialSnapshot& snap) {
  const Eigen::ArrayXd& u = snap.state.u;
  const Eigen::ArrayXd& v = snap.state.v;
  double sum = v.square().sum();
  for (Eigen::Index j = 0; j + 1 < u.size(); ++j) {
    const double d = (u(j + 1) - u(j)) / snap.dr;
    sum += d * d;
  }
  return sum * snap.dr;
}

namespace {

// Integral of |d f|^2 w over the centre level of f, weighted and unweighted.
std::pair<double, double> gradient_integrals(const GridField2D& f, const WeightField& w) {
  const GridField2D ft = partial_t(f), fr = partial_r(f);
  const int c = f.center();
  Eigen::ArrayXd a(f.nr()), b(f.nr());
  for (int j = 0; j < f.nr(); ++j) {
    const double g = ft(c, j) * ft(c, j) + fr(c, j) * fr(c, j);
    a(j) = g * w.at(j);
    b(j) = g;
  }
  return {radial_integral(a, f.r0(), f.dr()), radial_integral(b, f.r0(), f.dr())};
}

}  // namespace

double energy(const GridField2D& window, const WeightField& w, int k, int i) {
  if (k < 0 || i < 0 || k + i > 3) throw std::invalid_argument("energy: need k + i <= 3");
  if (window.levels() < levels_for(k + i + 1)) throw std::invalid_argument("energy: window has too few levels");
  const auto zs = apply_all_words(window, i);
  double total = 0.0;
  for (const auto& z : zs)
    for (int m = 0; m <= k; ++m)
      for (const auto& a : coordinate_derivatives(m)) total += gradient_integrals(apply_word(z, a), w).first;
  return total;
}

EnergyRecord energy_record(const RadialSolver& solver, const RadialSnapshot& snap, const WeightField& w,
                           int max_order) {
  if (max_order < 0 || max_order > 3) throw std::invalid_argument("energy_record: max_order must be in [0, 3]");
  EnergyRecord rec;
  rec.t = snap.t;
  for (auto& row : rec.E) row.fill(kInvalid);
  rec.E_N.fill(kInvalid);
  const GridField2D win = solver.window(snap, levels_for(max_order + 1));
  const auto words = words_up_to(max_order);
  const auto zs = apply_all_words(win, max_order);
  // part[m][l]: contribution of |a| = m, |I| = l.
  double part[4][4] = {}, flat[4] = {};
  for (std::size_t n = 0; n < words.size(); ++n) {
    const int l = static_cast<int>(words[n].size());
    for (int m = 0; l + m <= max_order; ++m) {
      for (const auto& a : coordinate_derivatives(m)) {
        const auto [weighted, plain] = gradient_integrals(apply_word(zs[n], a), w);
        part[m][l] += weighted;
        if (m == 0) flat[l] += plain;
      }
    }
  }
  for (int k = 0; k <= max_order; ++k) {
    for (int i = 0; k + i <= max_order; ++i) {
      double e = 0.0;
      for (int m = 0; m <= k; ++m)
        for (int l = 0; l <= i; ++l) e += part[m][l];
      rec.E[k][i] = e;
    }
  }
  double acc = 0.0;
  for (int n = 0; n <= max_order; ++n) rec.E_N[n] = (acc += flat[n]);
  return rec;
}

Eigen::ArrayXd box_g(const GridField2D& f, const Scenario& s) {
  if (f.levels() < 3) throw std::invalid_argument("box_g: need at least 3 levels");
  const int c = f.center();
  const double dt = f.dt(), dr = f.dr();
  Eigen::ArrayXd out = Eigen::ArrayXd::Constant(f.nr(), kInvalid);
  for (int j = 1; j + 1 < f.nr(); ++j) {
    const double r = f.r(j);
    if (r <= 0) continue;
    const double phi = f(c, j);
    const double ftt = (f(c + 1, j) - 2 * phi + f(c - 1, j)) / (dt * dt);
    const double ftr = (f(c + 1, j + 1) - f(c + 1, j - 1) - f(c - 1, j + 1) + f(c - 1, j - 1)) / (4 * dt * dr);
    const double frr = (f(c, j + 1) - 2 * phi + f(c, j - 1)) / (dr * dr);
    const double fr = (f(c, j + 1) - f(c, j - 1)) / (2 * dr);
    const RadialTensor H = metric_perturbation(s, phi);
    out(j) = (-1.0 + H.tt) * ftt + 2.0 * H.tr * ftr + (1.0 + H.rr) * frr + 2.0 * (1.0 + H.ang) * fr / r;
  }
  return out;
}

double measured_metric_c1(const Trajectory& traj, double epsilon) {
  const Scenario& s = traj.scenario;
  double c1 = 0.0;
  for (const auto& snap : traj.snapshots)
    for (int j = 0; j < snap.size(); ++j) {
      const double g = metric_derivative(s, snap.phi(j)).max_abs() * std::hypot(snap.phi_t(j), snap.phi_r(j));
      c1 = std::max(c1, g * (1 + snap.t) / epsilon);
    }
  return c1;
}

InequalityReport energy_inequality_check(const Trajectory& traj, const std::vector<EikonalFields>& fields,
                                         const EnergyCheckParams& params) {
  if (fields.size() != traj.snapshots.size()) throw std::invalid_argument("energy_inequality_check: fields mismatch");
  const Scenario& s = traj.scenario;
  const WeightParams& wp = params.weight;
  const double eps = wp.epsilon;
  InequalityReport rep;
  rep.id = "weighted_energy";
  const double c1 = params.c1 >= 0 ? params.c1 : measured_metric_c1(traj, eps);
  double c = c1 + wp.kappa;
  if (c <= 0) {
    c = 1.0;
    rep.notes.push_back("c1 + kappa = 0; c = 1 used");
  }
  rep.paper_constant = c;
  rep.notes.push_back("c1 = " + std::to_string(c1));

  const RadialSolver solver(s);
  double E0 = 0, I1 = 0, I2 = 0, prev_t = 0, prev_e = 0, prev_b = 0;
  double max_H = 0, worst_slope = INFINITY;
  bool rho_t_negative = true;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const RadialSnapshot& snap = traj.snapshots[k];
    const EikonalFields& f = fields[k];
    if (params.t_max >= 0 && snap.t > params.t_max + 1e-9) break;
    const WeightField w = weight_field(snap, f, wp);
    const double E = basic_energy(snap, w);
    const GridField2D win = solver.window(snap, 3);
    const Eigen::ArrayXd box = box_g(win, s);
    Eigen::ArrayXd src(box.size());
    for (Eigen::Index j = 0; j < box.size(); ++j) src(j) = box(j) * box(j) * w.at(static_cast<int>(j));
    const double B = radial_integral(src, win.r0(), win.dr());
    if (k == 0) {
      E0 = E;
    } else {
      const double h = snap.t - prev_t;
      I1 += 0.5 * h * (4 * c * eps / (1 + prev_t) * prev_e + 4 * c * eps / (1 + snap.t) * E);
      I2 += 0.5 * h * ((1 + prev_t) * prev_b + (1 + snap.t) * B);
    }
    const double rhs = 4 * E0 + I1 + 4.0 / (c * eps) * I2;
    rep.push(snap.t, E, rhs, rhs);
    prev_t = snap.t;
    prev_e = E;
    prev_b = B;

    for (int j = 0; j < f.size(); ++j) {
      if (!f.valid(j)) continue;
      max_H = std::max(max_H, metric_perturbation(s, snap.phi(j)).max_abs());
      const double rt = f.rho_t(j);
      if (!(rt < 0)) rho_t_negative = false;
      if (snap.t > 0 && wp.kappa > 0 && wp.nu_prime > 0) {
        const double val = rho_grad_norm(s, snap.phi(j), rt, f.rho_r(j)) /
                           (rt * std::pow(1 + std::abs(f.rho(j)), 1 + wp.nu_prime));
        const double bound = -1.0 / (wp.kappa * wp.nu_prime) / ((1 + snap.t) * std::log1p(snap.t));
        worst_slope = std::min(worst_slope, val - bound);
      }
    }
  }
  rep.constant = 0;
  for (std::size_t i = 0; i < rep.t.size(); ++i)
    if (rep.rhs[i] > 0) rep.constant = std::max(rep.constant, rep.lhs[i] / rep.rhs[i]);
  if (max_H > 0.5) {
    rep.hypotheses_hold = false;
    rep.notes.push_back("|g - m| exceeds 1/2");
  }
  if (!rho_t_negative) {
    rep.hypotheses_hold = false;
    rep.notes.push_back("rho_t >= 0 somewhere");
  }
  if (worst_slope < 0) {
    rep.hypotheses_hold = false;
    rep.notes.push_back("rho slope condition fails (worst margin " + std::to_string(worst_slope) + ")");
  }
  return rep;
}

std::pair<double, double> poincare_terms(const RadialSnapshot& snap, const EikonalFields& f, const WeightField& w) {
  if (f.size() != snap.size()) throw std::invalid_argument("poincare: eikonal fields missing for this snapshot");
  Eigen::ArrayXd a(snap.size());
  for (int j = 0; j < snap.size(); ++j) {
    const double r = snap.r(j), phi = snap.phi(j);
    const double x = phi * f.rho_r(j) / (1 + std::abs(f.rho(j)));
    const double y = phi / (1 + std::abs(r - snap.t));
    a(j) = (x * x + y * y) * w.at(j);
  }
  return {radial_integral(a, snap.r0, snap.dr), basic_energy(snap, w)};
}

InequalityReport poincare_check(const Trajectory& traj, const std::vector<EikonalFields>& fields,
                                const WeightParams& p, double c2) {
  if (fields.size() != traj.snapshots.size()) throw std::invalid_argument("poincare_check: missing rho fields");
  InequalityReport rep;
  rep.id = "poincare";
  rep.paper_constant = kPoincareConstant;
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    const WeightField w = weight_field(traj.snapshots[k], fields[k], p);
    const auto [lhs, base] = poincare_terms(traj.snapshots[k], fields[k], w);
    rep.push(traj.snapshots[k].t, lhs, kPoincareConstant * base, base);
    if (base > 0) rep.constant = std::max(rep.constant, lhs / base);
  }
  if (p.nu_prime > 0 && !(p.kappa > 2 * c2 / p.nu_prime)) {
    rep.hypotheses_hold = false;
    rep.notes.push_back("kappa <= 2 c2 / nu' with measured c2 = " + std::to_string(c2));
  }
  return rep;
}

std::pair<double, double> klainerman_sobolev_terms(const GridField2D& win) {
  if (win.levels() < 5) throw std::invalid_argument("klainerman_sobolev: need at least 5 levels");
  const int c = win.center();
  const double t = win.t_center();
  double lhs = 0.0;
  for (int j = 0; j < win.nr(); ++j) {
    const double r = win.r(j);
    lhs = std::max(lhs, (1 + t + r) * std::sqrt(1 + std::abs(t - r)) * std::abs(win(c, j)));
  }
  double base = 0.0;
  for (const auto& z : apply_all_words(win, 2)) {
    const Eigen::ArrayXd row = z.center_row();
    base += std::sqrt(radial_integral(row.square(), win.r0(), win.dr()));
  }
  return {lhs, base};
}

InequalityReport klainerman_sobolev_check(const Trajectory& traj, double constant, int stride) {
  InequalityReport rep;
  rep.id = "klainerman_sobolev";
  rep.paper_constant = constant;
  const RadialSolver solver(traj.scenario);
  const int K = static_cast<int>(traj.snapshots.size());
  for (int k = 0; k < K; k += std::max(1, stride)) {
    const auto [lhs, base] = klainerman_sobolev_terms(solver.window(traj.snapshots[k], 5));
    rep.push(traj.snapshots[k].t, lhs, constant * base, base);
    if (base > 0) rep.constant = std::max(rep.constant, lhs / base);
  }
  return rep;
}

namespace {

// Cumulative space-time integral of sum |Z^I F| / (1 + tau + r) on a tau grid.
struct ForcingIntegral {
  std::vector<double> tau, cumulative;

  double operator()(double t) const {
    if (tau.empty() || t <= tau.front()) return 0.0;
    if (t >= tau.back()) return cumulative.back();
    const auto it = std::upper_bound(tau.begin(), tau.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - tau.begin()) - 1;
    const double a = (t - tau[i]) / (tau[i + 1] - tau[i]);
    return (1 - a) * cumulative[i] + a * cumulative[i + 1];
  }
};

ForcingIntegral forcing_integral(const Forcing& F, const HormanderParams& p) {
  const auto words = words_up_to(2);
  const double R = F.r_half_width;
  const double t0 = std::max(0.0, F.t_center - F.t_half_width), t1 = F.t_center + F.t_half_width;
  const int nr = std::max(8, p.r_nodes);
  const double hr = R / nr;
  auto slice = [&](double tau) {
    double sum = 0.0;
    for (int i = 0; i <= nr; ++i) {
      const double r = i * hr;
      const Jet2 jet = F.jet(tau, r);
      double z = 0.0;
      for (const auto& w : words) z += std::abs(apply_word_exact(jet, w, tau, r));
      const double wt = (i == 0 || i == nr) ? 0.5 : 1.0;
      sum += wt * z / (1 + tau + r) * r * r;
    }
    return kFourPi * sum * hr;
  };
  ForcingIntegral out;
  const int nt = std::max(2, static_cast<int>(std::ceil((t1 - t0) / p.dtau)));
  const double ht = (t1 - t0) / nt;
  double prev = slice(t0), acc = 0.0;
  out.tau.push_back(t0);
  out.cumulative.push_back(0.0);
  for (int i = 1; i <= nt; ++i) {
    const double tau = t0 + i * ht;
    const double cur = slice(tau);
    acc += 0.5 * ht * (prev + cur);
    prev = cur;
    out.tau.push_back(tau);
    out.cumulative.push_back(acc);
  }
  return out;
}

double hormander_lhs(const RadialSnapshot& snap) {
  double lhs = 0.0;
  for (int j = 0; j < snap.size(); ++j) lhs = std::max(lhs, std::abs(snap.phi(j)) * (1 + snap.t + snap.r(j)));
  return lhs;
}

InequalityReport hormander_impl(const Trajectory& traj, const HormanderParams& params, bool with_data) {
  const Scenario& s = traj.scenario;
  if (s.equation != EquationKind::Forced) throw std::invalid_argument("hormander_check: needs a forced run");
  if (traj.snapshots.empty()) throw std::invalid_argument("hormander_check: empty trajectory");
  const bool zero_data = traj.snapshots.front().phi.abs().maxCoeff() == 0.0 &&
                         traj.snapshots.front().phi_t.abs().maxCoeff() == 0.0;
  if (!with_data && !zero_data)
    throw std::invalid_argument("hormander_check: non-zero initial data is handled by the corollary check");
  InequalityReport rep;
  rep.id = with_data ? "hormander_corollary" : "hormander";
  double data_term = 0.0;
  if (with_data) {
    const RadialSolver solver(s);
    const GridField2D win = solver.window(traj.snapshots.front(), levels_for(3));
    for (const auto& z : apply_all_words(win, 2)) {
      const auto [weighted, plain] = gradient_integrals(z, WeightField::unit(0.0, 0));
      (void)weighted;
      data_term += std::sqrt(plain);
    }
    rep.notes.push_back("initial-data term = " + std::to_string(data_term));
  }
  const ForcingIntegral I = forcing_integral(s.forcing, params);
  for (const auto& snap : traj.snapshots) {
    const double base = I(snap.t) + data_term;
    rep.push(snap.t, hormander_lhs(snap), base, base);
  }
  close_with_measured_constant(rep);
  return rep;
}

}  // namespace

InequalityReport hormander_check(const Trajectory& forced, const HormanderParams& params) {
  return hormander_impl(forced, params, false);
}

InequalityReport hormander_corollary_check(const Trajectory& forced, const HormanderParams& params) {
  return hormander_impl(forced, params, true);
}

std::vector<InequalityReport> tangential_check(const Trajectory& traj, int stride) {
  std::vector<InequalityReport> reps(3);
  reps[0].id = "tanZ";
  reps[1].id = "derZ";
  reps[2].id = "derframeZ";
  const RadialSolver solver(traj.scenario);
  const int K = static_cast<int>(traj.snapshots.size());
  for (int k = 0; k < K; k += std::max(1, stride)) {
    const auto bounds = tangential_bounds(solver.window(traj.snapshots[k], 5));
    for (int i = 0; i < 3; ++i) {
      const PointwiseBound& b = bounds[i];
      // Per time: the worst point's sides, normalised so lhs / base = constant.
      const double base = b.constant > 0 ? b.lhs / b.constant : 0.0;
      reps[i].push(traj.snapshots[k].t, b.lhs, base, base);
    }
  }
  for (auto& r : reps) close_with_measured_constant(r);
  return reps;
}

std::string to_string(DecayQuantity q) {
  switch (q) {
    case DecayQuantity::Phi: return "phi";
    case DecayQuantity::DPhi: return "dphi";
    case DecayQuantity::D2Phi: return "d2phi";
    case DecayQuantity::ZPhi: return "zphi";
    case DecayQuantity::WeightedDPhi: return "weighted_dphi";
    case DecayQuantity::WeightedD2Phi: return "weighted_d2phi";
  }
  return "?";
}

DecayQuantity decay_quantity_from_string(const std::string& s) {
  for (auto q : {DecayQuantity::Phi, DecayQuantity::DPhi, DecayQuantity::D2Phi, DecayQuantity::ZPhi,
                 DecayQuantity::WeightedDPhi, DecayQuantity::WeightedD2Phi})
    if (to_string(q) == s) return q;
  throw std::invalid_argument("unknown decay quantity '" + s + "'");
}

DecayFitReport decay_fit(const Trajectory& traj, const std::vector<EikonalFields>& fields, DecayQuantity q,
                         const DecayFitParams& p) {
  const bool have_rho = !fields.empty();
  if (have_rho && fields.size() != traj.snapshots.size()) throw std::invalid_argument("decay_fit: fields mismatch");
  const bool weighted = q == DecayQuantity::WeightedDPhi || q == DecayQuantity::WeightedD2Phi;
  DecayFitReport rep;
  rep.quantity = q;
  rep.near_cone_only = p.near_cone_only;
  std::vector<double> times;
  for (const auto& s : traj.snapshots) times.push_back(s.t);
  const double t_end = times.back();
  rep.t1 = p.t1 >= 0 ? p.t1 : 0.1 * t_end;
  rep.t2 = p.t2 >= 0 ? p.t2 : t_end;
  const auto idx = log_spaced_indices(times, rep.t1, rep.t2, p.samples);
  if (idx.size() < 10) throw std::invalid_argument("decay_fit: fewer than 10 samples in the window");
  const RadialSolver solver(traj.scenario);
  const bool need_window = q == DecayQuantity::D2Phi || q == DecayQuantity::ZPhi || q == DecayQuantity::WeightedD2Phi;
  for (int k : idx) {
    const RadialSnapshot& snap = traj.snapshots[k];
    GridField2D win;
    std::vector<GridField2D> zs;
    if (need_window) {
      win = solver.window(snap, 3);
      if (q == DecayQuantity::ZPhi)
        for (auto z : kAllFields) zs.push_back(apply_field(win, z));
    }
    const int c = 1;
    double sup = 0.0;
    for (int j = 0; j < snap.size(); ++j) {
      const double rho = have_rho ? fields[k].rho(j) : snap.r(j) - snap.t;
      const double rho_q = have_rho ? fields[k].rho_q_factor(j) : 1.0;
      if (p.near_cone_only && std::abs(rho) > 5.0) continue;
      double v = 0.0;
      switch (q) {
        case DecayQuantity::Phi: v = std::abs(snap.phi(j)); break;
        case DecayQuantity::DPhi:
        case DecayQuantity::WeightedDPhi: v = std::hypot(snap.phi_t(j), snap.phi_r(j)); break;
        case DecayQuantity::D2Phi:
        case DecayQuantity::WeightedD2Phi: {
          if (j < 1 || j + 1 >= win.nr()) continue;
          const double dt = win.dt(), dr = win.dr();
          const double ftt = (win(c + 1, j) - 2 * win(c, j) + win(c - 1, j)) / (dt * dt);
          const double ftr = (win(c + 1, j + 1) - win(c + 1, j - 1) - win(c - 1, j + 1) + win(c - 1, j - 1)) / (4 * dt * dr);
          const double frr = (win(c, j + 1) - 2 * win(c, j) + win(c, j - 1)) / (dr * dr);
          v = std::sqrt(ftt * ftt + 2 * ftr * ftr + frr * frr);
          break;
        }
        case DecayQuantity::ZPhi:
          for (const auto& z : zs)
            if (std::isfinite(z(c, j))) v = std::max(v, std::abs(z(c, j)));
          break;
      }
      if (weighted) {
        if (q == DecayQuantity::WeightedDPhi) v *= std::pow(1 + std::abs(rho), p.nu);
        else v *= std::pow(1 + std::abs(rho), 1 + p.nu) / rho_q;
      }
      sup = std::max(sup, v);
    }
    rep.t.push_back(snap.t);
    rep.value.push_back(sup);
  }
  std::vector<double> x;
  for (double t : rep.t) x.push_back(1 + t);
  rep.fit = fit_power_law(x, rep.value);
  return rep;
}

double gronwall_oracle(double E0, double A, double B, double epsilon, double t) {
  if (A < 0 || B < 0) throw std::invalid_argument("gronwall_oracle: A and B must be non-negative");
  return (4 * E0 + A) * std::pow(1 + t, 2 * B * epsilon);
}

GronwallHypothesis check_gronwall_hypothesis(const std::vector<double>& t, const std::vector<double>& E, double A,
                                             double B, double epsilon, double tol) {
  if (t.size() != E.size() || t.empty()) throw std::invalid_argument("check_gronwall_hypothesis: bad series");
  const double b = B * epsilon;
  auto integrand = [&](std::size_t i) { return b / (1 + t[i]) * (E[i] + A * std::pow(1 + t[i], b)); };
  GronwallHypothesis h;
  h.min_margin = INFINITY;
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) acc += 0.5 * (t[i] - t[i - 1]) * (integrand(i - 1) + integrand(i));
    const double rhs = 4 * E.front() + acc;
    const double m = rhs > 0 ? (rhs - E[i]) / rhs : (E[i] <= 0 ? 0.0 : -INFINITY);
    h.min_margin = std::min(h.min_margin, m);
  }
  h.holds = h.min_margin >= -tol;
  return h;
}

}  // namespace qlwave
