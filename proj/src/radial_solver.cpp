#include "qlwave/radial_solver.hpp"

#include <algorithm>
#include <cmath>

namespace qlwave {

std::string to_string(EquationKind e) {
  switch (e) {
    case EquationKind::Model: return "model";
    case EquationKind::GeneralRadial: return "general";
    case EquationKind::Semilinear: return "semilinear";
    case EquationKind::Forced: return "forced";
  }
  return "?";
}

EquationKind equation_from_string(const std::string& s) {
  if (s == "model") return EquationKind::Model;
  if (s == "general") return EquationKind::GeneralRadial;
  if (s == "semilinear") return EquationKind::Semilinear;
  if (s == "forced") return EquationKind::Forced;
  throw ScenarioError("equation: unknown kind '" + s + "' (expected model, general, semilinear or forced)");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::BlowUp: return "BlowUp";
    case Termination::Error: return "Error";
  }
  return "?";
}

double RadialTensor::max_abs() const {
  return std::max({std::abs(tt), std::abs(tr), std::abs(rr), std::abs(ang)});
}

SymTensor4<double> RadialTensor::tensor(const Direction<double>& omega) const {
  const Direction<double> w = omega.normalized();
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = tt;
  m.block<1, 3>(0, 1) = tr * w.transpose();
  m.block<3, 1>(1, 0) = tr * w;
  m.block<3, 3>(1, 1) = rr * w * w.transpose() + ang * (Eigen::Matrix3d::Identity() - w * w.transpose());
  return SymTensor4<double>(m);
}

namespace {

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return u * u * u * u;
}

double bump_d1(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return -8.0 * x * u * u * u;
}

double bump_d2(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return -8.0 * u * u * u + 48.0 * x * x * u * u;
}

}  // namespace

double DataProfile::value(double r) const {
  const double b = bump(r);
  return kind == ProfileKind::Bump ? b : std::exp(-r * r / (width * width)) * b;
}

double DataProfile::derivative(double r) const {
  if (kind == ProfileKind::Bump) return bump_d1(r);
  const double g = std::exp(-r * r / (width * width));
  return g * (bump_d1(r) - 2.0 * r / (width * width) * bump(r));
}

double Forcing::value(double t, double r) const {
  return amplitude * bump((t - t_center) / t_half_width) * bump(r / r_half_width);
}

Jet2 Forcing::jet(double t, double r) const {
  const double x = (t - t_center) / t_half_width, y = r / r_half_width;
  const double a = t_half_width, b = r_half_width;
  const double bt = bump(x), bt1 = bump_d1(x) / a, bt2 = bump_d2(x) / (a * a);
  const double br = bump(y), br1 = bump_d1(y) / b, br2 = bump_d2(y) / (b * b);
  return {amplitude * bt * br,  amplitude * bt1 * br,  amplitude * bt * br1,
          amplitude * bt2 * br, amplitude * bt1 * br1, amplitude * bt * br2};
}

void validate(const Scenario& s) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ScenarioError(msg);
  };
  require(std::isfinite(s.epsilon) && s.epsilon > 0, "epsilon must be positive");
  require(std::isfinite(s.dr) && s.dr > 0, "dr must be positive");
  require(std::isfinite(s.cfl) && s.cfl > 0 && s.cfl < 1, "cfl must lie in (0, 1)");
  require(std::isfinite(s.t_end) && s.t_end > 0, "t_end must be positive");
  require(std::isfinite(s.output_every) && s.output_every > 0, "output_every must be positive");
  require(s.r_max == 0 || (std::isfinite(s.r_max) && s.r_max > s.t_end + 2),
          "r_max must exceed t_end + 2 (or be 0 for automatic)");
  require(s.blowup_factor > 0, "blowup_factor must be positive");
  require(s.dt_min > 0, "dt_min must be positive");
  require(s.speed_bound >= 1, "speed_bound must be at least 1");
  require(s.data.width > 0, "data.width must be positive");
  require(s.forcing.t_half_width > 0 && s.forcing.r_half_width > 0, "forcing widths must be positive");
  require(s.equation != EquationKind::Forced || s.forcing.t_center >= s.forcing.t_half_width,
          "forcing.t_center must be at least forcing.t_half_width so the forcing starts after t = 0");
  require(s.effective_r_max() / s.dr >= 16, "r_max / dr too small");
}

RadialTensor metric_perturbation(const Scenario& s, double phi) {
  switch (s.equation) {
    case EquationKind::Model: {
      const double c = 1.0 + s.c1 * phi;
      return {0.0, 0.0, c * c - 1.0, c * c - 1.0};
    }
    case EquationKind::GeneralRadial: return s.k * phi + s.k2 * (phi * phi);
    default: return {};
  }
}

double h_ll(const Scenario& s, double phi) {
  switch (s.equation) {
    case EquationKind::Model: {
      const double c = 1.0 + s.c1 * phi;
      return c * c - 1.0;
    }
    case EquationKind::GeneralRadial: return s.k.ll() * phi + s.k2.ll() * phi * phi;
    default: return 0.0;
  }
}

double dh_ll_dphi(const Scenario& s, double phi) {
  switch (s.equation) {
    case EquationKind::Model: return 2.0 * (1.0 + s.c1 * phi) * s.c1;
    case EquationKind::GeneralRadial: return s.k.ll() + 2.0 * s.k2.ll() * phi;
    default: return 0.0;
  }
}

Eigen::ArrayXd RadialSnapshot::radii() const {
  return Eigen::ArrayXd::LinSpaced(size(), r0, r0 + (size() - 1) * dr);
}

double RadialSnapshot::max_gradient() const {
  if (phi.size() == 0) return 0.0;
  return std::max(phi_t.abs().maxCoeff(), phi_r.abs().maxCoeff());
}

int Trajectory::index_near(double t) const {
  int best = 0;
  for (int i = 1; i < static_cast<int>(snapshots.size()); ++i)
    if (std::abs(snapshots[i].t - t) < std::abs(snapshots[best].t - t)) best = i;
  return best;
}

RadialSolver::RadialSolver(Scenario s) : s_(std::move(s)) {
  validate(s_);
  const double rmax = s_.effective_r_max();
  n_ = static_cast<int>(std::floor(rmax / s_.dr)) + (staggered() ? 0 : 1);
}

bool RadialSolver::velocity_dependent() const {
  return s_.equation == EquationKind::Semilinear ||
         (s_.equation == EquationKind::GeneralRadial && (s_.k.tr != 0.0 || s_.k2.tr != 0.0));
}

int RadialSolver::active_limit(double t) const {
  double support = 1.0;
  if (s_.equation == EquationKind::Forced) support = std::max(1.0, s_.forcing.r_half_width);
  const double reach = support + std::abs(t) * s_.speed_bound + 8.0 * s_.dr;
  const int j = static_cast<int>(std::ceil(reach / s_.dr));
  return std::min(j, n_ - 2);
}

RadialState RadialSolver::initial_state() const {
  RadialState st;
  st.u = Eigen::ArrayXd::Zero(n_);
  st.v = Eigen::ArrayXd::Zero(n_);
  const double e0 = s_.epsilon * s_.data.phi0_scale, e1 = s_.epsilon * s_.data.phi1_scale;
  for (int j = 0; j < n_; ++j) {
    const double r = this->r(j);
    const double w = staggered() ? 1.0 : r;
    st.u(j) = w * e0 * s_.data.value(r);
    st.v(j) = w * e1 * s_.data.value(r);
  }
  return st;
}

void RadialSolver::acceleration(const Eigen::ArrayXd& u, const Eigen::ArrayXd& v, double t, int limit,
                                Eigen::ArrayXd& a) const {
  const double dr = s_.dr, inv2 = 1.0 / (dr * dr);
  a.setZero(n_);
  switch (s_.equation) {
    case EquationKind::Model:
      for (int j = 1; j <= limit; ++j) {
        const double c = 1.0 + s_.c1 * u(j) / (j * dr);
        a(j) = c * c * (u(j + 1) - 2.0 * u(j) + u(j - 1)) * inv2;
      }
      break;
    case EquationKind::Semilinear:
      for (int j = 1; j <= limit; ++j)
        a(j) = (u(j + 1) - 2.0 * u(j) + u(j - 1)) * inv2 - v(j) * v(j) / (j * dr);
      break;
    case EquationKind::Forced:
      for (int j = 1; j <= limit; ++j) {
        const double r = j * dr;
        a(j) = (u(j + 1) - 2.0 * u(j) + u(j - 1)) * inv2 - r * s_.forcing.value(t, r);
      }
      break;
    case EquationKind::GeneralRadial:
      for (int j = 0; j <= limit; ++j) {
        const double um = j > 0 ? u(j - 1) : u(0);
        const double vm = j > 0 ? v(j - 1) : v(0);
        const double r = (j + 0.5) * dr;
        const RadialTensor H = s_.k * u(j) + s_.k2 * (u(j) * u(j));
        const double g00 = -1.0 + H.tt, g0r = H.tr, grr = 1.0 + H.rr, gang = 1.0 + H.ang;
        const double ur = (u(j + 1) - um) / (2.0 * dr);
        const double urr = (u(j + 1) - 2.0 * u(j) + um) * inv2;
        const double vr = (v(j + 1) - vm) / (2.0 * dr);
        a(j) = -(2.0 * g0r * vr + grr * urr + 2.0 * gang * ur / r) / g00;
      }
      break;
  }
}

void RadialSolver::step(RadialState& st, double dt) const {
  if (st.u.size() < n_) {
    const Eigen::Index old = st.u.size();
    st.u.conservativeResize(n_);
    st.v.conservativeResize(n_);
    st.u.tail(n_ - old).setZero();
    st.v.tail(n_ - old).setZero();
  }
  const int limit = active_limit(std::max(std::abs(st.t), std::abs(st.t + dt)));
  Eigen::ArrayXd a;
  acceleration(st.u, st.v, st.t, limit, a);
  const Eigen::ArrayXd vh = st.v + 0.5 * dt * a;
  st.u += dt * vh;
  st.t += dt;
  if (velocity_dependent()) {
    st.v = vh;
    for (int it = 0; it < 4; ++it) {
      acceleration(st.u, st.v, st.t, limit, a);
      st.v = vh + 0.5 * dt * a;
    }
  } else {
    acceleration(st.u, vh, st.t, limit, a);
    st.v = vh + 0.5 * dt * a;
  }
  if (!staggered()) {
    st.u(0) = 0.0;
    st.v(0) = 0.0;
  }
}

double RadialSolver::max_speed(const RadialState& st) const {
  const int limit = std::min<int>(active_limit(st.t), static_cast<int>(st.u.size()) - 2);
  double speed = 1.0;
  if (s_.equation == EquationKind::Model) {
    for (int j = 1; j <= limit; ++j) speed = std::max(speed, std::abs(1.0 + s_.c1 * st.u(j) / (j * s_.dr)));
  } else if (s_.equation == EquationKind::GeneralRadial) {
    for (int j = 0; j <= limit; ++j) {
      const RadialTensor H = metric_perturbation(s_, st.u(j));
      const double g00 = -1.0 + H.tt, g0r = H.tr, grr = 1.0 + H.rr;
      const double disc = std::max(0.0, g0r * g0r - g00 * grr);
      speed = std::max(speed, (std::abs(g0r) + std::sqrt(disc)) / std::abs(g00));
    }
  }
  return speed;
}

RadialSolver::Derived RadialSolver::derived(const RadialState& st, int limit) const {
  Derived d;
  const int n = limit + 1;
  const double dr = s_.dr;
  const Eigen::Index size = st.u.size();
  auto at = [&](const Eigen::ArrayXd& x, int j) { return j < size ? x(j) : 0.0; };
  d.phi.resize(n);
  d.phi_t.resize(n);
  d.phi_r.resize(n);
  if (staggered()) {
    for (int j = 0; j < n; ++j) {
      d.phi(j) = at(st.u, j);
      d.phi_t(j) = at(st.v, j);
      const double um = j > 0 ? at(st.u, j - 1) : at(st.u, 0);
      d.phi_r(j) = (at(st.u, j + 1) - um) / (2.0 * dr);
    }
    return d;
  }
  auto phi_of = [&](const Eigen::ArrayXd& x, int j) {
    if (j == 0) return (8.0 * at(x, 1) - at(x, 2)) / (6.0 * dr);
    return at(x, j) / (j * dr);
  };
  for (int j = 0; j < n; ++j) {
    d.phi(j) = phi_of(st.u, j);
    d.phi_t(j) = phi_of(st.v, j);
  }
  d.phi_r(0) = 0.0;
  for (int j = 1; j < n; ++j) d.phi_r(j) = (phi_of(st.u, j + 1) - phi_of(st.u, j - 1)) / (2.0 * dr);
  return d;
}

RadialSnapshot RadialSolver::snapshot(const RadialState& st) const {
  const int limit = active_limit(st.t);
  Derived d = derived(st, limit);
  RadialSnapshot snap;
  snap.t = st.t;
  snap.r0 = r(0);
  snap.dr = s_.dr;
  snap.phi = std::move(d.phi);
  snap.phi_t = std::move(d.phi_t);
  snap.phi_r = std::move(d.phi_r);
  const int keep = std::min<int>(limit + 2, static_cast<int>(st.u.size()));
  snap.state.t = st.t;
  snap.state.u = st.u.head(keep);
  snap.state.v = st.v.head(keep);
  return snap;
}

GridField2D RadialSolver::window(const RadialSnapshot& snap, int levels, double h) const {
  if (levels < 1 || levels % 2 == 0) throw std::invalid_argument("window: level count must be odd");
  if (h <= 0) h = s_.dr;
  const int m = (levels - 1) / 2;
  const int limit = active_limit(std::abs(snap.t) + m * h);
  Eigen::ArrayXXd values(levels, limit + 1);
  values.row(m) = derived(snap.state, limit).phi.transpose();
  for (int dir : {1, -1}) {
    RadialState st = snap.state;
    for (int k = 1; k <= m; ++k) {
      step(st, dir * h);
      values.row(m + dir * k) = derived(st, limit).phi.transpose();
    }
  }
  return GridField2D(std::move(values), snap.t, h, r(0), s_.dr);
}

namespace {

struct GradientPeak {
  double value = 0.0;
  int index = 0;
  bool finite = true;
};

}  // namespace

Trajectory RadialSolver::run() const {
  Trajectory traj;
  traj.scenario = s_;
  RadialState st = initial_state();
  traj.snapshots.push_back(snapshot(st));
  const double threshold = s_.blowup_factor * s_.epsilon;
  const double refine_floor = std::max(s_.dt_min, 1e-6 * s_.dr);

  auto peak = [&](const RadialState& x) {
    GradientPeak p;
    const Derived d = derived(x, active_limit(x.t));
    for (int j = 0; j < d.phi.size(); ++j) {
      const double g = std::max(std::abs(d.phi_t(j)), std::abs(d.phi_r(j)));
      if (!std::isfinite(g)) {
        p.finite = false;
        p.index = j;
        return p;
      }
      if (g > p.value) {
        p.value = g;
        p.index = j;
      }
    }
    return p;
  };

  long out_index = 1;
  while (st.t < s_.t_end - 1e-12) {
    const double dt_cfl = s_.cfl * s_.dr / max_speed(st);
    if (!(dt_cfl >= s_.dt_min)) {
      traj.termination = Termination::BlowUp;
      traj.blowup = BlowUpInfo{st.t, 0.0, "dt"};
      const GradientPeak p = peak(st);
      traj.blowup->r_star = r(p.index);
      break;
    }
    const double target = std::min(out_index * s_.output_every, s_.t_end);
    // Equal steps across the remaining output interval: alternating long and
    // short leapfrog steps can destabilise grid-scale modes near CFL 1.
    const double span = target - st.t;
    const double dt = span / std::ceil(span / dt_cfl - 1e-9);
    RadialState trial = st;
    step(trial, dt);
    GradientPeak p = peak(trial);
    if (!p.finite || p.value > threshold) {
      // Halve the step from the last good state until it falls below the
      // floor; t* sits between the last good time and the first bad one.
      double h = dt;
      RadialState good = st;
      GradientPeak bad = p;
      while (h > refine_floor) {
        h *= 0.5;
        RadialState tr = good;
        step(tr, h);
        const GradientPeak q = peak(tr);
        ++traj.steps;
        if (!q.finite || q.value > threshold) {
          bad = q;
          continue;
        }
        good = std::move(tr);
      }
      if (good.t > traj.snapshots.back().t) traj.snapshots.push_back(snapshot(good));
      if (!bad.finite) {
        traj.termination = Termination::Error;
        traj.message = "non-finite field values after t = " + std::to_string(good.t);
        break;
      }
      traj.termination = Termination::BlowUp;
      traj.blowup = BlowUpInfo{good.t + h, r(bad.index), "gradient"};
      break;
    }
    st = std::move(trial);
    ++traj.steps;
    if (st.t >= target - 1e-12) {
      st.t = target;
      traj.snapshots.push_back(snapshot(st));
      if (target >= out_index * s_.output_every - 1e-12) ++out_index;
    }
  }
  return traj;
}

Trajectory run(const Scenario& s) { return RadialSolver(s).run(); }

double exact_linear_solution(const Scenario& s, double t, double r) {
  const bool linear = (s.equation == EquationKind::Model && s.c1 == 0.0) ||
                      (s.equation == EquationKind::GeneralRadial && s.k.max_abs() == 0.0 && s.k2.max_abs() == 0.0) ||
                      (s.equation == EquationKind::Forced && s.forcing.amplitude == 0.0);
  if (!linear) throw std::invalid_argument("exact_linear_solution: scenario is not the free wave equation");
  if (s.data.kind != ProfileKind::Bump && s.data.phi1_scale != 0.0)
    throw std::invalid_argument("exact_linear_solution: no closed form for this velocity profile");
  const double e0 = s.epsilon * s.data.phi0_scale, e1 = s.epsilon * s.data.phi1_scale;
  const auto& P = s.data;
  auto psi = [&](double x) { return e0 * x * P.value(std::abs(x)); };
  auto psi_d = [&](double x) { return e0 * (P.value(std::abs(x)) + std::abs(x) * P.derivative(std::abs(x))); };
  // Antiderivative of x (1 - x^2)^4, even in x.
  auto F = [&](double x) {
    if (std::abs(x) >= 1.0) return e1 * 0.1;
    const double u = 1.0 - x * x;
    return e1 * (1.0 - u * u * u * u * u) * 0.1;
  };
  auto F_d = [&](double x) { return e1 * x * bump(x); };
  if (r == 0.0) return psi_d(t) + F_d(t);
  const double Phi = 0.5 * (psi(r + t) + psi(r - t)) + 0.5 * (F(r + t) - F(r - t));
  return Phi / r;
}

MetricFields metric_fields(const Scenario& s, const RadialSnapshot& snap) {
  MetricFields m;
  const int n = snap.size();
  m.H_LL.resize(n);
  m.H_LLbar.resize(n);
  m.trbar_H.resize(n);
  const NullFrame<double> f = frame_at<double>(Direction<double>::UnitZ());
  for (int j = 0; j < n; ++j) {
    const SymTensor4<double> H = metric_perturbation(s, snap.phi(j)).tensor(f.omega);
    m.H_LL(j) = contract(H, f.L, f.L);
    m.H_LLbar(j) = contract(H, f.L, f.Lbar);
    m.trbar_H(j) = contract(H, f.S1, f.S1) + contract(H, f.S2, f.S2);
  }
  return m;
}

std::optional<BlowUpInfo> detect_blowup(const Trajectory& traj) { return traj.blowup; }

}  // namespace qlwave
