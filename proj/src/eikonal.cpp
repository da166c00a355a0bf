#include "qlwave/eikonal.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <optional>
#include <tuple>

namespace qlwave {

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 2 || y_.size() != x_.size()) throw std::invalid_argument("Pchip: need at least two nodes");
  std::vector<double> h(n - 1), delta(n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    if (!(h[i] > 0)) throw std::invalid_argument("Pchip: abscissae must increase strictly");
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (int i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0) continue;
    const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
    d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (d * d0 <= 0) return 0.0;
    if (d0 * d1 <= 0 && std::abs(d) > 3 * std::abs(d0)) d = 3 * d0;
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const int i = static_cast<int>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i], s = (x - x_[i]) / h;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

ConeInterpolator::ConeInterpolator(const Trajectory& traj) {
  if (traj.snapshots.empty()) throw EikonalError("trajectory has no snapshots");
  const Scenario& s = traj.scenario;
  r0_ = traj.snapshots.front().r0;
  dr_ = traj.snapshots.front().dr;
  for (const auto& snap : traj.snapshots) {
    times_.push_back(snap.t);
    H_.push_back(metric_fields(s, snap).H_LL);
    Eigen::ArrayXd dh(snap.size());
    const Eigen::ArrayXd pq = snap.phi_q();
    for (int j = 0; j < snap.size(); ++j) dh(j) = dh_ll_dphi(s, snap.phi(j)) * pq(j);
    Hq_.push_back(std::move(dh));
  }
}

std::pair<double, double> ConeInterpolator::sample(int k, double r) const {
  const Eigen::ArrayXd& H = H_[k];
  const Eigen::ArrayXd& Hq = Hq_[k];
  const int n = static_cast<int>(H.size());
  const double x = (std::abs(r) - r0_) / dr_;
  if (x <= 0) return {H(0), Hq(0)};
  const int j = static_cast<int>(std::floor(x));
  if (j >= n - 1) return {0.0, 0.0};
  const double a = x - j;
  return {(1 - a) * H(j) + a * H(j + 1), (1 - a) * Hq(j) + a * Hq(j + 1)};
}

std::pair<double, double> ConeInterpolator::at(double t, double q) const {
  const int K = static_cast<int>(times_.size());
  if (t <= times_.front()) return sample(0, q + times_.front());
  if (t >= times_.back()) return sample(K - 1, q + times_.back());
  const int k = static_cast<int>(std::upper_bound(times_.begin(), times_.end(), t) - times_.begin()) - 1;
  const double a = (t - times_[k]) / (times_[k + 1] - times_[k]);
  const auto [h0, q0] = sample(k, q + times_[k]);
  const auto [h1, q1] = sample(k + 1, q + times_[k + 1]);
  return {(1 - a) * h0 + a * h1, (1 - a) * q0 + a * q1};
}

namespace {

struct CurveState {
  double q = 0.0;
  double G = 0.0;
};

CurveState rhs(const ConeInterpolator& interp, double t, const CurveState& y) {
  const auto [H, Hq] = interp.at(t, y.q);
  const double lt = 1.0 - 0.25 * H;
  return {0.5 * H / lt, -0.5 * Hq / lt};
}

CurveState rk4(const ConeInterpolator& interp, double t, const CurveState& y, double h) {
  auto add = [](const CurveState& a, const CurveState& b, double c) { return CurveState{a.q + c * b.q, a.G + c * b.G}; };
  const CurveState k1 = rhs(interp, t, y);
  const CurveState k2 = rhs(interp, t + 0.5 * h, add(y, k1, 0.5 * h));
  const CurveState k3 = rhs(interp, t + 0.5 * h, add(y, k2, 0.5 * h));
  const CurveState k4 = rhs(interp, t + h, add(y, k3, h));
  return {y.q + h / 6.0 * (k1.q + 2 * k2.q + 2 * k3.q + k4.q), y.G + h / 6.0 * (k1.G + 2 * k2.G + 2 * k3.G + k4.G)};
}

CurveState advance(const ConeInterpolator& interp, double t0, double t1, CurveState y, double h_max) {
  const double span = t1 - t0;
  if (span == 0) return y;
  const int n = std::max(1, static_cast<int>(std::ceil(std::abs(span) / h_max)));
  const double h = span / n;
  for (int i = 0; i < n; ++i) y = rk4(interp, t0 + i * h, y, h);
  return y;
}

}  // namespace

std::vector<double> default_seeds(const Trajectory& traj, const EikonalParams& p) {
  const double dr = traj.scenario.dr;
  const double spacing = p.spacing > 0 ? p.spacing : 0.5 * dr;
  const double fine = p.fine_spacing > 0 ? p.fine_spacing : 0.5 * spacing;
  std::vector<double> seeds;
  auto segment = [&](double a, double b, double h) {
    const int n = static_cast<int>(std::round((b - a) / h));
    for (int i = 0; i < n; ++i) seeds.push_back(a + i * h);
  };
  const double lo = std::min(p.dense_min, -1.0), hi = std::max(p.dense_max, 1.0);
  segment(lo, -1.0, spacing);
  segment(-1.0, 1.0, fine);
  segment(1.0, hi, spacing);
  seeds.push_back(hi);
  const double t_end = traj.snapshots.empty() ? 0.0 : traj.snapshots.back().t;
  const double lower = -(0.5 * t_end + 1.0);
  for (double x = lo; x > lower;) {
    x -= std::max(spacing, p.growth * std::abs(x));
    seeds.push_back(x);
  }
  std::sort(seeds.begin(), seeds.end());
  return seeds;
}

CharacteristicBundle trace_characteristics(const Trajectory& traj, const std::vector<double>& seeds,
                                           const EikonalParams& params) {
  const ConeInterpolator interp(traj);
  CharacteristicBundle bundle;
  for (const auto& snap : traj.snapshots) bundle.snapshot_times.push_back(snap.t);
  const auto& times = bundle.snapshot_times;
  const int K = static_cast<int>(times.size());
  const double h_max = params.step_fraction * traj.scenario.dr;
  const bool truncated = traj.termination != Termination::Completed;

  std::vector<double> labels = seeds;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  for (double rho : labels) {
    CharacteristicCurve c;
    c.label = rho;
    c.t_entry = 2.0 * std::abs(rho);
    if (c.t_entry > times.back() + 1e-12) continue;
    c.first_snapshot =
        static_cast<int>(std::lower_bound(times.begin(), times.end(), c.t_entry - 1e-12) - times.begin());
    c.truncated = truncated;
    CurveState y{rho, 0.0};
    double t = c.t_entry;
    for (int k = c.first_snapshot; k < K; ++k) {
      y = advance(interp, t, times[k], y, h_max);
      t = times[k];
      const double r = t + y.q;
      c.t.push_back(t);
      c.q.push_back(y.q);
      c.r.push_back(r);
      c.s.push_back(0.5 * (t + r));
      c.G.push_back(y.G);
      if (std::abs(y.q) > 0.5 * t + 1e-9) c.left_strip = true;
    }
    bundle.curves.push_back(std::move(c));
  }
  return bundle;
}

TraceBack trace_back(const ConeInterpolator& interp, double t, double r, double h) {
  TraceBack out;
  CurveState y{r - t, 0.0};
  auto outside = [](double tt, double q) { return std::abs(q) >= 0.5 * tt; };
  if (outside(t, y.q)) {
    out.label = y.q;
    out.t_entry = t;
    return out;
  }
  while (true) {
    const double step = std::min(h, t);
    CurveState next = rk4(interp, t, y, -step);
    if (outside(t - step, next.q) || t - step <= 0) {
      double lo = 0.0, hi = step;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const CurveState m = rk4(interp, t, y, -mid);
        if (outside(t - mid, m.q)) hi = mid;
        else lo = mid;
      }
      next = rk4(interp, t, y, -hi);
      out.label = next.q;
      out.G = -next.G;
      out.t_entry = t - hi;
      return out;
    }
    y = next;
    t -= step;
  }
}

EikonalFields rho_fields_at(const CharacteristicBundle& bundle, const Trajectory& traj, int k) {
  const RadialSnapshot& snap = traj.snapshots.at(k);
  const Scenario& s = traj.scenario;
  EikonalFields f;
  f.t = snap.t;
  f.r = snap.radii();
  const int n = snap.size();
  f.H_LL = metric_fields(s, snap).H_LL;
  f.dqH.resize(n);
  const Eigen::ArrayXd pq = snap.phi_q();
  for (int j = 0; j < n; ++j) f.dqH(j) = dh_ll_dphi(s, snap.phi(j)) * pq(j);
  f.rho.resize(n);
  f.rho_q_fd.resize(n);
  f.rho_q_factor.resize(n);
  f.valid.resize(n);
  f.in_strip.resize(n);

  std::vector<std::tuple<double, double, double>> nodes;  // label, q, G
  for (const auto& c : bundle.curves) {
    const int i = k - c.first_snapshot;
    if (i < 0 || i >= static_cast<int>(c.q.size())) continue;
    nodes.emplace_back(c.label, c.q[i], c.G[i]);
  }
  const double half = 0.5 * f.t;
  if (f.t > 0) {
    for (double edge : {-half, half}) {
      const bool dup = std::any_of(nodes.begin(), nodes.end(),
                                   [&](const auto& nd) { return std::abs(std::get<1>(nd) - edge) < 1e-12; });
      if (!dup) nodes.emplace_back(edge, edge, 0.0);
    }
  }
  std::sort(nodes.begin(), nodes.end());
  std::vector<double> qs, labels, Gs;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto [label, q, G] = nodes[i];
    if (!qs.empty() && !(q > qs.back()))
      throw EikonalError(fmt::format("characteristics cross at t = {:.17g} (labels {:.17g} and {:.17g})", f.t,
                                     labels.back(), label));
    labels.push_back(label);
    qs.push_back(q);
    Gs.push_back(G);
  }

  const bool have_nodes = qs.size() >= 2;
  std::optional<Pchip> rho_of_q, G_of_q;
  if (have_nodes) {
    rho_of_q.emplace(qs, labels);
    G_of_q.emplace(qs, Gs);
  }
  for (int j = 0; j < n; ++j) {
    const double q = f.r(j) - f.t;
    f.in_strip(j) = f.t > 0 && std::abs(q) < half;
    if (!f.in_strip(j)) {
      f.rho(j) = q;
      f.rho_q_factor(j) = 1.0;
      f.valid(j) = true;
      continue;
    }
    f.valid(j) = have_nodes && q >= rho_of_q->front() && q <= rho_of_q->back();
    f.rho(j) = f.valid(j) ? (*rho_of_q)(q) : q;
    f.rho_q_factor(j) = f.valid(j) ? std::exp((*G_of_q)(q)) : 1.0;
  }
  const double dr = snap.dr;
  for (int j = 0; j < n; ++j) {
    if (!f.in_strip(j)) {
      f.rho_q_fd(j) = 1.0;
      continue;
    }
    const int a = std::max(0, j - 1), b = std::min(n - 1, j + 1);
    if (!f.valid(a) || !f.valid(b)) {
      f.rho_q_fd(j) = f.rho_q_factor(j);
      f.valid(j) = false;
      continue;
    }
    const double rho_r = (f.rho(b) - f.rho(a)) / ((b - a) * dr);
    f.rho_q_fd(j) = rho_r / (1.0 - 0.25 * f.H_LL(j));
  }
  return f;
}

std::vector<EikonalFields> rho_fields(const CharacteristicBundle& bundle, const Trajectory& traj) {
  std::vector<EikonalFields> out;
  out.reserve(traj.snapshots.size());
  for (int k = 0; k < static_cast<int>(traj.snapshots.size()); ++k) out.push_back(rho_fields_at(bundle, traj, k));
  return out;
}

EikonalBoundsReport verify_eikonal_bounds(const std::vector<EikonalFields>& fields, const Trajectory& traj,
                                          double epsilon, double nu, double fit_t1, double fit_t2) {
  if (fields.size() != traj.snapshots.size()) throw EikonalError("fields do not match the trajectory");
  const Scenario& s = traj.scenario;
  EikonalBoundsReport rep;
  rep.epsilon = epsilon;
  rep.nu = nu;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const EikonalFields& f = fields[k];
    const RadialSnapshot& snap = traj.snapshots[k];
    const double t = f.t;
    double res_sup = 0.0, wres_sup = 0.0;
    const Eigen::ArrayXd G = f.rho_q_factor.log();
    for (int j = 0; j < f.size(); ++j) {
      if (!f.valid(j)) continue;
      ++rep.points;
      const double rho = f.rho(j), arho = std::abs(rho), q = f.r(j) - t;
      const double H = f.H_LL(j);
      const double dH = std::abs(dh_ll_dphi(s, snap.phi(j))) * std::hypot(snap.phi_t(j), snap.phi_r(j));
      rep.c1_hypothesis = std::max({rep.c1_hypothesis, dH * (1 + t) * std::pow(1 + arho, nu) / epsilon,
                                    std::abs(H) * (1 + t) / (epsilon * (1 + std::abs(q)))});
      const double rq = f.rho_q_factor(j);
      rep.min_rho_q = std::min({rep.min_rho_q, rq, f.rho_q_fd(j)});

      if (!f.in_strip(j)) {
        rep.max_outside_error = std::max(rep.max_outside_error, std::abs(rho - q));
        continue;
      }
      // Off the strip rho = r - t solves nothing and the residual is just H_LL.
      const RadialTensor Hm = metric_perturbation(s, snap.phi(j));
      const double rt = f.rho_t(j), rr = f.rho_r(j);
      const double res = std::abs((-1.0 + Hm.tt) * rt * rt + 2.0 * Hm.tr * rt * rr + (1.0 + Hm.rr) * rr * rr);
      res_sup = std::max(res_sup, res);
      wres_sup = std::max(wres_sup, res / std::pow(1 + arho, 2.0 - 2.0 * nu));
      rep.max_method_gap = std::max(rep.max_method_gap, std::abs(f.rho_q_fd(j) - rq) / rq);
      const double L = std::log((1 + t) / (1 + arho));
      const double V = std::pow(1 + arho, -nu);
      const double lq = std::abs(std::log(rq));
      const double lratio = std::abs(std::log((1 + std::abs(q)) / (1 + arho)));
      if (L > 1e-12) {
        rep.c1_rho_q = std::max(rep.c1_rho_q, lq / (epsilon * V * L));
        rep.c1_q_ratio = std::max(rep.c1_q_ratio, lratio / (epsilon * L));
      } else {
        if (lq > 1e-14) rep.c1_rho_q = INFINITY;
        if (lratio > 1e-14) rep.c1_q_ratio = INFINITY;
      }
      const int a = j - 1, b = j + 1;
      if (a >= 0 && b < f.size() && f.valid(a) && f.valid(b) && f.in_strip(a) && f.in_strip(b) && L > 1e-12) {
        const double G_r = (G(b) - G(a)) / (2 * snap.dr);
        const double d_rho_G = G_r / rr + f.dqH(j) / (4.0 * (1.0 - 0.25 * H) * rq);
        rep.c2_fit = std::max(rep.c2_fit, std::abs(d_rho_G) * std::pow(1 + arho, 1 + nu) / (epsilon * L));
      }
    }
    rep.residual_t.push_back(t);
    rep.residual_sup.push_back(res_sup);
    rep.weighted_residual_sup.push_back(wres_sup);
  }
  if (rep.points == 0) throw EikonalError("empty valid mask");
  rep.rho_q_positive = rep.min_rho_q > 0;
  rep.rho_q_bound_holds = rep.c1_rho_q <= rep.c1_hypothesis;
  rep.q_ratio_bound_holds = rep.c1_q_ratio <= rep.c1_hypothesis;

  const double t_end = rep.residual_t.back();
  const double t1 = fit_t1 >= 0 ? fit_t1 : 0.1 * t_end;
  const double t2 = fit_t2 >= 0 ? fit_t2 : t_end;
  const auto idx = log_spaced_indices(rep.residual_t, t1, t2, 40);
  if (idx.size() >= 2) {
    std::vector<double> x, y;
    for (int i : idx) {
      x.push_back(1 + rep.residual_t[i]);
      y.push_back(rep.weighted_residual_sup[i]);
    }
    rep.residual_fit = fit_power_law(x, y);
  }
  return rep;
}

}  // namespace qlwave
