#include "qlwave/asymptotic.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

namespace qlwave {

namespace {

double omhat_power(const std::string& idx, const Eigen::Vector3d& w) {
  double p = 1.0;
  for (char c : idx) {
    switch (c) {
      case 't': p *= -1.0; break;
      case 'x': p *= w(0); break;
      case 'y': p *= w(1); break;
      case 'z': p *= w(2); break;
    }
  }
  return p;
}

double bump(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return u * u * u * u;
}

double bump_derivative(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  const double u = 1.0 - x * x;
  return -8.0 * x * u * u * u;
}

}  // namespace

AsymptoticCoefficients asymptotic_coefficients(const QuadraticNonlinearity& nl, const Eigen::Vector3d& omega) {
  AsymptoticCoefficients out;
  out.omega = omega.normalized();
  for (const auto& t : nl.terms) {
    const int m = static_cast<int>(t.alpha.size());
    const int n = static_cast<int>(t.beta.size());
    out.A(m, n) += 0.25 * t.coefficient * omhat_power(t.alpha, out.omega) * omhat_power(t.beta, out.omega);
  }
  return out;
}

std::vector<Eigen::Vector3d> direction_grid(int n) {
  std::vector<Eigen::Vector3d> out;
  out.reserve(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * i;
    out.emplace_back(rho * std::cos(phi), rho * std::sin(phi), z);
  }
  return out;
}

NullCheck check_null_condition(const QuadraticNonlinearity& nl, int n_directions) {
  if (n_directions < 6) throw std::invalid_argument("check_null_condition: need at least 6 directions");
  NullCheck c;
  for (const auto& w : direction_grid(n_directions))
    c.max_abs_A = std::max(c.max_abs_A, asymptotic_coefficients(nl, w).A.cwiseAbs().maxCoeff());
  c.null_condition = c.max_abs_A < 1e-12;
  return c;
}

Eigen::ArrayXd integrate_from_right(const Eigen::ArrayXd& V, double dq) {
  const Eigen::Index n = V.size();
  Eigen::ArrayXd Phi = Eigen::ArrayXd::Zero(n);
  for (Eigen::Index i = n - 2; i >= 0; --i) Phi(i) = Phi(i + 1) - 0.5 * dq * (V(i) + V(i + 1));
  return Phi;
}

AsymptoticProfile bump_profile(double amplitude, double q_min, double q_max, double dq, double s0) {
  AsymptoticProfile p;
  p.s = s0;
  p.q_min = q_min;
  p.dq = dq;
  const int n = static_cast<int>(std::floor((q_max - q_min) / dq + 1e-9)) + 1;
  p.Phi.resize(n);
  p.V.resize(n);
  for (int i = 0; i < n; ++i) {
    p.Phi(i) = amplitude * bump(p.q(i));
    p.V(i) = amplitude * bump_derivative(p.q(i));
  }
  return p;
}

AsymptoticProfile plateau_profile(double v0, double q_min, double q_max, double dq, double s0) {
  AsymptoticProfile p;
  p.s = s0;
  p.q_min = q_min;
  p.dq = dq;
  const int n = static_cast<int>(std::floor((q_max - q_min) / dq + 1e-9)) + 1;
  p.V.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a = std::abs(p.q(i));
    p.V(i) = a <= 0.5 ? v0 : v0 * bump(2.0 * (a - 0.5));
  }
  p.Phi = integrate_from_right(p.V, dq);
  return p;
}

namespace {

struct Rhs {
  Eigen::ArrayXd value;
  double max_speed = 0.0;
};

Rhs evaluate(const Eigen::Matrix3d& A, const Eigen::ArrayXd& V, double dq) {
  const Eigen::Index n = V.size();
  const Eigen::ArrayXd Phi = integrate_from_right(V, dq);
  Rhs out;
  out.value.resize(n);
  const bool transport = A(0, 2) != 0.0 || A(1, 2) != 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double vm = i > 0 ? V(i - 1) : V(i);
    const double vp = i + 1 < n ? V(i + 1) : 0.0;
    const double vq_c = (vp - vm) / (i > 0 && i + 1 < n ? 2.0 * dq : dq);
    double vq = vq_c;
    double c = 0.0;
    if (transport) {
      c = 2.0 * (A(0, 2) * Phi(i) + A(1, 2) * V(i));
      vq = c > 0.0 ? (vp - V(i)) / dq : (V(i) - vm) / dq;
      out.max_speed = std::max(out.max_speed, std::abs(c));
    }
    out.value(i) = 2.0 * (A(0, 0) * Phi(i) * Phi(i) + A(0, 1) * Phi(i) * V(i) + A(1, 1) * V(i) * V(i) +
                          A(2, 2) * vq_c * vq_c) +
                   c * vq;
  }
  return out;
}

}  // namespace

AsymptoticResult integrate_asymptotic(const AsymptoticCoefficients& coeffs, const AsymptoticProfile& initial,
                                      double s_max, const AsymptoticOptions& opt) {
  if (!(s_max > initial.s)) throw std::invalid_argument("integrate_asymptotic: s_max must exceed s0");
  const Eigen::Matrix3d& A = coeffs.A;
  const double dq = initial.dq;
  AsymptoticResult res;
  Eigen::ArrayXd V = initial.V;
  double s = initial.s;
  const double v0 = V.abs().maxCoeff();
  const double threshold = opt.blowup_threshold > 0 ? opt.blowup_threshold : 1e6 * std::max(v0, 1e-300);

  const double checkpoint_ds = (s_max - initial.s) / std::max(opt.checkpoints, 1);
  double next_checkpoint = initial.s;
  auto record = [&](bool force) {
    if (force || s >= next_checkpoint - 1e-12) {
      AsymptoticProfile p = initial;
      p.s = s;
      p.V = V;
      p.Phi = integrate_from_right(V, dq);
      res.checkpoints.push_back(std::move(p));
      while (next_checkpoint <= s + 1e-12) next_checkpoint += checkpoint_ds;
    }
  };
  record(true);
  res.s_series.push_back(s);
  res.max_v_series.push_back(v0);

  double ds_cfl_scale = 1.0;
  while (s < s_max && res.steps < opt.max_steps) {
    const Rhs k1 = evaluate(A, V, dq);
    const double vmax = V.abs().maxCoeff();
    const double rmax = k1.value.abs().maxCoeff();
    double ds = opt.ds_max;
    if (k1.max_speed > 0) ds = std::min(ds, ds_cfl_scale * opt.cfl * dq / k1.max_speed);
    if (rmax > 0 && vmax > 0) ds = std::min(ds, opt.growth_limit * vmax / rmax);
    const bool stiff = ds < opt.ds_min;
    ds = std::min(ds, s_max - s);
    if (stiff) {
      res.blow_up = true;
      res.stiffness = true;
      res.s_star = s;
      Eigen::Index imax;
      V.abs().maxCoeff(&imax);
      res.q_star = initial.q(static_cast<int>(imax));
      break;
    }
    const Eigen::ArrayXd Vh = V + 0.5 * ds * k1.value;
    const Rhs k2 = evaluate(A, Vh, dq);
    if (k2.max_speed * ds > opt.cfl * dq * (1.0 + 1e-12) && k2.max_speed > 0) {
      ds_cfl_scale *= 0.5;  // rejected: the midpoint state violates the CFL bound
      continue;
    }
    ds_cfl_scale = std::min(1.0, ds_cfl_scale * 2.0);
    V += ds * k2.value;
    s += ds;
    ++res.steps;
    const double m = V.abs().maxCoeff();
    res.s_series.push_back(s);
    res.max_v_series.push_back(m);
    if (!std::isfinite(m) || m > threshold) {
      res.blow_up = true;
      res.s_star = s;
      Eigen::Index imax = 0;
      if (std::isfinite(m)) V.abs().maxCoeff(&imax);
      res.q_star = initial.q(static_cast<int>(imax));
      break;
    }
    record(false);
  }
  if (res.checkpoints.back().s != s) record(true);
  return res;
}

std::optional<double> riccati_blowup_oracle(double A11, double V0_max, double s0) {
  const double prod = A11 * V0_max;
  if (!(prod > 0)) return std::nullopt;
  return s0 + 1.0 / (2.0 * prod);
}

std::string to_string(ClassificationKind k) {
  switch (k) {
    case ClassificationKind::ClassicalNull: return "ClassicalNull";
    case ClassificationKind::WeakNullEvidence: return "WeakNullEvidence";
    case ClassificationKind::BlowUp: return "BlowUp";
  }
  return "?";
}

namespace {

double growth_slope(const AsymptoticResult& r, double s0) {
  const double m0 = r.max_v_series.front();
  if (!(m0 > 0)) return 0.0;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 1; i < r.s_series.size(); ++i) {
    const double x = std::log1p(r.s_series[i] - s0);
    const double y = std::log(r.max_v_series[i] / m0);
    sxy += x * y;
    sxx += x * x;
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

Classification classify(const QuadraticNonlinearity& nl, const ClassifyParams& params) {
  Classification c;
  const NullCheck null = check_null_condition(nl, params.n_directions);
  c.max_abs_A = null.max_abs_A;
  if (null.null_condition) {
    c.kind = ClassificationKind::ClassicalNull;
    return c;
  }
  const auto dirs = direction_grid(params.n_directions);
  const AsymptoticProfile init = bump_profile(params.amplitude, params.q_min, params.q_max, params.dq);
  AsymptoticOptions opt = params.integrator;
  opt.blowup_threshold = params.blowup_threshold;
  opt.checkpoints = 1;

  auto run_one = [&](const Eigen::Vector3d& w) {
    return integrate_asymptotic(asymptotic_coefficients(nl, w), init, params.s_max, opt);
  };
  std::vector<AsymptoticResult> results(dirs.size());
  if (params.parallel > 1) {
    for (std::size_t b = 0; b < dirs.size(); b += params.parallel) {
      std::vector<std::future<AsymptoticResult>> jobs;
      for (std::size_t i = b; i < std::min(dirs.size(), b + params.parallel); ++i)
        jobs.push_back(std::async(std::launch::async, run_one, dirs[i]));
      for (std::size_t i = 0; i < jobs.size(); ++i) results[b + i] = jobs[i].get();
    }
  } else {
    for (std::size_t i = 0; i < dirs.size(); ++i) results[i] = run_one(dirs[i]);
  }

  c.kind = ClassificationKind::WeakNullEvidence;
  double earliest = INFINITY;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const auto& r = results[i];
    if (r.blow_up && r.s_star < earliest) {
      earliest = r.s_star;
      c.kind = ClassificationKind::BlowUp;
      c.s_star = r.s_star;
      c.q_star = r.q_star;
      c.stiffness = r.stiffness;
      c.omega_star = dirs[i];
    }
    if (!r.blow_up) c.growth_exponent = std::max(c.growth_exponent, growth_slope(r, init.s));
  }
  if (c.kind == ClassificationKind::BlowUp) {
    const auto A = asymptotic_coefficients(nl, c.omega_star).A;
    Eigen::Matrix3d others = A;
    others(1, 1) = 0.0;
    if (others.cwiseAbs().maxCoeff() == 0.0) {
      const double vext = A(1, 1) > 0 ? init.V.maxCoeff() : init.V.minCoeff();
      c.oracle_s_star = riccati_blowup_oracle(A(1, 1), vext, init.s);
    }
    c.growth_exponent = 0.0;
  }
  c.within_threshold = c.growth_exponent <= params.max_growth_exponent;
  return c;
}

}  // namespace qlwave
