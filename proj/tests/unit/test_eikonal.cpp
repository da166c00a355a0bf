#include <gtest/gtest.h>

#include <cmath>

#include "qlwave/eikonal.hpp"

using namespace qlwave;

namespace {

// Snapshots with phi constant, so H_LL is constant and d_q H_LL = 0.
Trajectory constant_metric(double phi0, double t_end = 20.0) {
  Trajectory tr;
  tr.scenario.c1 = 1.0;
  tr.scenario.dr = 0.05;
  tr.scenario.t_end = t_end;
  const int n = static_cast<int>(3 * t_end / tr.scenario.dr);
  for (double t = 0; t <= t_end + 1e-12; t += 0.5) {
    RadialSnapshot s;
    s.t = t;
    s.dr = tr.scenario.dr;
    s.phi = Eigen::ArrayXd::Constant(n, phi0);
    s.phi_t = s.phi_r = Eigen::ArrayXd::Zero(n);
    tr.snapshots.push_back(s);
  }
  return tr;
}

const Trajectory& linear_run() {
  static const Trajectory tr = [] {
    Scenario s;
    s.c1 = 0.0;
    s.dr = 0.04;
    s.t_end = 20;
    s.output_every = 1.0;
    return run(s);
  }();
  return tr;
}

const Trajectory& model_run() {
  static const Trajectory tr = [] {
    Scenario s;
    s.epsilon = 0.01;
    s.dr = 0.02;
    s.cfl = 0.95;
    s.t_end = 40;
    s.output_every = 0.5;
    return run(s);
  }();
  return tr;
}

}  // namespace

TEST(Eikonal, SeedsAreSortedAndCoverTheRun) {
  const auto& tr = linear_run();
  const auto seeds = default_seeds(tr);
  EXPECT_TRUE(std::is_sorted(seeds.begin(), seeds.end()));
  EXPECT_LE(seeds.front(), -(0.5 * 20 + 1.0));
  EXPECT_GE(seeds.back(), 3.0);
  int fine = 0;
  for (double x : seeds) fine += std::abs(x) < 1.0;
  EXPECT_NEAR(fine, 2.0 / (0.25 * tr.scenario.dr), 2);
}

TEST(Eikonal, LinearRunCurvesAreStraight) {
  const auto& tr = linear_run();
  const auto b = trace_characteristics(tr, default_seeds(tr));
  ASSERT_FALSE(b.curves.empty());
  for (const auto& c : b.curves) {
    for (std::size_t i = 0; i < c.q.size(); ++i) {
      EXPECT_EQ(c.q[i], c.label);
      EXPECT_EQ(c.G[i], 0.0);
      if (i > 0) EXPECT_GT(c.t[i], c.t[i - 1]);
    }
    EXPECT_FALSE(c.left_strip);
  }
  const auto fields = rho_fields(b, tr);
  for (const auto& f : fields)
    for (int j = 0; j < f.size(); ++j) {
      if (!f.valid(j)) continue;
      EXPECT_NEAR(f.rho(j), f.r(j) - f.t, 1e-12);
      EXPECT_NEAR(f.rho_q_factor(j), 1.0, 1e-12);
      EXPECT_NEAR(f.rho_q_fd(j), 1.0, 1e-9);
    }
  const auto rep = verify_eikonal_bounds(fields, tr, 0.01);
  EXPECT_EQ(rep.c1_hypothesis, 0.0);
  EXPECT_EQ(rep.c2_fit, 0.0);
  EXPECT_TRUE(rep.rho_q_positive);
  EXPECT_NEAR(rep.min_rho_q, 1.0, 1e-9);
  EXPECT_LT(rep.max_outside_error, 1e-12);
}

TEST(Eikonal, ConstantMetricGivesLinearDrift) {
  const double phi0 = 5e-4;
  const auto tr = constant_metric(phi0);
  const double h = h_ll(tr.scenario, phi0);
  const double drift = 0.5 * h / (1 - 0.25 * h);
  const auto b = trace_characteristics(tr, {-4.0, -2.5, -1.0, 0.5, 3.0});
  ASSERT_EQ(b.curves.size(), 5u);
  for (const auto& c : b.curves) {
    ASSERT_FALSE(c.t.empty());
    for (std::size_t i = 0; i < c.t.size(); ++i) {
      EXPECT_NEAR(c.q[i], c.label + drift * (c.t[i] - c.t_entry), 1e-12);
      EXPECT_EQ(c.G[i], 0.0);
    }
  }
}

TEST(Eikonal, ConstantMetricRhoQ) {
  // The integrating factor ignores the launch surface, where q = rho and
  // t = 2|rho|. Differencing rho sees it: with v the drift,
  // rho = (r - t - v t) / (1 - 2 v sgn rho), so (d_r - d_t) rho / 2 is
  // (1 + v/2) / (1 - 2 v sgn rho).
  const double phi0 = 5e-4;
  const auto tr = constant_metric(phi0);
  const double h = h_ll(tr.scenario, phi0);
  const double drift = 0.5 * h / (1 - 0.25 * h);
  const auto b = trace_characteristics(tr, default_seeds(tr));
  const auto f = rho_fields_at(b, tr, static_cast<int>(tr.snapshots.size()) - 1);
  int checked = 0;
  for (int j = 0; j < f.size(); ++j) {
    if (!f.valid(j) || !f.in_strip(j) || std::abs(f.rho(j)) < 0.5) continue;
    EXPECT_NEAR(f.rho_q_factor(j), 1.0, 1e-12);
    const double jac = (1.0 + 0.5 * drift) / (1.0 - 2 * drift * (f.rho(j) > 0 ? 1 : -1));
    EXPECT_NEAR(f.rho_q_fd(j), jac, 0.01 * drift);
    ++checked;
  }
  EXPECT_GT(checked, 100);
}

TEST(Eikonal, TraceBackInvertsTheForwardTrace) {
  const auto& tr = model_run();
  const ConeInterpolator interp(tr);
  const auto b = trace_characteristics(tr, {-6.0, -3.0, -1.0, -0.3, 0.4, 2.0});
  for (const auto& c : b.curves) {
    const std::size_t i = c.t.size() - 1;
    const auto back = trace_back(interp, c.t[i], c.r[i], 0.45 * tr.scenario.dr);
    EXPECT_NEAR(back.label, c.label, 1e-6) << c.label;
    EXPECT_NEAR(back.G, c.G[i], 1e-6) << c.label;
  }
  const auto outside = trace_back(interp, 10.0, 2.0, 0.01);
  EXPECT_EQ(outside.label, -8.0);
  EXPECT_EQ(outside.G, 0.0);
}

TEST(Eikonal, ModelRunCurvesDoNotCross) {
  const auto& tr = model_run();
  const auto seeds = default_seeds(tr);
  const auto b = trace_characteristics(tr, seeds);
  // Curves are sorted by label; crossing would break the order of q.
  for (std::size_t k = 0; k < b.snapshot_times.size(); ++k) {
    double prev = -INFINITY;
    for (const auto& c : b.curves) {
      const int i = static_cast<int>(k) - c.first_snapshot;
      if (i < 0) continue;
      EXPECT_GT(c.q[i], prev) << b.snapshot_times[k];
      prev = c.q[i];
    }
  }
  for (const auto& c : b.curves) {
    EXPECT_FALSE(c.left_strip) << c.label;
    for (std::size_t i = 1; i < c.t.size(); ++i) ASSERT_GT(c.t[i], c.t[i - 1]);
  }
}

TEST(Eikonal, ModelRunFields) {
  const auto& tr = model_run();
  const auto b = trace_characteristics(tr, default_seeds(tr));
  const auto fields = rho_fields(b, tr);
  for (const auto& f : fields)
    for (int j = 0; j < f.size(); ++j) {
      if (!f.valid(j)) continue;
      EXPECT_GT(f.rho_q_factor(j), 0.0);
      if (!f.in_strip(j)) EXPECT_EQ(f.rho(j), f.r(j) - f.t);
    }
  const auto rep = verify_eikonal_bounds(fields, tr, 0.01);
  EXPECT_TRUE(rep.rho_q_positive);
  EXPECT_LT(rep.max_method_gap, 0.05);
  EXPECT_EQ(rep.max_outside_error, 0.0);
  EXPECT_TRUE(rep.rho_q_bound_holds);
  EXPECT_TRUE(rep.q_ratio_bound_holds);
  EXPECT_TRUE(std::isfinite(rep.c2_fit));
}

TEST(Eikonal, EmptyTrajectoryThrows) { EXPECT_THROW(ConeInterpolator(Trajectory{}), EikonalError); }

TEST(Pchip, ReproducesLinesAndStaysMonotone) {
  const Pchip line({0, 1, 3, 4}, {1, 3, 7, 9});
  for (double x : {0.0, 0.5, 2.2, 4.0}) EXPECT_NEAR(line(x), 1 + 2 * x, 1e-14);
  const Pchip step({0, 1, 2, 3, 4}, {0, 0, 1, 1, 1});
  double prev = -1;
  for (double x = 0; x <= 4; x += 0.01) {
    const double y = step(x);
    EXPECT_GE(y, prev - 1e-15);
    EXPECT_GE(y, -1e-15);
    EXPECT_LE(y, 1 + 1e-15);
    prev = y;
  }
}
