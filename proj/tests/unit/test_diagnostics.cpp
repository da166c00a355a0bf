#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qlwave/diagnostics.hpp"

using namespace qlwave;

namespace {

double bump(double r) { return std::abs(r) < 1 ? std::pow(1 - r * r, 4) : 0.0; }

const Trajectory& linear_run() {
  static const Trajectory tr = [] {
    Scenario s;
    s.c1 = 0.0;
    s.epsilon = 0.01;
    s.dr = 0.04;
    s.t_end = 60;
    s.output_every = 0.5;
    return run(s);
  }();
  return tr;
}

const std::vector<EikonalFields>& linear_fields() {
  static const auto f = [] {
    const auto& tr = linear_run();
    return rho_fields(trace_characteristics(tr, default_seeds(tr)), tr);
  }();
  return f;
}

Trajectory forced_run(double amplitude, double t_center, double dr = 0.04) {
  Scenario s;
  s.equation = EquationKind::Forced;
  s.epsilon = 1.0;
  s.data.phi0_scale = 0.0;
  s.forcing.amplitude = amplitude;
  s.forcing.t_center = t_center;
  s.dr = dr;
  s.t_end = 12;
  s.output_every = 0.5;
  return run(s);
}

RadialSnapshot bump_snapshot(double dr, double width = 1.0) {
  RadialSnapshot s;
  s.dr = dr;
  const int n = static_cast<int>(3 / dr);
  s.phi.resize(n);
  s.phi_t = Eigen::ArrayXd::Zero(n);
  s.phi_r.resize(n);
  for (int j = 0; j < n; ++j) {
    const double r = j * dr / width;
    s.phi(j) = bump(r);
    s.phi_r(j) = r < 1 ? -8 * r * std::pow(1 - r * r, 3) / width : 0.0;
  }
  return s;
}

}  // namespace

TEST(Weight, TrivialCases) {
  const Eigen::ArrayXd phi = Eigen::ArrayXd::LinSpaced(50, 0.1, 1.0);
  const Eigen::ArrayXd rho = Eigen::ArrayXd::LinSpaced(50, -10, 0.9);
  WeightParams p;
  p.kappa = 0;
  EXPECT_EQ((weight_field(5.0, phi, rho, p).w - 1).abs().maxCoeff(), 0.0);
  p.kappa = 3;
  EXPECT_EQ((weight_field(0.0, phi, rho, p).w - 1).abs().maxCoeff(), 0.0);
}

TEST(Weight, DisplayedValue) {
  WeightParams p;
  p.kappa = 10;
  p.epsilon = 0.01;
  p.nu_prime = 0.5;
  const auto w = weight_field(std::exp(1.0) - 1, Eigen::ArrayXd::Ones(1), Eigen::ArrayXd::Zero(1), p);
  EXPECT_NEAR(w.w(0), std::exp(0.1 * std::pow(2.0, -0.5)), 1e-14);
  EXPECT_NEAR(w.w(0), 1.0733, 1e-4);
}

TEST(Weight, MonotoneAndAboveOne) {
  WeightParams p;
  p.kappa = 50;
  const Eigen::ArrayXd rho = Eigen::ArrayXd::LinSpaced(400, -50, 1.0);
  const auto w = weight_field(100.0, Eigen::ArrayXd::Ones(400), rho, p);
  for (int j = 0; j < 400; ++j) {
    EXPECT_GE(w.w(j), 1.0);
    if (j > 0) EXPECT_GE(w.w(j), w.w(j - 1));
  }
}

TEST(Weight, RhoAboveOneOnSupportThrows) {
  WeightParams p;
  Eigen::ArrayXd phi = Eigen::ArrayXd::Ones(3), rho(3);
  rho << 0.0, 0.5, 1.5;
  EXPECT_THROW(weight_field(1.0, phi, rho, p), std::domain_error);
  phi(2) = 0.0;
  EXPECT_NO_THROW(weight_field(1.0, phi, rho, p));
}

TEST(Energy, RadialIntegralOfOne) {
  const double dr = 0.01;
  const int n = 201;
  const double v = radial_integral(Eigen::ArrayXd::Ones(n), 0.0, dr);
  EXPECT_NEAR(v, 4 * M_PI / 3 * 8, 1e-3);
  Eigen::ArrayXd f = Eigen::ArrayXd::Ones(n);
  f(5) = NAN;
  EXPECT_TRUE(std::isfinite(radial_integral(f, 0.0, dr)));
}

TEST(Energy, GaussianGradientOracle) {
  // phi_r = exp(-r^2): 4 pi int r^2 exp(-2 r^2) dr = 4 pi sqrt(pi) / (4 2^{3/2}).
  RadialSnapshot s;
  s.dr = 0.005;
  const int n = 2000;
  s.phi = Eigen::ArrayXd::Zero(n);
  s.phi_t = Eigen::ArrayXd::Zero(n);
  s.phi_r.resize(n);
  for (int j = 0; j < n; ++j) s.phi_r(j) = std::exp(-std::pow(j * s.dr, 2));
  const double oracle = M_PI * std::sqrt(M_PI) / std::pow(2.0, 1.5);
  EXPECT_NEAR(basic_energy(s, WeightField::unit(0, n)), oracle, 1e-6 * oracle);
  s.phi_r = Eigen::ArrayXd::Zero(n);
  EXPECT_EQ(basic_energy(s, WeightField::unit(0, n)), 0.0);
}

TEST(Energy, LinearRunConserved) {
  // Snapshot derivatives carry an O(dr^2) offset that settles once the
  // pulse leaves the origin.
  double dev[2];
  for (int k = 0; k < 2; ++k) {
    Scenario s;
    s.c1 = 0.0;
    s.dr = 0.02 / (1 << k);
    s.t_end = 30;
    s.output_every = 1.0;
    const auto tr = run(s);
    const double e0 = basic_energy(tr.snapshots.front(), WeightField::unit(0, 0));
    dev[k] = 0;
    for (const auto& snap : tr.snapshots)
      dev[k] = std::max(dev[k], std::abs(basic_energy(snap, WeightField::unit(snap.t, 0)) / e0 - 1));
  }
  EXPECT_LT(dev[1], 1e-3);
  EXPECT_GE(std::log2(dev[0] / dev[1]), 1.9);
}

TEST(Energy, IndexSetInclusion) {
  Scenario s;
  s.epsilon = 0.05;
  s.t_end = 4;
  s.output_every = 1;
  const auto tr = run(s);
  const RadialSolver solver(s);
  for (const auto& snap : tr.snapshots) {
    const auto win = solver.window(snap, levels_for(3));
    const auto w = WeightField::unit(snap.t, 0);
    const double e00 = energy(win, w, 0, 0), e01 = energy(win, w, 0, 1), e02 = energy(win, w, 0, 2);
    const double e10 = energy(win, w, 1, 0), e11 = energy(win, w, 1, 1);
    EXPECT_GE(e00, 0.0);
    EXPECT_GE(e01, e00);
    EXPECT_GE(e02, e01);
    EXPECT_GE(e10, e00);
    EXPECT_GE(e11, e10);
    EXPECT_GE(e11, e01);
    EXPECT_NEAR(e00, basic_energy(snap, w), 0.02 * e00 + 1e-12);
  }
  EXPECT_THROW(energy(solver.window(tr.snapshots[1], 3), WeightField::unit(0, 0), 1, 1), std::invalid_argument);
}

TEST(Inequalities, EnergyOnLinearRun) {
  EnergyCheckParams p;
  p.weight.kappa = 0;
  const auto rep = energy_inequality_check(linear_run(), linear_fields(), p);
  EXPECT_TRUE(rep.holds());
  EXPECT_GE(rep.min_margin(), 0.0);
  EXPECT_EQ(rep.t.size(), linear_run().snapshots.size());
}

TEST(Inequalities, PoincareStaticBump) {
  const auto& f0 = linear_fields().front();
  auto snap = bump_snapshot(linear_run().scenario.dr);
  snap.phi.conservativeResize(f0.size());
  snap.phi_t = Eigen::ArrayXd::Zero(f0.size());
  snap.phi_r.conservativeResize(f0.size());
  for (int j = static_cast<int>(3 / snap.dr); j < f0.size(); ++j) snap.phi(j) = snap.phi_r(j) = 0;
  const auto [lhs, base] = poincare_terms(snap, f0, WeightField::unit(0, 0));
  EXPECT_GT(lhs, 0);
  EXPECT_LE(lhs, kPoincareConstant * base);

  snap.phi.setZero();
  snap.phi_r.setZero();
  const auto [z1, z2] = poincare_terms(snap, f0, WeightField::unit(0, 0));
  EXPECT_EQ(z1, 0.0);
  EXPECT_EQ(z2, 0.0);

  auto bad = snap;
  bad.phi.conservativeResize(10);
  EXPECT_THROW(poincare_terms(bad, f0, WeightField::unit(0, 0)), std::invalid_argument);
}

TEST(Inequalities, PoincareOnLinearRun) {
  WeightParams p;
  const auto rep = poincare_check(linear_run(), linear_fields(), p, 0.0);
  EXPECT_TRUE(rep.holds());
  EXPECT_EQ(rep.paper_constant, 32.0);
}

TEST(Inequalities, KlainermanSobolevZeroAndRefinement) {
  const auto zero = GridField2D::sample([](double, double) { return 0.0; }, 5, 50, 0.0, 0.05, 0.0, 0.05);
  const auto [l0, b0] = klainerman_sobolev_terms(zero);
  EXPECT_EQ(l0, 0.0);
  EXPECT_EQ(b0, 0.0);

  double c[2];
  for (int k = 0; k < 2; ++k) {
    const double h = 0.02 / (1 << k);
    const auto w = GridField2D::sample([](double, double r) { return bump(r); }, 5, static_cast<int>(3 / h), 0.0, h, 0.0, h);
    const auto [l, b] = klainerman_sobolev_terms(w);
    c[k] = l / b;
    EXPECT_TRUE(std::isfinite(c[k]));
  }
  EXPECT_NEAR(c[1] / c[0], 1.0, 0.1);
}

TEST(Inequalities, BoostAndScalingNormsScaleWithTheMeasure) {
  // phi_lambda(t, r) = phi(t / lambda, r / lambda): S and K commute with the
  // rescaling, so words in S, K keep their values and the L2 norm picks up
  // lambda^{3/2}. The Klainerman-Sobolev sides do not share this scaling.
  auto f = [](double t, double r) { return std::exp(-(r - t) * (r - t)) * (1 + 0.1 * t); };
  const double h = 0.01, lambda = 2.0;
  const int n = 600;
  const auto a = GridField2D::sample(f, 5, n, 0.5, h, 0.0, h);
  const auto b = GridField2D::sample([&](double t, double r) { return f(t / lambda, r / lambda); }, 5, n, 0.5 * lambda,
                                     h * lambda, 0.0, h * lambda);
  const std::vector<FieldWord> words{{},
                                {VectorFieldId::S},
                                {VectorFieldId::K},
                                {VectorFieldId::S, VectorFieldId::K},
                                {VectorFieldId::K, VectorFieldId::K}};
  for (const auto& word : words) {
    const auto za = apply_word(a, word), zb = apply_word(b, word);
    Eigen::ArrayXd ra(n), rb(n);
    for (int j = 0; j < n; ++j) {
      ra(j) = std::pow(za(2, j), 2);
      rb(j) = std::pow(zb(2, j), 2);
    }
    const double na = std::sqrt(radial_integral(ra, 0.0, h)), nb = std::sqrt(radial_integral(rb, 0.0, h * lambda));
    EXPECT_NEAR(nb / na, std::pow(lambda, 1.5), 1e-9) << word.size();
  }
}

TEST(Inequalities, KlainermanSobolevOnLinearRun) {
  const auto rep = klainerman_sobolev_check(linear_run(), kKlainermanSobolevConstant, 10);
  EXPECT_TRUE(rep.holds());
  EXPECT_GT(rep.constant, 0.0);
  EXPECT_LT(rep.constant, 0.1);
}

TEST(Inequalities, HormanderZeroForcing) {
  const auto rep = hormander_check(forced_run(0.0, 2.0));
  for (std::size_t i = 0; i < rep.t.size(); ++i) {
    EXPECT_EQ(rep.lhs[i], 0.0);
    EXPECT_EQ(rep.rhs[i], 0.0);
  }
  EXPECT_EQ(rep.constant, 0.0);
}

TEST(Inequalities, HormanderBumpIsStable) {
  const auto a = hormander_check(forced_run(1.0, 2.0, 0.04));
  const auto b = hormander_check(forced_run(1.0, 2.0, 0.02));
  EXPECT_TRUE(a.holds());
  EXPECT_GT(a.constant, 0.0);
  EXPECT_NEAR(b.constant / a.constant, 1.0, 0.15);
  const auto shifted = hormander_check(forced_run(1.0, 4.0, 0.04));
  EXPECT_NEAR(shifted.constant / a.constant, 1.0, 0.10);
}

TEST(Inequalities, HormanderRejectsOtherRuns) {
  EXPECT_THROW(hormander_check(linear_run()), std::invalid_argument);
  Scenario s;
  s.equation = EquationKind::Forced;
  s.epsilon = 0.1;
  s.t_end = 4;
  const auto with_data = run(s);
  EXPECT_THROW(hormander_check(with_data), std::invalid_argument);
  const auto cor = hormander_corollary_check(with_data);
  EXPECT_TRUE(cor.holds());
}

TEST(Inequalities, TangentialOnLinearRun) {
  const auto reps = tangential_check(linear_run(), 20);
  ASSERT_EQ(reps.size(), 3u);
  for (const auto& r : reps) {
    EXPECT_TRUE(r.holds()) << r.id;
    EXPECT_TRUE(std::isfinite(r.constant)) << r.id;
  }
}

TEST(Decay, LinearRunNearConeDecay) {
  DecayFitParams p;
  p.t1 = 6;
  const auto rep = decay_fit(linear_run(), linear_fields(), DecayQuantity::DPhi, p);
  EXPECT_GE(rep.fit.exponent, -1.1);
  EXPECT_LE(rep.fit.exponent, -0.9);
  const auto plain = decay_fit(linear_run(), {}, DecayQuantity::DPhi, p);
  EXPECT_NEAR(plain.fit.exponent, rep.fit.exponent, 1e-9);
}

TEST(Decay, ZeroSolutionIsDegenerate) {
  Scenario s;
  s.equation = EquationKind::Forced;
  s.data.phi0_scale = 0.0;
  s.forcing.amplitude = 0.0;
  s.t_end = 20;
  s.output_every = 0.5;
  const auto rep = decay_fit(run(s), {}, DecayQuantity::Phi);
  EXPECT_TRUE(rep.fit.degenerate);
  EXPECT_EQ(rep.fit.constant, 0.0);
  EXPECT_TRUE(std::isnan(rep.fit.exponent));
}

TEST(Decay, TooFewSamplesThrows) {
  Scenario s;
  s.c1 = 0;
  s.t_end = 5;
  s.output_every = 2.5;
  EXPECT_THROW(decay_fit(run(s), {}, DecayQuantity::Phi), std::invalid_argument);
}

TEST(Decay, QuantityNames) {
  for (auto q : {DecayQuantity::Phi, DecayQuantity::DPhi, DecayQuantity::D2Phi, DecayQuantity::ZPhi,
                 DecayQuantity::WeightedDPhi, DecayQuantity::WeightedD2Phi})
    EXPECT_EQ(decay_quantity_from_string(to_string(q)), q);
  EXPECT_THROW(decay_quantity_from_string("nope"), std::invalid_argument);
}

TEST(Gronwall, ConstantBoundWithoutGrowth) {
  for (double t : {0.0, 1.0, 100.0}) EXPECT_EQ(gronwall_oracle(2.0, 3.0, 0.0, 0.01, t), 11.0);
  EXPECT_EQ(gronwall_oracle(0.0, 0.0, 5.0, 0.1, 50.0), 0.0);
  EXPECT_THROW(gronwall_oracle(1.0, -1.0, 1.0, 0.1, 1.0), std::invalid_argument);
}

TEST(Gronwall, PowerLawSatisfiesHypothesisStrictly) {
  std::vector<double> t;
  for (int i = 0; i <= 2000; ++i) t.push_back(0.05 * i);
  for (double Beps : {0.01, 0.1, 0.5}) {
    std::vector<double> E;
    for (double x : t) E.push_back(1.5 * std::pow(1 + x, Beps));
    const auto h = check_gronwall_hypothesis(t, E, 0.0, Beps, 1.0);
    EXPECT_TRUE(h.holds);
    EXPECT_GT(h.min_margin, 0.0);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LT(E[i], gronwall_oracle(E[0], 0.0, Beps, 1.0, t[i]));
  }
}

TEST(Gronwall, ViolatingSeriesIsRejected) {
  std::vector<double> t, E;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(0.1 * i);
    E.push_back(std::exp(t.back()));
  }
  EXPECT_FALSE(check_gronwall_hypothesis(t, E, 0.0, 1.0, 0.01).holds);
  std::vector<double> z(t.size(), 0.0);
  z.back() = 1e-3;
  EXPECT_FALSE(check_gronwall_hypothesis(t, z, 0.0, 1.0, 0.01).holds);
}

TEST(Gronwall, SaturatedHypothesisStaysBelowTheBound) {
  // Solve E = 4 E0 + int B eps / (1 + tau) (E + A (1 + tau)^{B eps}) with
  // RK4, then scale down: the admissible extreme case.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  int cases = 0;
  for (int n = 0; n < 1000; ++n) {
    const double A = 5 * u(rng), B = 20 * u(rng), eps = 0.1 * u(rng), E0 = u(rng) + 1e-3;
    const double be = B * eps;
    auto rhs = [&](double tau, double e) { return be / (1 + tau) * (e + A * std::pow(1 + tau, be)); };
    double e = 4 * E0, tau = 0;
    const double h = 0.05;
    for (int k = 0; k < 200; ++k) {
      const double k1 = rhs(tau, e), k2 = rhs(tau + h / 2, e + h / 2 * k1), k3 = rhs(tau + h / 2, e + h / 2 * k2),
                   k4 = rhs(tau + h, e + h * k3);
      e += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
      tau += h;
      ASSERT_LE(e, gronwall_oracle(E0, A, B, eps, tau) * (1 + 1e-9));
      ++cases;
    }
  }
  EXPECT_GE(cases, 1000);
}
