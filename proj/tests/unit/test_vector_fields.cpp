#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qlwave/nullframe.hpp"
#include "qlwave/vector_fields.hpp"

using namespace qlwave;

namespace {

GridField2D sample(const std::function<double(double, double)>& f, int levels, double h, double t = 3.0) {
  return GridField2D::sample(f, levels, 40, t, h, 1.0, h);
}

double max_interior_error(const GridField2D& g, const std::function<double(double, double)>& exact) {
  double e = 0;
  const int c = g.center();
  for (int j = 0; j < g.nr(); ++j)
    if (std::isfinite(g(c, j))) e = std::max(e, std::abs(g(c, j) - exact(g.t(c), g.r(j))));
  return e;
}

double smooth(double t, double r) { return std::sin(t + 0.5 * r) * std::exp(-0.1 * r); }

}  // namespace

TEST(VectorFields, ScalingOfRadius) {
  const auto g = apply_field(sample([](double, double r) { return r; }, 3, 0.05), VectorFieldId::S);
  EXPECT_LT(max_interior_error(g, [](double, double r) { return r; }), 1e-12);
}

TEST(VectorFields, BoostAnnihilatesInterval) {
  const auto g = apply_field(sample([](double t, double r) { return t * t - r * r; }, 3, 0.05), VectorFieldId::K);
  EXPECT_LT(max_interior_error(g, [](double, double) { return 0.0; }), 1e-10);
}

TEST(VectorFields, ConstantMapsToZero) {
  const auto f = sample([](double, double) { return 2.5; }, 3, 0.1);
  for (auto z : kAllFields) EXPECT_LT(max_interior_error(apply_field(f, z), [](double, double) { return 0.0; }), 1e-12);
}

TEST(VectorFields, BoundaryRingIsInvalid) {
  const auto g = apply_field(sample(smooth, 3, 0.1), VectorFieldId::Dr);
  EXPECT_TRUE(std::isnan(g(1, 0)));
  EXPECT_TRUE(std::isnan(g(1, g.nr() - 1)));
  EXPECT_TRUE(std::isnan(g(0, 5)));
  EXPECT_TRUE(std::isfinite(g(1, 5)));
}

TEST(VectorFields, TooSmallGridThrows) {
  const auto f = GridField2D::sample(smooth, 1, 40, 0.0, 0.1, 0.0, 0.1);
  EXPECT_THROW(partial_t(f), std::invalid_argument);
}

TEST(VectorFields, EmptyWordIsIdentity) {
  const auto f = sample(smooth, 3, 0.1);
  const auto g = apply_word(f, {});
  EXPECT_EQ((g.values() - f.values()).abs().maxCoeff(), 0.0);
}

TEST(VectorFields, SecondRadialDerivativeOfCube) {
  const auto f = sample([](double, double r) { return r * r * r; }, 5, 0.05);
  const auto g = apply_multi([&](int levels) { return sample([](double, double r) { return r * r * r; }, levels, 0.05); },
                             {VectorFieldId::Dr, VectorFieldId::Dr});
  EXPECT_LT(max_interior_error(g, [](double, double r) { return 6 * r; }), 1e-8);
  EXPECT_THROW(apply_multi([&](int) { return sample(smooth, 3, 0.05); }, {VectorFieldId::Dr, VectorFieldId::Dr}),
               std::invalid_argument);
  (void)f;
}

TEST(VectorFields, ScalingTimeCommutator) {
  // [S, d_t] f = -d_t f, exact for f = t r on second-order stencils.
  auto f = [](double t, double r) { return t * r; };
  const auto w = sample(f, 5, 0.05);
  const auto a = apply_word(w, {VectorFieldId::S, VectorFieldId::Dt});
  const auto b = apply_word(w, {VectorFieldId::Dt, VectorFieldId::S});
  const auto dt = apply_field(w, VectorFieldId::Dt);
  const int c = w.center();
  for (int j = 2; j < w.nr() - 2; ++j) EXPECT_NEAR(a(c, j) - b(c, j), -dt(c, j), 1e-10);
}

TEST(VectorFields, SecondOrderConvergence) {
  auto exact_s = [](double t, double r) {
    const double ft = std::cos(t + 0.5 * r) * std::exp(-0.1 * r);
    const double fr = 0.5 * ft - 0.1 * smooth(t, r);
    return t * ft + r * fr;
  };
  double e[2];
  for (int k = 0; k < 2; ++k) {
    const double h = 0.1 / (1 << k);
    e[k] = max_interior_error(apply_field(sample(smooth, 3, h), VectorFieldId::S), exact_s);
  }
  EXPECT_GE(std::log2(e[0] / e[1]), 1.8);
}

TEST(VectorFields, CommutatorResidualConverges) {
  double e[2];
  for (int k = 0; k < 2; ++k) {
    const double h = 0.1 / (1 << k);
    const auto w = sample(smooth, 5, h);
    const auto a = apply_word(w, {VectorFieldId::S, VectorFieldId::Dt});
    const auto b = apply_word(w, {VectorFieldId::Dt, VectorFieldId::S});
    const auto dt = apply_field(w, VectorFieldId::Dt);
    double m = 0;
    for (int j = 0; j < w.nr(); ++j) {
      const double v = a(w.center(), j) - b(w.center(), j) + dt(w.center(), j);
      if (std::isfinite(v)) m = std::max(m, std::abs(v));
    }
    e[k] = m;
  }
  EXPECT_GE(std::log2(e[0] / e[1]), 1.8);
}

TEST(VectorFields, LeibnizRule) {
  auto f = [](double t, double r) { return std::sin(t) + r; };
  auto g = [](double t, double r) { return std::cos(0.3 * r) * t; };
  const double h = 0.01;
  const auto F = sample(f, 3, h), G = sample(g, 3, h);
  const auto FG = sample([&](double t, double r) { return f(t, r) * g(t, r); }, 3, h);
  for (auto z : kAllFields) {
    const auto zfg = apply_field(FG, z), zf = apply_field(F, z), zg = apply_field(G, z);
    for (int j = 1; j < F.nr() - 1; ++j)
      EXPECT_NEAR(zfg(1, j), F(1, j) * zg(1, j) + G(1, j) * zf(1, j), 1e-3);
  }
}

TEST(VectorFields, CommutatorTable) {
  const auto c = commutator_table();
  EXPECT_EQ(c.box_constant(VectorFieldId::S), 2.0);
  EXPECT_EQ(c.box_constant(VectorFieldId::K), 0.0);
  EXPECT_EQ(c.box_constant(VectorFieldId::Dt), 0.0);
  EXPECT_EQ(c.box_constant(VectorFieldId::Dr), 0.0);
}

TEST(VectorFields, WordsAndDerivativeLists) {
  EXPECT_EQ(words_up_to(0).size(), 1u);
  EXPECT_EQ(words_up_to(2).size(), 1u + 4u + 16u);
  EXPECT_EQ(words_up_to(3).size(), 85u);
  EXPECT_EQ(coordinate_derivatives(2).size(), 3u);
  const auto f = sample(smooth, 7, 0.05);
  const auto all = apply_all_words(f, 3);
  const auto words = words_up_to(3);
  ASSERT_EQ(all.size(), words.size());
  const auto direct = apply_word(f, words[40]);
  const int c = f.center();
  for (int j = 3; j < f.nr() - 3; ++j) EXPECT_DOUBLE_EQ(all[40](c, j), direct(c, j));
}

TEST(VectorFields, ExactWordsMatchStencils) {
  auto f = [](double t, double r) { return std::exp(-0.2 * (t - r) * (t - r)) * (1 + 0.1 * t * r); };
  const double t = 2.0, r = 1.7, d = 1e-4;
  Jet2 jet;
  jet.f = f(t, r);
  jet.ft = (f(t + d, r) - f(t - d, r)) / (2 * d);
  jet.fr = (f(t, r + d) - f(t, r - d)) / (2 * d);
  jet.ftt = (f(t + d, r) - 2 * f(t, r) + f(t - d, r)) / (d * d);
  jet.frr = (f(t, r + d) - 2 * f(t, r) + f(t, r - d)) / (d * d);
  jet.ftr = (f(t + d, r + d) - f(t + d, r - d) - f(t - d, r + d) + f(t - d, r - d)) / (4 * d * d);
  const auto w = GridField2D::sample(f, 5, 9, t, 1e-3, r - 4e-3, 1e-3);
  for (const auto& word : words_up_to(2)) {
    const auto g = apply_word(w, word);
    EXPECT_NEAR(apply_word_exact(jet, word, t, r), g(w.center(), 4), 1e-4) << word.size();
  }
}

TEST(VectorFields, BoostIsContractedLorentzBoost) {
  // K phi = omega^i Omega_{0i} phi for radial phi at random 3D points.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  auto phi = [](double t, double r) { return std::sin(t - r) / (1 + r * r); };
  for (int n = 0; n < 10; ++n) {
    const Eigen::Vector3d x(u(rng), u(rng), u(rng));
    const double t = std::abs(u(rng)) + 0.5, r = x.norm(), d = 1e-5;
    auto phi3 = [&](double tt, const Eigen::Vector3d& y) { return phi(tt, y.norm()); };
    const double pt = (phi3(t + d, x) - phi3(t - d, x)) / (2 * d);
    double boost = 0;
    for (int i = 0; i < 3; ++i) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(i) = d;
      const double pi = (phi3(t, x + e) - phi3(t, x - e)) / (2 * d);
      boost += x(i) / r * (x(i) * pt + t * pi);  // Omega_{0i} = x_i d_t + t d_i
    }
    const double ft = (phi(t + d, r) - phi(t - d, r)) / (2 * d), fr = (phi(t, r + d) - phi(t, r - d)) / (2 * d);
    EXPECT_NEAR(boost, r * ft + t * fr, 1e-7);
  }
}

TEST(VectorFields, TangentialBounds) {
  auto bumpq = [](double t, double r) {
    const double q = t - r;
    return std::abs(q) < 1 ? q * std::pow(1 - q * q, 4) : 0.0;
  };
  double tan[2];
  for (int k = 0; k < 2; ++k) {
    const double h = 0.04 / (1 << k);
    const auto w = GridField2D::sample(bumpq, 5, static_cast<int>(8 / h), 6.0, h, 2.0, h);
    const auto b = tangential_bounds(w);
    ASSERT_EQ(b.size(), 3u);
    tan[k] = b[0].constant;
    EXPECT_TRUE(std::isfinite(b[0].constant));
  }
  EXPECT_NEAR(tan[1] / tan[0], 1.0, 0.1);

  const auto zero = GridField2D::sample([](double, double) { return 0.0; }, 5, 20, 1.0, 0.1, 0.0, 0.1);
  for (const auto& b : tangential_bounds(zero)) EXPECT_EQ(b.constant, 0.0);

  const auto tiny = GridField2D::sample(smooth, 5, 3, 1.0, 0.1, 0.0, 0.1);
  EXPECT_THROW(tangential_bounds(tiny), std::exception);
}
