#include "qlwave/vector_fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlwave {

std::string to_string(VectorFieldId z) {
  switch (z) {
    case VectorFieldId::S: return "S";
    case VectorFieldId::K: return "K";
    case VectorFieldId::Dt: return "Dt";
    case VectorFieldId::Dr: return "Dr";
  }
  return "?";
}

std::vector<FieldWord> words_up_to(int max_length) {
  std::vector<FieldWord> out{FieldWord{}};
  std::size_t begin = 0;
  for (int len = 1; len <= max_length; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i) {
      for (VectorFieldId z : kAllFields) {
        FieldWord w{z};
        w.insert(w.end(), out[i].begin(), out[i].end());
        out.push_back(std::move(w));
      }
    }
    begin = end;
  }
  return out;
}

std::vector<FieldWord> coordinate_derivatives(int k) {
  std::vector<FieldWord> out;
  for (int nt = k; nt >= 0; --nt) {
    FieldWord w(nt, VectorFieldId::Dt);
    w.insert(w.end(), k - nt, VectorFieldId::Dr);
    out.push_back(std::move(w));
  }
  return out;
}

GridField2D::GridField2D(Eigen::ArrayXXd values, double t_center, double dt, double r0, double dr)
    : values_(std::move(values)), t_center_(t_center), dt_(dt), r0_(r0), dr_(dr) {
  if (!(dt_ > 0) || !(dr_ > 0)) throw std::invalid_argument("GridField2D: dt and dr must be positive");
  if (values_.rows() % 2 == 0) throw std::invalid_argument("GridField2D: level count must be odd");
}

Eigen::ArrayXd GridField2D::radii() const {
  return Eigen::ArrayXd::LinSpaced(nr(), r0_, r0_ + (nr() - 1) * dr_);
}

GridField2D GridField2D::sample(const std::function<double(double, double)>& f, int levels, int nr,
                                double t_center, double dt, double r0, double dr) {
  Eigen::ArrayXXd v(levels, nr);
  const int c = (levels - 1) / 2;
  for (int l = 0; l < levels; ++l)
    for (int j = 0; j < nr; ++j) v(l, j) = f(t_center + (l - c) * dt, r0 + j * dr);
  return GridField2D(std::move(v), t_center, dt, r0, dr);
}

namespace {

void check_size(const GridField2D& f) {
  if (f.levels() < 3 || f.nr() < 8) throw std::invalid_argument("grid too small for centred stencils");
}

}  // namespace

GridField2D partial_t(const GridField2D& f) {
  check_size(f);
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(f.levels(), f.nr(), kInvalid);
  const double inv = 0.5 / f.dt();
  for (int l = 1; l + 1 < f.levels(); ++l)
    for (int j = 1; j + 1 < f.nr(); ++j) out(l, j) = (f(l + 1, j) - f(l - 1, j)) * inv;
  return f.with_values(std::move(out));
}

GridField2D partial_r(const GridField2D& f) {
  check_size(f);
  Eigen::ArrayXXd out = Eigen::ArrayXXd::Constant(f.levels(), f.nr(), kInvalid);
  const double inv = 0.5 / f.dr();
  for (int l = 1; l + 1 < f.levels(); ++l)
    for (int j = 1; j + 1 < f.nr(); ++j) out(l, j) = (f(l, j + 1) - f(l, j - 1)) * inv;
  return f.with_values(std::move(out));
}

GridField2D apply_field(const GridField2D& f, VectorFieldId z) {
  switch (z) {
    case VectorFieldId::Dt: return partial_t(f);
    case VectorFieldId::Dr: return partial_r(f);
    default: break;
  }
  const GridField2D ft = partial_t(f);
  const GridField2D fr = partial_r(f);
  Eigen::ArrayXXd out(f.levels(), f.nr());
  for (int l = 0; l < f.levels(); ++l) {
    const double t = f.t(l);
    for (int j = 0; j < f.nr(); ++j) {
      const double r = f.r(j);
      out(l, j) = z == VectorFieldId::S ? t * ft(l, j) + r * fr(l, j) : r * ft(l, j) + t * fr(l, j);
    }
  }
  return f.with_values(std::move(out));
}

GridField2D apply_word(const GridField2D& f, const FieldWord& word) {
  GridField2D g = f;
  for (auto it = word.rbegin(); it != word.rend(); ++it) g = apply_field(g, *it);
  return g;
}

GridField2D apply_multi(const WindowSupplier& supplier, const FieldWord& word) {
  const int need = levels_for(static_cast<int>(word.size()));
  GridField2D f = supplier(need);
  if (f.levels() < need) throw std::invalid_argument("apply_multi: insufficient time window");
  return apply_word(f, word);
}

std::vector<GridField2D> apply_all_words(const GridField2D& f, int max_length) {
  const auto words = words_up_to(max_length);
  std::vector<GridField2D> out;
  out.reserve(words.size());
  out.push_back(f);
  // words_up_to builds each word as z + (an earlier word); replay that order.
  std::size_t begin = 0;
  for (int len = 1; len <= max_length; ++len) {
    const std::size_t end = out.size();
    for (std::size_t i = begin; i < end; ++i)
      for (VectorFieldId z : kAllFields) out.push_back(apply_field(out[i], z));
    begin = end;
  }
  return out;
}

CommutatorTable commutator_table() {
  CommutatorTable c;
  c.c_box = {2.0, 0.0, 0.0, 0.0};
  // Rows: d_t, d_r. [S, d_a] = -d_a; [K, d_t] = -d_r; [K, d_r] = -d_t.
  c.first_order[0] = -Eigen::Matrix2d::Identity();
  c.first_order[1] << 0.0, -1.0, -1.0, 0.0;
  c.first_order[2] = Eigen::Matrix2d::Zero();
  c.first_order[3] = Eigen::Matrix2d::Zero();
  return c;
}

namespace {

// Coefficients (alpha, beta) of Z = alpha d_t + beta d_r and their
// derivatives: d_t alpha, d_r alpha, d_t beta, d_r beta.
struct FieldCoefficients {
  double a, b, at, ar, bt, br;
};

FieldCoefficients coefficients(VectorFieldId z, double t, double r) {
  switch (z) {
    case VectorFieldId::S: return {t, r, 1, 0, 0, 1};
    case VectorFieldId::K: return {r, t, 0, 1, 1, 0};
    case VectorFieldId::Dt: return {1, 0, 0, 0, 0, 0};
    case VectorFieldId::Dr: return {0, 1, 0, 0, 0, 0};
  }
  return {0, 0, 0, 0, 0, 0};
}

}  // namespace

double apply_word_exact(const Jet2& j, const FieldWord& word, double t, double r) {
  if (word.empty()) return j.f;
  if (word.size() == 1) {
    const auto c = coefficients(word[0], t, r);
    return c.a * j.ft + c.b * j.fr;
  }
  if (word.size() != 2) throw std::invalid_argument("apply_word_exact: words longer than 2 unsupported");
  const auto o = coefficients(word[0], t, r);
  const auto i = coefficients(word[1], t, r);
  // inner = i.a f_t + i.b f_r
  const double inner_t = i.at * j.ft + i.a * j.ftt + i.bt * j.fr + i.b * j.ftr;
  const double inner_r = i.ar * j.ft + i.a * j.ftr + i.br * j.fr + i.b * j.frr;
  return o.a * inner_t + o.b * inner_r;
}

std::vector<PointwiseBound> tangential_bounds(const GridField2D& w) {
  if (w.levels() < 5) throw std::invalid_argument("tangential_bounds: need at least 5 levels");
  const int c = w.center();
  const GridField2D ft = partial_t(w), fr = partial_r(w);
  const GridField2D ftt = partial_t(ft), ftr = partial_r(ft), frr = partial_r(fr);
  const auto words = words_up_to(2);
  const auto zs = apply_all_words(w, 2);

  std::vector<PointwiseBound> out{{"tanZ"}, {"derZ"}, {"derframeZ"}};
  std::array<double, 3> rhs_max{0, 0, 0};
  std::array<Eigen::ArrayXd, 3> lhs, rhs;
  for (auto& a : lhs) a = Eigen::ArrayXd::Constant(w.nr(), kInvalid);
  for (auto& a : rhs) a = Eigen::ArrayXd::Constant(w.nr(), kInvalid);
  const double t = w.t(c);
  for (int j = 0; j < w.nr(); ++j) {
    const double r = w.r(j);
    double z1 = 0, z2 = 0;
    bool ok = true;
    for (std::size_t k = 0; k < words.size(); ++k) {
      const double v = zs[k](c, j);
      if (!std::isfinite(v)) { ok = false; break; }
      if (words[k].size() == 1) z1 += std::abs(v);
      z2 += std::abs(v);
    }
    const double dt = ft(c, j), dr = fr(c, j);
    const double h = std::sqrt(ftt(c, j) * ftt(c, j) + 2 * ftr(c, j) * ftr(c, j) + frr(c, j) * frr(c, j));
    if (!ok || !std::isfinite(h)) continue;
    const double grad = std::sqrt(dt * dt + dr * dr);
    const double dl = std::abs(dt + dr);
    const double dq = 0.5 * std::abs(dr - dt);
    lhs[0](j) = (1 + t + r) * dl + (1 + std::abs(t - r)) * grad;
    rhs[0](j) = z1;
    lhs[1](j) = (1 + t + r) * grad;
    rhs[1](j) = r * dq + z1;
    lhs[2](j) = std::pow(1 + std::abs(t - r), 2) * h;
    rhs[2](j) = z2;
    for (int m = 0; m < 3; ++m) rhs_max[m] = std::max(rhs_max[m], rhs[m](j));
  }
  for (int m = 0; m < 3; ++m) {
    // Ratios where the right side is at roundoff level carry no information.
    const double floor = 1e-9 * rhs_max[m];
    for (int j = 0; j < w.nr(); ++j) {
      if (!std::isfinite(lhs[m](j))) continue;
      ++out[m].points;
      if (rhs[m](j) <= floor) continue;
      const double ratio = lhs[m](j) / rhs[m](j);
      if (ratio > out[m].constant) {
        out[m].constant = ratio;
        out[m].lhs = lhs[m](j);
        out[m].rhs = rhs[m](j);
        out[m].r_at = w.r(j);
      }
    }
  }
  if (out[0].points == 0) throw std::invalid_argument("tangential_bounds: empty valid region");
  return out;
}

}  // namespace qlwave
