#include "qlwave/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qlwave {

PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  PowerLawFit fit;
  std::vector<double> lx, ly;
  bool all_zero = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (y[i] != 0.0) all_zero = false;
    if (x[i] > 0 && y[i] > 0 && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  if (all_zero) {
    fit.degenerate = true;
    fit.samples = static_cast<int>(x.size());
    return fit;
  }
  const int n = static_cast<int>(lx.size());
  fit.samples = n;
  if (n < 2) throw std::invalid_argument("fit_power_law: fewer than two positive samples");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_power_law: abscissae coincide");
  fit.exponent = sxy / sxx;
  const double b = my - fit.exponent * mx;
  fit.constant = std::exp(b);
  double ss = 0;
  for (int i = 0; i < n; ++i) {
    const double e = ly[i] - (b + fit.exponent * lx[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

std::vector<int> log_spaced_indices(const std::vector<double>& t, double t1, double t2, int count) {
  std::vector<int> out;
  if (t.empty() || count < 1) return out;
  const double a = std::log1p(t1), b = std::log1p(t2);
  for (int k = 0; k < count; ++k) {
    const double target = std::expm1(count == 1 ? a : a + (b - a) * k / (count - 1));
    int best = -1;
    for (int i = 0; i < static_cast<int>(t.size()); ++i) {
      if (t[i] < t1 - 1e-9 || t[i] > t2 + 1e-9) continue;
      if (best < 0 || std::abs(t[i] - target) < std::abs(t[best] - target)) best = i;
    }
    if (best >= 0 && (out.empty() || out.back() != best)) out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GrowthFit growth_exponent(const std::vector<double>& t, const std::vector<double>& E, double t1, double t2,
                          int count, double quality_tol) {
  if (t.size() != E.size() || t.empty()) throw std::invalid_argument("growth_exponent: bad series");
  for (double e : E)
    if (!(e > 0)) throw std::invalid_argument("growth_exponent: energies must be positive");
  const auto idx = log_spaced_indices(t, t1, t2, count);
  if (idx.size() < 10) throw std::invalid_argument("growth_exponent: fewer than 10 samples in the window");
  const double t0 = t.front(), e0 = E.front();
  double sxx = 0, sxy = 0;
  for (int i : idx) {
    const double x = std::log1p(t[i]) - std::log1p(t0);
    const double y = std::log(E[i] / e0);
    sxx += x * x;
    sxy += x * y;
  }
  GrowthFit g;
  g.samples = static_cast<int>(idx.size());
  g.gamma = sxx > 0 ? sxy / sxx : 0.0;
  double ss = 0;
  for (int i : idx) {
    const double x = std::log1p(t[i]) - std::log1p(t0);
    const double e = std::log(E[i] / e0) - g.gamma * x;
    ss += e * e;
  }
  g.residual = std::sqrt(ss / g.samples);
  g.good_quality = g.residual <= quality_tol;
  return g;
}

double convexity_lhs(double a, double b, double nu) {
  if (a < 0 || b < 0 || nu < 0 || nu > 1) throw std::invalid_argument("convexity_lhs: out of range");
  if (nu == 0) return b;
  if (nu == 1) return a;
  return std::pow(a, nu) * std::pow(b, 1.0 - nu);
}

}  // namespace qlwave
