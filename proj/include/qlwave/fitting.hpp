// Log-log fits used by the decay and growth diagnostics.
#pragma once

#include <limits>
#include <string>
#include <vector>

namespace qlwave {

inline constexpr double kUndefinedExponent = std::numeric_limits<double>::quiet_NaN();

struct PowerLawFit {
  double constant = 0.0;
  double exponent = kUndefinedExponent;
  double residual = 0.0;  // rms of the log residuals
  int samples = 0;
  bool degenerate = false;  // all samples zero
};

/// Least squares for y = C x^p in log-log. Zero samples make the fit
/// degenerate; mixed zero/non-zero samples are skipped.
PowerLawFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Indices of `count` points of t closest to log-spaced targets in [t1, t2]
/// (spacing taken in ln(1 + t)), duplicates removed, increasing.
std::vector<int> log_spaced_indices(const std::vector<double>& t, double t1, double t2, int count);

struct GrowthFit {
  double gamma = 0.0;
  double residual = 0.0;
  int samples = 0;
  bool good_quality = true;
};

/// Fits E(t) = E(t0) (1 + t)^gamma through the first sample over the
/// window [t1, t2]. Quality is flagged when the rms log residual exceeds
/// quality_tol.
GrowthFit growth_exponent(const std::vector<double>& t, const std::vector<double>& E, double t1, double t2,
                          int count = 40, double quality_tol = 0.05);

/// a^nu b^(1 - nu) <= a + b for a, b >= 0, nu in [0, 1]; returns the left side.
double convexity_lhs(double a, double b, double nu);

}  // namespace qlwave
