// Radial characteristics of L2 = 2 d_p + (H_LL / 2) d_q, the eikonal
// function rho built from them, and the bounds of Section 5 measured on
// solver output.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

#include "qlwave/fitting.hpp"
#include "qlwave/radial_solver.hpp"

namespace qlwave {

class EikonalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EikonalParams {
  double spacing = 0.0;       // label spacing on [dense_min, dense_max]; 0 selects dr / 2
  double fine_spacing = 0.0;  // spacing on [-1, 1]; 0 selects spacing / 2
  double dense_min = -5.0;
  double dense_max = 3.0;
  double growth = 0.01;        // relative label spacing below dense_min
  double step_fraction = 0.45; // RK4 step in t as a fraction of dr
};

/// H_LL and d_q H_LL between snapshots. Each snapshot is sampled at fixed
/// q = r - t and the two neighbouring times are blended linearly, so a pulse
/// travelling along the cone is not smeared between output times.
class ConeInterpolator {
 public:
  explicit ConeInterpolator(const Trajectory& traj);

  double t_first() const { return times_.front(); }
  double t_last() const { return times_.back(); }
  /// Returns {H_LL, d_q H_LL} at (t, r = t + q).
  std::pair<double, double> at(double t, double q) const;

 private:
  std::pair<double, double> sample(int k, double r) const;

  std::vector<double> times_;
  std::vector<Eigen::ArrayXd> H_, Hq_;
  double r0_ = 0.0, dr_ = 1.0;
};

/// Labels spaced `spacing` on [dense_min, dense_max] (finer on [-1, 1]) and
/// geometrically below dense_min down to -(t_end / 2 + 1).
std::vector<double> default_seeds(const Trajectory& traj, const EikonalParams& params = {});

struct CharacteristicCurve {
  double label = 0.0;
  double t_entry = 0.0;
  int first_snapshot = 0;  // samples below start at this snapshot index
  std::vector<double> t, s, r, q, G;  // G = ln rho_q
  bool truncated = false;   // trajectory ended before the last snapshot time
  bool left_strip = false;  // |t - r| > t/2 after entry
};

struct CharacteristicBundle {
  std::vector<double> snapshot_times;
  std::vector<CharacteristicCurve> curves;  // sorted by label
};

/// Integrates dq/dt = (H_LL/2)/(1 - H_LL/4), dG/dt = -(d_q H_LL/2)/(1 - H_LL/4)
/// from t = 2|rho| with q = rho, G = 0, recording at every snapshot time.
CharacteristicBundle trace_characteristics(const Trajectory& traj, const std::vector<double>& seeds,
                                           const EikonalParams& params = {});

struct TraceBack {
  double label = 0.0;
  double G = 0.0;  // ln rho_q at the starting point
  double t_entry = 0.0;
};

/// Follows the characteristic through (t, r) backwards to |t - r| = t/2.
TraceBack trace_back(const ConeInterpolator& interp, double t, double r, double h);

struct EikonalFields {
  double t = 0.0;
  Eigen::ArrayXd r, rho, rho_q_fd, rho_q_factor, H_LL, dqH;
  Eigen::Array<bool, Eigen::Dynamic, 1> valid, in_strip;

  int size() const { return static_cast<int>(r.size()); }
  /// d_r rho at fixed t.
  double rho_r(int j) const { return in_strip(j) ? (1.0 - 0.25 * H_LL(j)) * rho_q_factor(j) : 1.0; }
  /// d_t rho at fixed r.
  double rho_t(int j) const { return in_strip(j) ? -(1.0 + 0.25 * H_LL(j)) * rho_q_factor(j) : -1.0; }
};

/// rho and rho_q on the grid of snapshot k: (a) from differences of rho in r,
/// (b) from the integrating factor carried along the curves.
EikonalFields rho_fields_at(const CharacteristicBundle& bundle, const Trajectory& traj, int k);
std::vector<EikonalFields> rho_fields(const CharacteristicBundle& bundle, const Trajectory& traj);

struct EikonalBoundsReport {
  double epsilon = 0.0;
  double nu = 0.9;
  double c1_hypothesis = 0.0;  // smallest c1 satisfying the H_LL assumption
  double c1_rho_q = 0.0;       // smallest c1 for the rho_q two-sided bound
  double c1_q_ratio = 0.0;     // smallest c1 for the (1+|q|)/(1+|rho|) bound
  bool rho_q_bound_holds = true;
  bool q_ratio_bound_holds = true;
  double c2_fit = 0.0;         // smallest c2 for the d_rho d_q rho bound
  double min_rho_q = 1.0;
  bool rho_q_positive = true;
  double max_method_gap = 0.0;      // max |fd - factor| / factor
  double max_outside_error = 0.0;   // max |rho - (r - t)| off the strip
  std::vector<double> residual_t, residual_sup, weighted_residual_sup;
  PowerLawFit residual_fit;         // weighted residual sup against 1 + t
  int points = 0;
};

/// Fit window for the residual decay defaults to [t_end / 10, t_end].
EikonalBoundsReport verify_eikonal_bounds(const std::vector<EikonalFields>& fields, const Trajectory& traj,
                                          double epsilon, double nu = 0.9, double fit_t1 = -1.0,
                                          double fit_t2 = -1.0);

/// Monotone cubic (Fritsch-Carlson) interpolation through strictly
/// increasing x.
class Pchip {
 public:
  Pchip(std::vector<double> x, std::vector<double> y);
  double operator()(double x) const;
  double front() const { return x_.front(); }
  double back() const { return x_.back(); }

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace qlwave
