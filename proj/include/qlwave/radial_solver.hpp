// Radially symmetric solver for g^{ab}(phi) d_a d_b phi = 0 and two
// comparison equations. The model and semilinear cases evolve Phi = r phi on
// r_j = j dr; general radial metrics evolve phi on r_j = (j + 1/2) dr.
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlwave/nullframe.hpp"
#include "qlwave/vector_fields.hpp"

namespace qlwave {

enum class EquationKind {
  Model,          // c(phi)^2 Laplacian, c = 1 + c1 phi
  GeneralRadial,  // H = phi k + phi^2 k2
  Semilinear,     // box phi = (d_t phi)^2
  Forced,         // box phi = F(t, r), linear
};

std::string to_string(EquationKind e);
EquationKind equation_from_string(const std::string& s);

/// Radially symmetric contravariant tensor: H^{00} = tt, H^{0i} = tr w^i,
/// H^{ij} = rr w^i w^j + ang (delta^{ij} - w^i w^j).
struct RadialTensor {
  double tt = 0, tr = 0, rr = 0, ang = 0;

  RadialTensor operator*(double s) const { return {tt * s, tr * s, rr * s, ang * s}; }
  RadialTensor operator+(const RadialTensor& o) const {
    return {tt + o.tt, tr + o.tr, rr + o.rr, ang + o.ang};
  }
  double ll() const { return tt - 2.0 * tr + rr; }
  double max_abs() const;
  SymTensor4<double> tensor(const Direction<double>& omega) const;
};

enum class ProfileKind { Bump, Gaussian };

/// Radial data shape P(r), supported in r <= 1. Bump = (1 - r^2)^4,
/// Gaussian = exp(-r^2 / width^2) (1 - r^2)^4.
struct DataProfile {
  ProfileKind kind = ProfileKind::Bump;
  double width = 0.5;
  double phi0_scale = 1.0;  // phi(0, r) = eps * phi0_scale * P(r)
  double phi1_scale = 0.0;  // d_t phi(0, r) = eps * phi1_scale * P(r)

  double value(double r) const;
  double derivative(double r) const;
};

/// F(t, r) = amplitude B((t - t_center)/t_half_width) B(r / r_half_width),
/// B(x) = (1 - x^2)^4.
struct Forcing {
  double amplitude = 1.0;
  double t_center = 2.0;
  double t_half_width = 1.0;
  double r_half_width = 1.0;

  double value(double t, double r) const;
  Jet2 jet(double t, double r) const;
};

struct Scenario {
  EquationKind equation = EquationKind::Model;
  double c1 = 1.0;
  RadialTensor k{};
  RadialTensor k2{};
  double epsilon = 0.01;
  DataProfile data{};
  Forcing forcing{};
  double dr = 0.02;
  double r_max = 0.0;  // 0 selects t_end * speed_bound + 4
  double cfl = 0.45;
  double t_end = 10.0;
  double output_every = 0.5;
  double blowup_factor = 1e3;
  double dt_min = 1e-7;
  double speed_bound = 1.25;  // bound on propagation speed used to size the active region

  double effective_r_max() const { return r_max > 0 ? r_max : t_end * speed_bound + 4.0; }
};

class ScenarioError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ScenarioError naming the first invalid field.
void validate(const Scenario& s);

RadialTensor metric_perturbation(const Scenario& s, double phi);
double h_ll(const Scenario& s, double phi);
double dh_ll_dphi(const Scenario& s, double phi);

struct RadialState {
  double t = 0.0;
  Eigen::ArrayXd u;  // Phi or phi
  Eigen::ArrayXd v;  // d_t of u
};

struct RadialSnapshot {
  double t = 0.0;
  double r0 = 0.0;
  double dr = 0.0;
  Eigen::ArrayXd phi, phi_t, phi_r;
  RadialState state;  // truncated evolved variables, for regenerating windows

  int size() const { return static_cast<int>(phi.size()); }
  double r(int j) const { return r0 + j * dr; }
  Eigen::ArrayXd radii() const;
  Eigen::ArrayXd phi_q() const { return 0.5 * (phi_r - phi_t); }
  Eigen::ArrayXd phi_p() const { return 0.5 * (phi_r + phi_t); }
  double max_gradient() const;
};

enum class Termination { Completed, BlowUp, Error };
std::string to_string(Termination t);

struct BlowUpInfo {
  double t_star = 0.0;
  double r_star = 0.0;
  std::string reason;  // "gradient" or "dt"
};

struct Trajectory {
  Scenario scenario;
  std::vector<RadialSnapshot> snapshots;
  Termination termination = Termination::Completed;
  std::optional<BlowUpInfo> blowup;
  std::string message;
  long steps = 0;

  /// Index of the snapshot closest to t.
  int index_near(double t) const;
};

class RadialSolver {
 public:
  explicit RadialSolver(Scenario s);

  const Scenario& scenario() const { return s_; }
  bool staggered() const { return s_.equation == EquationKind::GeneralRadial; }
  double r(int j) const { return (staggered() ? j + 0.5 : j) * s_.dr; }
  int grid_size() const { return n_; }
  /// Last index that can be non-zero once the state reaches time t.
  int active_limit(double t) const;

  RadialState initial_state() const;
  double max_speed(const RadialState& st) const;
  /// One kick-drift-kick step; dt may be negative.
  void step(RadialState& st, double dt) const;

  struct Derived {
    Eigen::ArrayXd phi, phi_t, phi_r;
  };
  Derived derived(const RadialState& st, int limit) const;
  RadialSnapshot snapshot(const RadialState& st) const;

  /// Time window of phi centred on the snapshot, built by stepping +-h from
  /// its state; h = 0 selects dr.
  GridField2D window(const RadialSnapshot& snap, int levels, double h = 0.0) const;

  Trajectory run() const;

 private:
  void acceleration(const Eigen::ArrayXd& u, const Eigen::ArrayXd& v, double t, int limit,
                    Eigen::ArrayXd& a) const;
  bool velocity_dependent() const;

  Scenario s_;
  int n_ = 0;
};

Trajectory run(const Scenario& s);

/// Odd-extension d'Alembert solution for phi with c = 1 and no forcing.
double exact_linear_solution(const Scenario& s, double t, double r);

struct MetricFields {
  Eigen::ArrayXd H_LL, H_LLbar, trbar_H;
};

/// Frame components of H along the radial direction at every snapshot point.
MetricFields metric_fields(const Scenario& s, const RadialSnapshot& snap);

/// Earliest blow-up recorded in the trajectory.
std::optional<BlowUpInfo> detect_blowup(const Trajectory& traj);

}  // namespace qlwave
