// Weighted energies and the inequalities of Sections 6-10 measured on solver
// output.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

#include "qlwave/eikonal.hpp"
#include "qlwave/fitting.hpp"
#include "qlwave/radial_solver.hpp"
#include "qlwave/vector_fields.hpp"

namespace qlwave {

/// Klainerman-Sobolev constant used for the margins. The measured minimal
/// constant on the reference runs stays below 0.03.
inline constexpr double kKlainermanSobolevConstant = 1.0;
inline constexpr double kPoincareConstant = 32.0;

struct InequalityReport {
  std::string id;
  std::vector<double> t, lhs, rhs, margin;
  std::vector<double> base;   // right side without its constant
  double constant = 0.0;      // smallest C with lhs <= C * base
  double paper_constant = 0.0;
  bool hypotheses_hold = true;
  std::vector<std::string> notes;

  void push(double time, double l, double r, double b);
  bool holds() const;
  double min_margin() const;
};

/// w = exp(sigma |rho - 2|^(-nu')), sigma = kappa eps ln(1 + t).
struct WeightField {
  double t = 0.0;
  double sigma = 0.0;
  Eigen::ArrayXd w;

  /// Pads past the end with the last value (fields vanish there).
  double at(int j) const { return w.size() == 0 ? 1.0 : w(std::min<Eigen::Index>(j, w.size() - 1)); }
  static WeightField unit(double t, int n);
};

struct WeightParams {
  double kappa = 0.0;
  double epsilon = 0.01;
  double nu_prime = 0.5;
  /// phi counts as non-zero above support_tol * sup|phi|; the discrete
  /// solution has a small precursor ahead of r = t + 1.
  double support_tol = 0.05;
};

/// Throws std::domain_error when rho > 1 where phi is non-zero.
WeightField weight_field(double t, const Eigen::ArrayXd& phi, const Eigen::ArrayXd& rho, const WeightParams& p);
WeightField weight_field(const RadialSnapshot& snap, const EikonalFields& fields, const WeightParams& p);

/// 4 pi sum f_j r_j^2 dr with half weights at the ends; NaN entries skipped.
double radial_integral(const Eigen::ArrayXd& f, double r0, double dr);

/// integral |d phi|^2 w dx from the snapshot's own derivatives.
double basic_energy(const RadialSnapshot& snap, const WeightField& w);

/// integral (d_t Phi)^2 + (d_r Phi)^2 dr of the evolved variable Phi = r phi.
double reduced_energy(const RadialSnapshot& snap);

/// E_{k,i} = sum over |a| <= k, |I| <= i of integral |d d^a Z^I phi|^2 w dx on
/// the centre level of the window, which needs levels_for(k + i + 1) levels.
double energy(const GridField2D& window, const WeightField& w, int k, int i);

struct EnergyRecord {
  double t = 0.0;
  std::array<std::array<double, 4>, 4> E{};  // E[k][i], NaN when k + i > 3
  std::array<double, 4> E_N{};               // unweighted, E_N = E_{0,N}
};

EnergyRecord energy_record(const RadialSolver& solver, const RadialSnapshot& snap, const WeightField& w,
                           int max_order = 3);

/// g^{ab} d_a d_b phi on the centre level of a three-level window.
Eigen::ArrayXd box_g(const GridField2D& window, const Scenario& s);

struct EnergyCheckParams {
  WeightParams weight{};
  double c1 = -1.0;     // < 0: measured from the run
  double t_max = -1.0;  // < 0: whole run
};

/// Section 7 weighted energy inequality with c = c1 + kappa at every output
/// time, with the measured discrete box_g phi in the source term.
InequalityReport energy_inequality_check(const Trajectory& traj, const std::vector<EikonalFields>& fields,
                                         const EnergyCheckParams& params);

/// sup over the run of |d g|(1 + t) / eps.
double measured_metric_c1(const Trajectory& traj, double epsilon);

/// Single-snapshot Poincare values {lhs, base} with base = integral |d phi|^2 w.
std::pair<double, double> poincare_terms(const RadialSnapshot& snap, const EikonalFields& fields,
                                         const WeightField& w);

/// Poincare inequality with constant 32 at every output time. c2 is used only
/// for the hypothesis kappa > 2 c2 / nu'.
InequalityReport poincare_check(const Trajectory& traj, const std::vector<EikonalFields>& fields,
                                const WeightParams& p, double c2);

/// {sup (1+t+r)(1+|t-r|)^{1/2}|phi|, sum_{|I|<=2} ||Z^I phi||} on the centre
/// level; the window needs at least 5 levels.
std::pair<double, double> klainerman_sobolev_terms(const GridField2D& window);

InequalityReport klainerman_sobolev_check(const Trajectory& traj, double constant = kKlainermanSobolevConstant,
                                          int stride = 1);

struct HormanderParams {
  int r_nodes = 400;
  double dtau = 0.005;
};

/// Forced run with zero data: sup |w|(1+t+r) against the space-time
/// integral of sum_{|I|<=2} |Z^I F| / (1 + tau + |y|).
InequalityReport hormander_check(const Trajectory& forced, const HormanderParams& params = {});

/// Same with the initial-data term sum_{|I|<=2} ||d Z^I phi(0)|| added.
InequalityReport hormander_corollary_check(const Trajectory& forced, const HormanderParams& params = {});

/// Tangential-derivative constants at every stride-th output time.
std::vector<InequalityReport> tangential_check(const Trajectory& traj, int stride = 1);

enum class DecayQuantity { Phi, DPhi, D2Phi, ZPhi, WeightedDPhi, WeightedD2Phi };

std::string to_string(DecayQuantity q);
DecayQuantity decay_quantity_from_string(const std::string& s);

struct DecayFitReport {
  DecayQuantity quantity = DecayQuantity::DPhi;
  double t1 = 0.0, t2 = 0.0;
  bool near_cone_only = false;
  std::vector<double> t, value;
  PowerLawFit fit;
};

struct DecayFitParams {
  double t1 = -1.0, t2 = -1.0;  // < 0: [t_end / 10, t_end]
  bool near_cone_only = true;   // |rho| <= 5
  double nu = 0.9;
  int samples = 40;
};

/// fields may be empty, in which case rho = r - t and rho_q = 1.
DecayFitReport decay_fit(const Trajectory& traj, const std::vector<EikonalFields>& fields, DecayQuantity q,
                         const DecayFitParams& params = {});

/// (4 E0 + A)(1 + t)^{2 B eps}.
double gronwall_oracle(double E0, double A, double B, double epsilon, double t);

struct GronwallHypothesis {
  bool holds = true;
  double min_margin = 0.0;  // min over samples of (rhs - E) / rhs
};

/// E(t) <= 4 E(0) + integral_0^t B eps / (1 + tau) (E + A (1 + tau)^{B eps}),
/// trapezoid rule over the given samples, relative tolerance tol.
GronwallHypothesis check_gronwall_hypothesis(const std::vector<double>& t, const std::vector<double>& E, double A,
                                             double B, double epsilon, double tol = 1e-9);

}  // namespace qlwave
