// Hormander's asymptotic system for quadratic nonlinearities: frame
// coefficients A_mn(omega), the reduced (s, q) equation, and classification.
#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlwave {

/// One term a * d^alpha phi * d^beta phi. Multi-indices are strings over
/// {t, x, y, z}; the empty string means no derivative.
struct NonlinearTerm {
  std::string alpha;
  std::string beta;
  double coefficient = 0.0;
};

struct QuadraticNonlinearity {
  std::vector<NonlinearTerm> terms;

  QuadraticNonlinearity scaled(double lambda) const;
};

class GrammarError : public std::runtime_error {
 public:
  GrammarError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Parses "alpha,beta,coeff" triples, one per line (';' also separates),
/// '#' starts a comment. A '+' inside alpha or beta expands to a sum, so
/// ",xx+yy+zz,-2" is phi * Laplacian phi with coefficient -2. Terms with
/// |alpha| > |beta| are stored swapped.
QuadraticNonlinearity parse_nonlinearity(const std::string& text);

struct AsymptoticCoefficients {
  Eigen::Matrix3d A = Eigen::Matrix3d::Zero();  // upper triangle, A(m, n) with m <= n
  Eigen::Vector3d omega = Eigen::Vector3d::UnitZ();
};

/// A_mn = 1/4 sum over |alpha| = m, |beta| = n of a * omhat^alpha omhat^beta,
/// omhat = (-1, omega).
AsymptoticCoefficients asymptotic_coefficients(const QuadraticNonlinearity& nl,
                                               const Eigen::Vector3d& omega);

/// Deterministic Fibonacci-sphere directions.
std::vector<Eigen::Vector3d> direction_grid(int n);

struct NullCheck {
  bool null_condition = false;
  double max_abs_A = 0.0;
};

NullCheck check_null_condition(const QuadraticNonlinearity& nl, int n_directions);

struct AsymptoticProfile {
  double s = 0.0;
  double q_min = -3.0;
  double dq = 0.01;
  Eigen::ArrayXd Phi;
  Eigen::ArrayXd V;

  int size() const { return static_cast<int>(V.size()); }
  double q(int i) const { return q_min + i * dq; }
};

/// Phi = amplitude * (1 - q^2)^4 on |q| < 1 and V = dPhi/dq.
AsymptoticProfile bump_profile(double amplitude, double q_min, double q_max, double dq, double s0 = 0.0);

/// V equal to v0 on |q| <= 1/2 with a smooth taper to zero at |q| = 1;
/// Phi recovered by integration from the right.
AsymptoticProfile plateau_profile(double v0, double q_min, double q_max, double dq, double s0 = 0.0);

/// Phi(q) = -integral from q to q_max of V, trapezoid rule.
Eigen::ArrayXd integrate_from_right(const Eigen::ArrayXd& V, double dq);

struct AsymptoticOptions {
  double ds_max = 0.01;
  double ds_min = 1e-8;
  double cfl = 0.5;
  double growth_limit = 0.01;    // max relative change of max|V| per step
  double blowup_threshold = 0;   // 0 means 1e6 * initial max|V|
  int checkpoints = 20;
  long max_steps = 50'000'000;
};

struct AsymptoticResult {
  std::vector<AsymptoticProfile> checkpoints;
  std::vector<double> s_series;
  std::vector<double> max_v_series;
  bool blow_up = false;
  bool stiffness = false;
  double s_star = 0.0;
  double q_star = 0.0;
  long steps = 0;
};

/// Advances d_s V = 2 A_mn d_q^m Phi d_q^n Phi (d_q^0 = Phi, d_q^1 = V,
/// d_q^2 = V_q) with explicit midpoint steps.
AsymptoticResult integrate_asymptotic(const AsymptoticCoefficients& A, const AsymptoticProfile& initial,
                                      double s_max, const AsymptoticOptions& options = {});

/// s0 + 1 / (2 A11 V0max), or nullopt when A11 * V0max <= 0.
std::optional<double> riccati_blowup_oracle(double A11, double V0_max, double s0 = 0.0);

enum class ClassificationKind { ClassicalNull, WeakNullEvidence, BlowUp };

std::string to_string(ClassificationKind k);

struct Classification {
  ClassificationKind kind = ClassificationKind::ClassicalNull;
  double max_abs_A = 0.0;
  double growth_exponent = 0.0;     // slope of ln max|V| against ln(1 + s - s0)
  bool within_threshold = true;     // growth_exponent <= params.max_growth_exponent
  double s_star = 0.0;
  double q_star = 0.0;
  bool stiffness = false;
  Eigen::Vector3d omega_star = Eigen::Vector3d::Zero();
  std::optional<double> oracle_s_star;  // Riccati estimate when only A11 is active
};

struct ClassifyParams {
  double s_max = 50.0;
  double amplitude = 0.1;
  int n_directions = 12;
  double blowup_threshold = 0.0;  // 0 means 1e6 * initial max|V|
  double max_growth_exponent = 1.0;
  double q_min = -3.0;
  double q_max = 1.5;
  double dq = 0.005;
  int parallel = 1;
  AsymptoticOptions integrator{};
};

Classification classify(const QuadraticNonlinearity& nl, const ClassifyParams& params = {});

}  // namespace qlwave
