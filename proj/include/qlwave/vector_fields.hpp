// Radial reduction of the Minkowski vector fields {S, K, Dt, Dr} acting on
// (t, r) grid windows.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace qlwave {

enum class VectorFieldId { S, K, Dt, Dr };

inline constexpr std::array<VectorFieldId, 4> kAllFields{VectorFieldId::S, VectorFieldId::K,
                                                          VectorFieldId::Dt, VectorFieldId::Dr};

std::string to_string(VectorFieldId z);

using FieldWord = std::vector<VectorFieldId>;

/// All ordered words of length <= max_length over the four-letter alphabet,
/// shortest first, lexicographic within a length.
std::vector<FieldWord> words_up_to(int max_length);

/// Unordered words over {Dt, Dr} of length exactly k (k + 1 of them).
std::vector<FieldWord> coordinate_derivatives(int k);

inline constexpr double kInvalid = std::numeric_limits<double>::quiet_NaN();

/// Values on `levels` consecutive time levels times `nr` radial points.
/// Row l sits at t_center + (l - (levels-1)/2) dt, column j at r0 + j dr.
/// NaN marks points where a stencil could not be applied.
class GridField2D {
 public:
  GridField2D() = default;
  GridField2D(Eigen::ArrayXXd values, double t_center, double dt, double r0, double dr);

  int levels() const { return static_cast<int>(values_.rows()); }
  int nr() const { return static_cast<int>(values_.cols()); }
  int center() const { return (levels() - 1) / 2; }
  double dt() const { return dt_; }
  double dr() const { return dr_; }
  double r0() const { return r0_; }
  double t_center() const { return t_center_; }
  double t(int level) const { return t_center_ + (level - center()) * dt_; }
  double r(int j) const { return r0_ + j * dr_; }

  const Eigen::ArrayXXd& values() const { return values_; }
  Eigen::ArrayXXd& values() { return values_; }
  double operator()(int level, int j) const { return values_(level, j); }

  /// Centre time level as a 1D array.
  Eigen::ArrayXd center_row() const { return values_.row(center()).transpose(); }
  Eigen::ArrayXd radii() const;

  GridField2D with_values(Eigen::ArrayXXd v) const {
    return GridField2D(std::move(v), t_center_, dt_, r0_, dr_);
  }

  /// Samples f(t, r) on the same layout.
  static GridField2D sample(const std::function<double(double, double)>& f, int levels, int nr,
                            double t_center, double dt, double r0, double dr);

 private:
  Eigen::ArrayXXd values_;
  double t_center_ = 0.0;
  double dt_ = 1.0;
  double r0_ = 0.0;
  double dr_ = 1.0;
};

/// Centred second-order differences; one ring of points in t and r becomes
/// invalid.
GridField2D partial_t(const GridField2D& f);
GridField2D partial_r(const GridField2D& f);

/// Zf with S = t d_t + r d_r, K = r d_t + t d_r.
GridField2D apply_field(const GridField2D& f, VectorFieldId z);

/// Z^I f, applied right to left.
GridField2D apply_word(const GridField2D& f, const FieldWord& word);

/// Supplies a window of the requested (odd) number of levels centred on a
/// fixed time.
using WindowSupplier = std::function<GridField2D(int levels)>;

inline int levels_for(int applications) { return 2 * applications + 1; }

/// Requests levels_for(|I|) levels and applies the word.
GridField2D apply_multi(const WindowSupplier& supplier, const FieldWord& word);

/// Z^I f for every word of length <= max_length, sharing prefixes. Result i
/// corresponds to words_up_to(max_length)[i].
std::vector<GridField2D> apply_all_words(const GridField2D& f, int max_length);

struct CommutatorTable {
  /// [Z, box] = -C_Z box
  std::array<double, 4> c_box{};
  /// [Z, d_a] = coeff(a, b) d_b for a, b in {t, r}
  std::array<Eigen::Matrix2d, 4> first_order{};

  double box_constant(VectorFieldId z) const { return c_box[static_cast<int>(z)]; }
  const Eigen::Matrix2d& derivative_coefficients(VectorFieldId z) const {
    return first_order[static_cast<int>(z)];
  }
};

CommutatorTable commutator_table();

/// Second-order jet of a function of (t, r) at one point.
struct Jet2 {
  double f = 0, ft = 0, fr = 0, ftt = 0, ftr = 0, frr = 0;
};

/// Exact Z^I f at (t, r) for words of length <= 2.
double apply_word_exact(const Jet2& jet, const FieldWord& word, double t, double r);

struct PointwiseBound {
  std::string id;
  double constant = 0.0;  // smallest C with LHS <= C * RHS on the valid set
  double lhs = 0.0;       // at the point realising the constant
  double rhs = 0.0;
  double r_at = 0.0;
  int points = 0;
};

/// Measured constants for the three tangential-derivative bounds on the
/// centre level. Needs at least 5 levels.
std::vector<PointwiseBound> tangential_bounds(const GridField2D& window);

}  // namespace qlwave
