// Minkowski null frame {L, Lbar, S1, S2} and the decomposition of symmetric
// contravariant tensors in that frame.
//
// Conventions: index 0 is time, m = diag(-1, 1, 1, 1), tensors are stored
// contravariant and indices are always lowered with m.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace qlwave {

template <typename Scalar>
using FourVector = Eigen::Matrix<Scalar, 4, 1>;

template <typename Scalar>
using Direction = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> minkowski_matrix() {
  return Eigen::Matrix<Scalar, 4, 1>(Scalar(-1), Scalar(1), Scalar(1), Scalar(1))
      .asDiagonal();
}

template <typename Scalar>
FourVector<Scalar> lower(const FourVector<Scalar>& v) {
  return FourVector<Scalar>(-v(0), v(1), v(2), v(3));
}

/// Symmetric rank-2 contravariant tensor. The stored matrix is symmetrized on
/// construction so g^{ab} = g^{ba} holds exactly.
template <typename Scalar>
class SymTensor4 {
 public:
  using Matrix = Eigen::Matrix<Scalar, 4, 4>;

  SymTensor4() : m_(Matrix::Zero()) {}
  explicit SymTensor4(const Matrix& m) : m_(Scalar(0.5) * (m + m.transpose())) {}

  static SymTensor4 zero() { return SymTensor4(); }
  static SymTensor4 minkowski() { return SymTensor4(minkowski_matrix<Scalar>()); }

  /// Symmetric outer product u v^T + v u^T (weight 1 each).
  static SymTensor4 sym_outer(const FourVector<Scalar>& u, const FourVector<Scalar>& v) {
    return SymTensor4(u * v.transpose() + v * u.transpose());
  }

  Scalar operator()(int a, int b) const { return m_(a, b); }
  const Matrix& matrix() const { return m_; }

  SymTensor4 operator+(const SymTensor4& o) const { return SymTensor4(m_ + o.m_); }
  SymTensor4 operator-(const SymTensor4& o) const { return SymTensor4(m_ - o.m_); }
  SymTensor4 operator*(Scalar s) const { return SymTensor4(m_ * s); }

  /// Largest absolute entry; used as |H| throughout.
  Scalar max_abs() const { return m_.cwiseAbs().maxCoeff(); }

 private:
  Matrix m_;
};

template <typename Scalar>
struct NullFrame {
  Direction<Scalar> omega;
  FourVector<Scalar> L;
  FourVector<Scalar> Lbar;
  FourVector<Scalar> S1;
  FourVector<Scalar> S2;

  /// The two angular vectors, indexable by A = 0, 1.
  std::array<FourVector<Scalar>, 2> angular() const { return {S1, S2}; }
};

/// Builds the frame at direction omega (normalized on entry). S1 is the
/// normalized cross product of the coordinate axis least aligned with omega
/// (lowest index on ties) with omega, and S2 = omega x S1.
template <typename Scalar>
NullFrame<Scalar> frame_at(const Direction<Scalar>& direction) {
  using std::abs;
  const Scalar norm = direction.norm();
  if (!(norm > Scalar(0)) || !direction.allFinite()) {
    throw std::invalid_argument("frame_at: direction must be a finite non-zero vector");
  }
  const Direction<Scalar> w = direction / norm;

  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (abs(w(k)) < abs(w(axis))) axis = k;
  }
  const Direction<Scalar> e = Direction<Scalar>::Unit(axis);
  const Direction<Scalar> s1 = e.cross(w).normalized();
  const Direction<Scalar> s2 = w.cross(s1);

  NullFrame<Scalar> f;
  f.omega = w;
  f.L << Scalar(1), w;
  f.Lbar << Scalar(1), -w;
  f.S1 << Scalar(0), s1;
  f.S2 << Scalar(0), s2;
  return f;
}

/// g_{UV} = g^{ab} U_a V_b with indices lowered by m.
template <typename Scalar>
Scalar contract(const SymTensor4<Scalar>& g, const FourVector<Scalar>& u,
                const FourVector<Scalar>& v) {
  return lower(u).dot(g.matrix() * lower(v));
}

/// Frame components g^{UV}.
template <typename Scalar>
struct NullComponents {
  Scalar LL{0};
  Scalar LLbar{0};
  Scalar LbarLbar{0};
  Eigen::Matrix<Scalar, 2, 1> LA = Eigen::Matrix<Scalar, 2, 1>::Zero();
  Eigen::Matrix<Scalar, 2, 1> LbarA = Eigen::Matrix<Scalar, 2, 1>::Zero();
  Eigen::Matrix<Scalar, 2, 2> AB = Eigen::Matrix<Scalar, 2, 2>::Zero();

  /// delta_{AB} g^{AB}
  Scalar angular_trace() const { return AB.trace(); }
};

template <typename Scalar>
NullComponents<Scalar> decompose(const SymTensor4<Scalar>& g, const NullFrame<Scalar>& f) {
  const auto A = f.angular();
  NullComponents<Scalar> c;
  c.LLbar = Scalar(0.25) * contract(g, f.Lbar, f.L);
  c.LL = Scalar(0.25) * contract(g, f.Lbar, f.Lbar);
  c.LbarLbar = Scalar(0.25) * contract(g, f.L, f.L);
  for (int a = 0; a < 2; ++a) {
    c.LA(a) = Scalar(-0.5) * contract(g, f.Lbar, A[a]);
    c.LbarA(a) = Scalar(-0.5) * contract(g, f.L, A[a]);
    for (int b = 0; b < 2; ++b) c.AB(a, b) = contract(g, A[a], A[b]);
  }
  return c;
}

template <typename Scalar>
NullComponents<Scalar> decompose(const SymTensor4<Scalar>& g, const Direction<Scalar>& omega) {
  return decompose(g, frame_at(omega));
}

/// g^{ab} = g^{UV} U^a V^b summed over all ordered frame pairs.
template <typename Scalar>
SymTensor4<Scalar> reconstruct(const NullComponents<Scalar>& c, const NullFrame<Scalar>& f) {
  using Matrix = Eigen::Matrix<Scalar, 4, 4>;
  const auto A = f.angular();
  Matrix g = c.LL * f.L * f.L.transpose() + c.LbarLbar * f.Lbar * f.Lbar.transpose() +
             c.LLbar * (f.L * f.Lbar.transpose() + f.Lbar * f.L.transpose());
  for (int a = 0; a < 2; ++a) {
    g += c.LA(a) * (f.L * A[a].transpose() + A[a] * f.L.transpose());
    g += c.LbarA(a) * (f.Lbar * A[a].transpose() + A[a] * f.Lbar.transpose());
    for (int b = 0; b < 2; ++b) g += c.AB(a, b) * A[a] * A[b].transpose();
  }
  return SymTensor4<Scalar>(g);
}

template <typename Scalar>
SymTensor4<Scalar> reconstruct(const NullComponents<Scalar>& c, const Direction<Scalar>& omega) {
  return reconstruct(c, frame_at(omega));
}

template <typename Scalar>
struct FrameDecomposition {
  FourVector<Scalar> L1;
  SymTensor4<Scalar> gamma;
  Scalar ell{0};
};

/// Splits g = m + H as g = -1/2 (L1 Lbar + Lbar L1) + gamma, with
/// L1 = -1/2 g_{L Lbar} L - 1/4 g_{LL} Lbar + g_{LA} A and
/// ell = trbar H + H_{L Lbar} - 1/2 H_{LL}.
template <typename Scalar>
FrameDecomposition<Scalar> frame_decomposition(const SymTensor4<Scalar>& H,
                                               const NullFrame<Scalar>& f) {
  const SymTensor4<Scalar> g = SymTensor4<Scalar>::minkowski() + H;
  const auto A = f.angular();
  const NullComponents<Scalar> c = decompose(g, f);

  FrameDecomposition<Scalar> d;
  d.L1 = Scalar(-0.5) * contract(g, f.L, f.Lbar) * f.L - Scalar(0.25) * contract(g, f.L, f.L) * f.Lbar;
  Eigen::Matrix<Scalar, 4, 4> gamma = c.LL * f.L * f.L.transpose();
  for (int a = 0; a < 2; ++a) {
    d.L1 += contract(g, f.L, A[a]) * A[a];
    gamma += c.LA(a) * (A[a] * f.L.transpose() + f.L * A[a].transpose());
    for (int b = 0; b < 2; ++b) gamma += c.AB(a, b) * A[a] * A[b].transpose();
  }
  d.gamma = SymTensor4<Scalar>(gamma);

  Scalar trbar = Scalar(0);
  for (int a = 0; a < 2; ++a) trbar += contract(H, A[a], A[a]);
  d.ell = trbar + contract(H, f.L, f.Lbar) - Scalar(0.5) * contract(H, f.L, f.L);
  return d;
}

template <typename Scalar>
FrameDecomposition<Scalar> frame_decomposition(const SymTensor4<Scalar>& H,
                                               const Direction<Scalar>& omega) {
  return frame_decomposition(H, frame_at(omega));
}

/// Right side of the reconstruction identity, -1/2 (L1 Lbar + Lbar L1) + gamma.
template <typename Scalar>
SymTensor4<Scalar> recombine(const FrameDecomposition<Scalar>& d, const NullFrame<Scalar>& f) {
  return SymTensor4<Scalar>(Scalar(-0.5) * (d.L1 * f.Lbar.transpose() + f.Lbar * d.L1.transpose()) +
                            d.gamma.matrix());
}

/// g^{ab} d_a d_b phi - g_{LL} d_q^2 phi for g = m + H, where
/// d_q = -1/2 Lbar^a d_a. `hessian` holds d_a d_b phi.
template <typename Scalar>
Scalar wave_operator_residual(const SymTensor4<Scalar>& H, const NullFrame<Scalar>& f,
                              const Eigen::Matrix<Scalar, 4, 4>& hessian) {
  const SymTensor4<Scalar> g = SymTensor4<Scalar>::minkowski() + H;
  const Scalar box = (g.matrix().cwiseProduct(hessian)).sum();
  const Scalar dqq = Scalar(0.25) * f.Lbar.dot(hessian * f.Lbar);
  return box - contract(g, f.L, f.L) * dqq;
}

/// |dbar d phi|: Frobenius norm of T^a V^b d_a d_b phi over T in {L, S1, S2}
/// and V in the full frame.
template <typename Scalar>
Scalar tangential_hessian_norm(const NullFrame<Scalar>& f,
                               const Eigen::Matrix<Scalar, 4, 4>& hessian) {
  const std::array<FourVector<Scalar>, 3> tangential{f.L, f.S1, f.S2};
  const std::array<FourVector<Scalar>, 4> all{f.L, f.Lbar, f.S1, f.S2};
  Scalar sum = Scalar(0);
  for (const auto& T : tangential)
    for (const auto& V : all) {
      const Scalar x = T.dot(hessian * V);
      sum += x * x;
    }
  using std::sqrt;
  return sqrt(sum);
}

/// Measured constant in |g d d phi - g_{LL} d_q^2 phi| <= C |dbar d phi| at
/// one point; zero when both sides vanish.
template <typename Scalar>
Scalar wave_operator_bound_ratio(const SymTensor4<Scalar>& H, const NullFrame<Scalar>& f,
                                 const Eigen::Matrix<Scalar, 4, 4>& hessian) {
  using std::abs;
  const Scalar lhs = abs(wave_operator_residual(H, f, hessian));
  const Scalar rhs = tangential_hessian_norm(f, hessian);
  if (rhs == Scalar(0)) return lhs == Scalar(0) ? Scalar(0) : Scalar(INFINITY);
  return lhs / rhs;
}

}  // namespace qlwave
