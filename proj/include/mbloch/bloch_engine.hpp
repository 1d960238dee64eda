#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "mbloch/envelope_model.hpp"

namespace mbloch {

template <typename Scalar = double>
using BlochVector = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar = double>
using RotationVector = Eigen::Matrix<Scalar, 3, 1>;

/// R = (-A, 0, delta); |R| is the generalized Rabi frequency.
template <typename Scalar>
RotationVector<Scalar> rotation_vector(const DriveParams<Scalar>& d) {
  return {-d.A, Scalar(0), d.delta};
}

/// sx = 2 Re{a b*}, sy = -2 Im{a b*}, sz = |a|^2 - |b|^2. Blind to global phase.
template <typename Scalar>
BlochVector<Scalar> to_bloch(const Vector2c<Scalar>& ab) {
  const std::complex<Scalar> cross = ab(0) * std::conj(ab(1));
  return {2 * cross.real(), -2 * cross.imag(), std::norm(ab(0)) - std::norm(ab(1))};
}

template <typename Scalar>
BlochVector<Scalar> to_bloch(const ModeAmplitudes<Scalar>& state) {
  require_frame(state, FrameKind::RotatingFrame, "to_bloch");
  return to_bloch(state.amplitudes);
}

/// Canonical representative of the amplitude pairs mapping onto s: a real and
/// non-negative. Global phase is not recoverable.
template <typename Scalar>
Vector2c<Scalar> from_bloch(const BlochVector<Scalar>& s) {
  using C = std::complex<Scalar>;
  const Scalar len = s.norm();
  const Scalar popA = std::max(Scalar(0), (len + s.z()) / 2);
  const Scalar popB = std::max(Scalar(0), (len - s.z()) / 2);
  const Scalar a = std::sqrt(popA);
  if (a == 0) return {C(0), C(std::sqrt(popB))};
  return {C(a), C(s.x(), s.y()) / (2 * a)};
}

/// (|a|^2, |b|^2) from the Bloch vector, using |s| = |a|^2 + |b|^2.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> populations(const BlochVector<Scalar>& s) {
  const Scalar len = s.norm();
  return {(len + s.z()) / 2, (len - s.z()) / 2};
}

/// Matrix form M with ds/dt = M s.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> bloch_matrix(const DriveParams<Scalar>& d) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << -d.gamma, -d.delta, 0,
       d.delta, -d.gamma, d.A,
       0, -d.A, -d.gamma;
  return m;
}

/// ds/dt = R x s - gamma s
template <typename Scalar>
BlochVector<Scalar> bloch_rhs(const BlochVector<Scalar>& s, const DriveParams<Scalar>& d) {
  return rotation_vector(d).cross(s) - d.gamma * s;
}

/// Exact propagation over a constant-drive segment: rotation about R by
/// Omega_R t (Rodrigues) times the uniform decay exp(-gamma t).
template <typename Scalar>
BlochVector<Scalar> propagate_bloch_segment(const BlochVector<Scalar>& s0, const DriveParams<Scalar>& d, Scalar t) {
  const RotationVector<Scalar> r = rotation_vector(d);
  const Scalar omegaR = r.norm();
  const Scalar decay = std::exp(-d.gamma * t);
  if (omegaR == 0) return decay * s0;

  const RotationVector<Scalar> axis = r / omegaR;
  const Scalar angle = omegaR * t;
  const Scalar c = std::cos(angle);
  const Scalar s = std::sin(angle);
  const BlochVector<Scalar> rotated = c * s0 + s * axis.cross(s0) + (1 - c) * axis.dot(s0) * axis;
  return decay * rotated;
}

/// |to_bloch(closed-form amplitudes at t) - Bloch propagation of to_bloch(initial)|
template <typename Scalar>
Scalar bloch_equivalence_check(const Vector2c<Scalar>& initial, const DriveParams<Scalar>& d, Scalar t) {
  const BlochVector<Scalar> viaAmplitudes = to_bloch(analytic_solution(initial, d, t));
  const BlochVector<Scalar> viaBloch = propagate_bloch_segment(to_bloch(initial), d, t);
  return (viaAmplitudes - viaBloch).norm();
}

template <typename Scalar>
Scalar bloch_equivalence_check(const ModeAmplitudes<Scalar>& initial, const DriveParams<Scalar>& d, Scalar t) {
  require_frame(initial, FrameKind::RotatingFrame, "bloch_equivalence_check");
  return bloch_equivalence_check(initial.amplitudes, d, t);
}

}  // namespace mbloch
