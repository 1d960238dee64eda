#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mbloch/errors.hpp"
#include "mbloch/model_core.hpp"
#include "mbloch/rk4.hpp"

namespace mbloch {

template <typename Scalar>
using Vector2c = Eigen::Matrix<std::complex<Scalar>, 2, 1>;
template <typename Scalar>
using Matrix2c = Eigen::Matrix<std::complex<Scalar>, 2, 2>;

enum class FrameKind { LabEnvelope, RotatingFrame };

template <typename Scalar = double>
struct Frame {
  FrameKind kind{FrameKind::LabEnvelope};
  Scalar omegaDrive{0};

  static Frame lab() { return {FrameKind::LabEnvelope, 0}; }
  static Frame rotating(Scalar omegaDrive) { return {FrameKind::RotatingFrame, omegaDrive}; }
};

/// Complex envelope pair of the symmetric and antisymmetric modes, tagged with
/// the frame it is expressed in.
template <typename Scalar = double>
struct ModeAmplitudes {
  Vector2c<Scalar> amplitudes{Vector2c<Scalar>::Zero()};
  Scalar t{0};
  Frame<Scalar> frame{};

  std::complex<Scalar> a() const { return amplitudes(0); }
  std::complex<Scalar> b() const { return amplitudes(1); }
  Scalar norm2() const { return amplitudes.squaredNorm(); }
};

template <typename Scalar>
void require_frame(const ModeAmplitudes<Scalar>& s, FrameKind kind, const char* who) {
  if (s.frame.kind != kind)
    throw ContractError(std::string(who) +
                        (kind == FrameKind::LabEnvelope ? ": expected lab-frame envelopes"
                                                        : ": expected rotating-frame amplitudes"));
}

/// Drive as seen in the rotating frame. A may be negative (drive phase
/// flipped by pi); delta = DeltaOmega - omegaDrive.
template <typename Scalar = double>
struct DriveParams {
  Scalar A{0};
  Scalar delta{0};
  Scalar gamma{0};

  friend bool operator==(const DriveParams&, const DriveParams&) = default;
};

template <typename Scalar>
Scalar rabi_frequency(const DriveParams<Scalar>& d) {
  return std::hypot(d.A, d.delta);
}

/// omega_d = Omega_d^2 / Omega0 = dk / (m Omega0)
template <typename Scalar>
Scalar rescaled_detuning(const SystemParams<Scalar>& p, Scalar dk) {
  return dk / (p.m * derive_frequencies(p).omega0);
}

// --- lab envelopes -------------------------------------------------------

/// Generator G with d/dt (a, b) = G (a, b):
/// G = -i/2 [[dOmega - i gamma, w_d], [w_d, -dOmega - i gamma]]
template <typename Scalar>
Matrix2c<Scalar> svea_generator(Scalar omegaD, Scalar deltaOmega, Scalar gamma) {
  using C = std::complex<Scalar>;
  const C minusHalfI(0, Scalar(-0.5));
  Matrix2c<Scalar> h;
  h << C(deltaOmega, -gamma), C(omegaD, 0), C(omegaD, 0), C(-deltaOmega, -gamma);
  return minusHalfI * h;
}

template <typename Scalar>
Vector2c<Scalar> svea_rhs(const ModeAmplitudes<Scalar>& state, Scalar omegaD, Scalar deltaOmega, Scalar gamma) {
  require_frame(state, FrameKind::LabEnvelope, "svea_rhs");
  return svea_generator(omegaD, deltaOmega, gamma) * state.amplitudes;
}

/// RK4 propagation of the lab envelope equations with the full two-sideband
/// harmonic drive, w_d(t) = -2 A cos(omegaDrive t + phase). No rotating-wave
/// approximation. Uses DeltaOmega = deltaOmegaExact and gamma from params.
/// Returns one state per step, starting with the initial one.
template <typename Scalar>
std::vector<ModeAmplitudes<Scalar>> propagate_envelope_exactdrive(const ModeAmplitudes<Scalar>& initial,
                                                                  const SystemParams<Scalar>& p,
                                                                  const HarmonicDetuning<Scalar>& drive,
                                                                  Scalar tEnd, int stepsPerPeriod = 200) {
  require_frame(initial, FrameKind::LabEnvelope, "propagate_envelope_exactdrive");
  if (!(tEnd > initial.t)) throw ParameterError("propagate_envelope_exactdrive: tEnd must exceed initial time");
  if (stepsPerPeriod < 20) throw ParameterError("propagate_envelope_exactdrive: need >= 20 steps per period");

  const auto freqs = derive_frequencies(p);
  const Scalar deltaOmega = freqs.deltaOmegaExact;
  using std::abs;
  Scalar fastest = std::max({abs(drive.omegaDrive), deltaOmega, 2 * abs(drive.amplitude), p.gamma});
  if (!(fastest > 0)) fastest = 1;
  const Scalar period = 2 * std::numbers::pi_v<Scalar> / fastest;
  const long steps = static_cast<long>(std::ceil((tEnd - initial.t) / period * stepsPerPeriod));
  const Scalar h = (tEnd - initial.t) / static_cast<Scalar>(steps);

  const auto rhs = [&](Scalar t, const Vector2c<Scalar>& y) -> Vector2c<Scalar> {
    const Scalar omegaD = -2 * drive.amplitude * std::cos(drive.omegaDrive * t + drive.phase);
    return svea_generator(omegaD, deltaOmega, p.gamma) * y;
  };

  std::vector<ModeAmplitudes<Scalar>> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  out.push_back(initial);
  Vector2c<Scalar> y = initial.amplitudes;
  for (long i = 0; i < steps; ++i) {
    const Scalar t = initial.t + static_cast<Scalar>(i) * h;
    y = rk4_step(rhs, t, y, h);
    const Scalar tNext = initial.t + static_cast<Scalar>(i + 1) * h;
    if (!y.allFinite()) throw DivergenceError(static_cast<double>(tNext), "envelope propagation diverged");
    out.push_back({y, tNext, Frame<Scalar>::lab()});
  }
  return out;
}

// --- rotating frame ------------------------------------------------------

/// a_bar = a exp(+i w t/2), b_bar = b exp(-i w t/2)
template <typename Scalar>
ModeAmplitudes<Scalar> to_rotating_frame(const ModeAmplitudes<Scalar>& state, Scalar omegaDrive) {
  require_frame(state, FrameKind::LabEnvelope, "to_rotating_frame");
  const std::complex<Scalar> phase = std::polar(Scalar(1), omegaDrive * state.t / 2);
  ModeAmplitudes<Scalar> out{state.amplitudes, state.t, Frame<Scalar>::rotating(omegaDrive)};
  out.amplitudes(0) *= phase;
  out.amplitudes(1) *= std::conj(phase);
  return out;
}

template <typename Scalar>
ModeAmplitudes<Scalar> to_lab_envelope(const ModeAmplitudes<Scalar>& state) {
  require_frame(state, FrameKind::RotatingFrame, "to_lab_envelope");
  const std::complex<Scalar> phase = std::polar(Scalar(1), state.frame.omegaDrive * state.t / 2);
  ModeAmplitudes<Scalar> out{state.amplitudes, state.t, Frame<Scalar>::lab()};
  out.amplitudes(0) *= std::conj(phase);
  out.amplitudes(1) *= phase;
  return out;
}

/// Rotating-wave generator: -i/2 [[delta - i gamma, -A], [-A, -delta - i gamma]]
template <typename Scalar>
Matrix2c<Scalar> rwa_generator(const DriveParams<Scalar>& d) {
  using C = std::complex<Scalar>;
  Matrix2c<Scalar> h;
  h << C(d.delta, -d.gamma), C(-d.A, 0), C(-d.A, 0), C(-d.delta, -d.gamma);
  return C(0, Scalar(-0.5)) * h;
}

template <typename Scalar>
Vector2c<Scalar> rwa_rhs(const ModeAmplitudes<Scalar>& state, const DriveParams<Scalar>& d) {
  require_frame(state, FrameKind::RotatingFrame, "rwa_rhs");
  return rwa_generator(d) * state.amplitudes;
}

/// Closed-form propagator of the rotating-wave equations over a time t.
/// sin(Omega_R t/2)/Omega_R is replaced by its t/2 limit when Omega_R t < 1e-6.
template <typename Scalar>
Matrix2c<Scalar> rwa_propagator(const DriveParams<Scalar>& d, Scalar t) {
  using C = std::complex<Scalar>;
  const Scalar omegaR = rabi_frequency(d);
  const Scalar c = std::cos(omegaR * t / 2);
  const Scalar sincHalf = omegaR * t < Scalar(1e-6) ? t / 2 : std::sin(omegaR * t / 2) / omegaR;
  const Scalar decay = std::exp(-d.gamma * t / 2);

  const C off(0, d.A * sincHalf);
  Matrix2c<Scalar> u;
  u << C(c, -d.delta * sincHalf), off, off, C(c, d.delta * sincHalf);
  return decay * u;
}

template <typename Scalar>
Vector2c<Scalar> analytic_solution(const Vector2c<Scalar>& initial, const DriveParams<Scalar>& d, Scalar t) {
  return rwa_propagator(d, t) * initial;
}

template <typename Scalar>
ModeAmplitudes<Scalar> analytic_solution(const ModeAmplitudes<Scalar>& initial, const DriveParams<Scalar>& d,
                                         Scalar t) {
  require_frame(initial, FrameKind::RotatingFrame, "analytic_solution");
  return {analytic_solution(initial.amplitudes, d, t), initial.t + t, initial.frame};
}

}  // namespace mbloch
