#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "mbloch/errors.hpp"
#include "mbloch/model_core.hpp"
#include "mbloch/rk4.hpp"

namespace mbloch {

template <typename Scalar = double>
struct NewtonState {
  Scalar t{0};
  Scalar xA{0};
  Scalar vA{0};
  Scalar xB{0};
  Scalar vB{0};

  friend bool operator==(const NewtonState&, const NewtonState&) = default;
};

template <typename Scalar = double>
struct NoForce {
  friend bool operator==(const NoForce&, const NoForce&) = default;
};

/// F(t) = amplitude cos(omega t + phase) on oscillator A while t < tOff.
template <typename Scalar = double>
struct SinusoidForce {
  Scalar amplitude{0};
  Scalar omega{0};
  Scalar phase{0};
  Scalar tOff{0};

  friend bool operator==(const SinusoidForce&, const SinusoidForce&) = default;
};

template <typename Scalar = double>
using ForceSpec = std::variant<NoForce<Scalar>, SinusoidForce<Scalar>>;

template <typename Scalar>
Scalar force_at(const ForceSpec<Scalar>& spec, Scalar t) {
  if (const auto* s = std::get_if<SinusoidForce<Scalar>>(&spec)) {
    if (t < s->tOff) return s->amplitude * std::cos(s->omega * t + s->phase);
  }
  return 0;
}

template <typename Scalar = double>
struct NewtonTrajectory {
  std::vector<NewtonState<Scalar>> samples;
  Scalar dt{0};
  int stepsPerCarrierPeriod{0};
  SystemParams<Scalar> params;
  std::function<Scalar(Scalar)> detuning;  ///< dk(t) used during integration
};

template <typename Scalar>
Scalar total_energy(const SystemParams<Scalar>& p, Scalar dkNow, const NewtonState<Scalar>& s) {
  const Scalar kinetic = p.m * (s.vA * s.vA + s.vB * s.vB) / 2;
  const Scalar springs = ((p.k - dkNow) * s.xA * s.xA + (p.k + dkNow) * s.xB * s.xB) / 2;
  const Scalar coupling = p.kappa * (s.xA - s.xB) * (s.xA - s.xB) / 2;
  return kinetic + springs + coupling;
}

template <typename Scalar>
Scalar total_energy(const NewtonTrajectory<Scalar>& traj, std::size_t index) {
  const auto& s = traj.samples.at(index);
  return total_energy(traj.params, traj.detuning(s.t), s);
}

/// RK4 integration of the lab-frame equations of motion with an arbitrary
/// detuning dk(t) and force F(t). Step is 2 pi / (Omega0 stepsPerCarrierPeriod);
/// the last sample is the first grid point at or beyond tEnd.
template <typename Scalar, typename DetuningFn, typename ForceFn>
NewtonTrajectory<Scalar> integrate_with(const SystemParams<Scalar>& p, DetuningFn detuning, ForceFn force,
                                        const NewtonState<Scalar>& initial, Scalar tEnd,
                                        int stepsPerCarrierPeriod) {
  validate(p);
  if (!(tEnd > initial.t)) throw ParameterError("integrate: tEnd must exceed the initial time");
  if (stepsPerCarrierPeriod < 20) throw ParameterError("integrate: need at least 20 steps per carrier period");

  const auto freqs = derive_frequencies(p);
  const Scalar dt = 2 * std::numbers::pi_v<Scalar> / (freqs.omega0 * stepsPerCarrierPeriod);
  const Scalar span = (tEnd - initial.t) / dt;
  long steps = static_cast<long>(std::ceil(span));
  if (steps > 0 && span - static_cast<Scalar>(steps - 1) < Scalar(1e-9)) --steps;
  if (steps < 1) steps = 1;

  using State = Eigen::Matrix<Scalar, 4, 1>;
  const Scalar inv_m = 1 / p.m;
  const auto rhs = [&](Scalar t, const State& y) -> State {
    const Scalar dk = detuning(t);
    State d;
    d(0) = y(1);
    d(1) = (-(p.k + p.kappa - dk) * y(0) + p.kappa * y(2) + force(t)) * inv_m - p.gamma * y(1);
    d(2) = y(3);
    d(3) = (-(p.k + p.kappa + dk) * y(2) + p.kappa * y(0)) * inv_m - p.gamma * y(3);
    return d;
  };

  NewtonTrajectory<Scalar> traj;
  traj.dt = dt;
  traj.stepsPerCarrierPeriod = stepsPerCarrierPeriod;
  traj.params = p;
  traj.detuning = std::function<Scalar(Scalar)>(detuning);
  traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
  traj.samples.push_back(initial);

  State y(initial.xA, initial.vA, initial.xB, initial.vB);
  for (long i = 0; i < steps; ++i) {
    const Scalar t = initial.t + static_cast<Scalar>(i) * dt;
    y = rk4_step(rhs, t, y, dt);
    const Scalar tNext = initial.t + static_cast<Scalar>(i + 1) * dt;
    if (!y.allFinite()) throw DivergenceError(static_cast<double>(tNext), "integrate: non-finite state");
    traj.samples.push_back({tNext, y(0), y(1), y(2), y(3)});
  }
  return traj;
}

template <typename Scalar>
NewtonTrajectory<Scalar> integrate(const SystemParams<Scalar>& p, const DetuningSpec<Scalar>& detuning,
                                   const ForceSpec<Scalar>& force, const NewtonState<Scalar>& initial,
                                   Scalar tEnd, int stepsPerCarrierPeriod) {
  return integrate_with(
      p, [p, detuning](Scalar t) { return detuning_at(p, detuning, t); },
      [force](Scalar t) { return force_at(force, t); }, initial, tEnd, stepsPerCarrierPeriod);
}

/// Lab-frame state whose demodulated envelopes read (a0, b0) at time t0.
///
/// Each resonant mode rings at its own eigenfrequency Omega_m rather than at
/// Omega0, so the Omega0-quadrature reading of a mode of amplitude X averages
/// to X (1 + Omega_m/Omega0)/2. The amplitude is prescaled by the inverse of
/// that factor; for Omega_m = Omega0 this is x = Re a0, xdot = -Omega0 Im a0.
template <typename Scalar>
NewtonState<Scalar> prepare_state(const SystemParams<Scalar>& p, std::complex<Scalar> a0,
                                  std::complex<Scalar> b0, Scalar t0 = 0) {
  const auto freqs = derive_frequencies(p);
  const Vector2<Scalar> modeOmega = resonant_mode_frequencies(p);
  const std::complex<Scalar> carrier = std::polar(Scalar(1), freqs.omega0 * t0);

  Vector2<Scalar> x, v;
  const std::complex<Scalar> z[2] = {a0 * carrier, b0 * carrier};
  for (int i = 0; i < 2; ++i) {
    const Scalar scale = 2 * freqs.omega0 / (freqs.omega0 + modeOmega(i));
    x(i) = scale * z[i].real();
    v(i) = -modeOmega(i) * scale * z[i].imag();
  }
  const Vector2<Scalar> pos = modes_to_oscillators(x);
  const Vector2<Scalar> vel = modes_to_oscillators(v);
  return {t0, pos(0), vel(0), pos(1), vel(1)};
}

template <typename Scalar = double>
struct EnvelopeSeries {
  std::vector<Scalar> t;
  std::vector<std::complex<Scalar>> a;
  std::vector<std::complex<Scalar>> b;
  Scalar driveOmega{0};  ///< 0: lab envelopes; otherwise rotating-frame amplitudes
};

/// Velocity-quadrature envelopes of the resonant modes x+ = xA + xB and
/// x- = xA - xB:
///   a(t) = (x+ - i xdot+/Omega0) exp(-i (frameOmega - driveOmega/2) t)
///   b(t) = (x- - i xdot-/Omega0) exp(-i (frameOmega + driveOmega/2) t)
/// followed by a rectangular moving average over windowPeriods carrier
/// periods (0 disables smoothing). Smoothed samples are stamped with the
/// window's centre time. With driveOmega != 0 the output is already in the
/// frame rotating with the drive.
template <typename Scalar>
EnvelopeSeries<Scalar> demodulate(const NewtonTrajectory<Scalar>& traj, Scalar frameOmega,
                                  int windowPeriods = 1, Scalar driveOmega = 0) {
  if (windowPeriods < 0) throw ParameterError("demodulate: window must be non-negative");
  if (traj.samples.empty()) throw ParameterError("demodulate: empty trajectory");
  const Scalar omega0 = derive_frequencies(traj.params).omega0;
  const std::size_t n = traj.samples.size();
  const std::size_t window = windowPeriods == 0 ? 1 : static_cast<std::size_t>(windowPeriods) *
                                                          static_cast<std::size_t>(traj.stepsPerCarrierPeriod);
  if (window > n) throw ParameterError("demodulate: smoothing window longer than trajectory");

  std::vector<std::complex<Scalar>> rawA(n), rawB(n);
  const Scalar omegaA = frameOmega - driveOmega / 2;
  const Scalar omegaB = frameOmega + driveOmega / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = traj.samples[i];
    const Scalar xp = s.xA + s.xB, vp = s.vA + s.vB;
    const Scalar xm = s.xA - s.xB, vm = s.vA - s.vB;
    rawA[i] = std::complex<Scalar>(xp, -vp / omega0) * std::polar(Scalar(1), -omegaA * s.t);
    rawB[i] = std::complex<Scalar>(xm, -vm / omega0) * std::polar(Scalar(1), -omegaB * s.t);
  }

  EnvelopeSeries<Scalar> out;
  out.driveOmega = driveOmega;
  const std::size_t m = n - window + 1;
  out.t.resize(m);
  out.a.resize(m);
  out.b.resize(m);
  const Scalar centre = static_cast<Scalar>(window - 1) * traj.dt / 2;
  // running sums are refreshed periodically to bound accumulated rounding
  std::complex<Scalar> sumA{}, sumB{};
  for (std::size_t j = 0; j < m; ++j) {
    if (j % 4096 == 0) {
      sumA = {};
      sumB = {};
      for (std::size_t i = j; i < j + window; ++i) {
        sumA += rawA[i];
        sumB += rawB[i];
      }
    } else {
      sumA += rawA[j + window - 1] - rawA[j - 1];
      sumB += rawB[j + window - 1] - rawB[j - 1];
    }
    out.t[j] = traj.samples[j].t + centre;
    out.a[j] = sumA / static_cast<Scalar>(window);
    out.b[j] = sumB / static_cast<Scalar>(window);
  }
  return out;
}

}  // namespace mbloch
