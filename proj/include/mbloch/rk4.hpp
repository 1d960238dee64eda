#pragma once

namespace mbloch {

/// One classical 4th-order Runge-Kutta step for y' = rhs(t, y).
/// State is any Eigen vector type; rhs must return something assignable to it.
template <typename State, typename Scalar, typename Rhs>
State rk4_step(const Rhs& rhs, Scalar t, const State& y, Scalar h) {
  const Scalar half = h / 2;
  const State k1 = rhs(t, y);
  const State k2 = rhs(t + half, State(y + half * k1));
  const State k3 = rhs(t + half, State(y + half * k2));
  const State k4 = rhs(t + h, State(y + h * k3));
  return y + (h / 6) * (k1 + Scalar(2) * (k2 + k3) + k4);
}

/// Fixed-step integration over [t0, t0 + steps * h]; returns the final state.
template <typename State, typename Scalar, typename Rhs>
State rk4_integrate(const Rhs& rhs, Scalar t0, State y, Scalar h, long steps) {
  for (long i = 0; i < steps; ++i) y = rk4_step(rhs, t0 + static_cast<Scalar>(i) * h, y, h);
  return y;
}

}  // namespace mbloch
