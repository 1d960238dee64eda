#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "mbloch/errors.hpp"

namespace mbloch {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;

/// Two equal masses on springs k -/+ dk, joined by a coupling spring kappa,
/// both damped at rate gamma (velocity damping).
template <typename Scalar = double>
struct SystemParams {
  Scalar m{1};
  Scalar k{1};
  Scalar kappa{0};
  Scalar gamma{0};

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

template <typename Scalar>
void validate(const SystemParams<Scalar>& p) {
  using std::isfinite;
  if (!isfinite(p.m) || !(p.m > 0)) throw ParameterError("mass must be positive and finite");
  if (!isfinite(p.k) || !(p.k > 0)) throw ParameterError("spring constant k must be positive and finite");
  if (!isfinite(p.kappa) || p.kappa < 0) throw ParameterError("coupling kappa must be >= 0 and finite");
  if (!isfinite(p.gamma) || p.gamma < 0) throw ParameterError("damping gamma must be >= 0 and finite");
}

/// Non-fatal diagnostics. The envelope picture assumes kappa << k and
/// gamma << Omega0; large ratios are reported here but never rejected.
template <typename Scalar>
std::vector<std::string> validation_warnings(const SystemParams<Scalar>& p) {
  std::vector<std::string> out;
  if (p.kappa > Scalar(0.1) * p.k) out.emplace_back("coupling is not weak (kappa > 0.1 k)");
  const Scalar omega0 = std::sqrt((p.k + p.kappa) / p.m);
  if (p.gamma > Scalar(0.01) * omega0) out.emplace_back("damping is not weak (gamma > 0.01 Omega0)");
  return out;
}

template <typename Scalar = double>
struct DerivedFrequencies {
  Scalar omega0;            ///< carrier, sqrt((k + kappa)/m)
  Scalar omegaC2;           ///< kappa/m
  Scalar deltaOmegaExact;   ///< sqrt((k + 2 kappa)/m) - sqrt(k/m)
  Scalar deltaOmegaApprox;  ///< omegaC2 / omega0
};

template <typename Scalar>
DerivedFrequencies<Scalar> derive_frequencies(const SystemParams<Scalar>& p) {
  validate(p);
  DerivedFrequencies<Scalar> f;
  f.omega0 = std::sqrt((p.k + p.kappa) / p.m);
  f.omegaC2 = p.kappa / p.m;
  // difference of square roots without cancellation
  const Scalar upper = std::sqrt((p.k + 2 * p.kappa) / p.m);
  const Scalar lower = std::sqrt(p.k / p.m);
  f.deltaOmegaExact = (2 * p.kappa / p.m) / (upper + lower);
  f.deltaOmegaApprox = f.omegaC2 / f.omega0;
  return f;
}

/// Eigenfrequencies of the symmetric (x+) and antisymmetric (x-) modes at
/// zero detuning. These are the frequencies the resonant modes actually ring at.
template <typename Scalar>
Vector2<Scalar> resonant_mode_frequencies(const SystemParams<Scalar>& p) {
  validate(p);
  return {std::sqrt(p.k / p.m), std::sqrt((p.k + 2 * p.kappa) / p.m)};
}

template <typename Scalar = double>
struct ConstantDetuning {
  Scalar dk{0};
  friend bool operator==(const ConstantDetuning&, const ConstantDetuning&) = default;
};

/// dk(t) = -2 Omega0 m A cos(omegaDrive t + phase)
template <typename Scalar = double>
struct HarmonicDetuning {
  Scalar amplitude{0};
  Scalar omegaDrive{0};
  Scalar phase{0};
  friend bool operator==(const HarmonicDetuning&, const HarmonicDetuning&) = default;
};

template <typename Scalar = double>
using DetuningSpec = std::variant<ConstantDetuning<Scalar>, HarmonicDetuning<Scalar>>;

template <typename Scalar>
Scalar harmonic_detuning_at(const SystemParams<Scalar>& p, const HarmonicDetuning<Scalar>& h,
                            Scalar t) {
  const Scalar omega0 = std::sqrt((p.k + p.kappa) / p.m);
  return -2 * omega0 * p.m * h.amplitude * std::cos(h.omegaDrive * t + h.phase);
}

template <typename Scalar>
Scalar detuning_at(const SystemParams<Scalar>& p, const DetuningSpec<Scalar>& spec, Scalar t) {
  if (const auto* c = std::get_if<ConstantDetuning<Scalar>>(&spec)) return c->dk;
  return harmonic_detuning_at(p, std::get<HarmonicDetuning<Scalar>>(spec), t);
}

template <typename Scalar = double>
struct EigenFrequencies {
  Scalar plus;   ///< lower branch
  Scalar minus;  ///< upper branch
};

template <typename Scalar>
EigenFrequencies<Scalar> eigenfrequencies(const SystemParams<Scalar>& p, Scalar dk) {
  validate(p);
  const Scalar omega0Sq = (p.k + p.kappa) / p.m;
  const Scalar split = std::hypot(dk / p.m, p.kappa / p.m);
  const Scalar lowRadicand = omega0Sq - split;
  if (!(lowRadicand >= 0))
    throw DomainError("imaginary eigenfrequency: Omega0^2 - sqrt(Omega_d^4 + Omega_c^4) = " +
                      std::to_string(static_cast<double>(lowRadicand)) + " < 0");
  return {std::sqrt(lowRadicand), std::sqrt(omega0Sq + split)};
}

/// The 2x2 matrix added to (d^2/dt^2 + gamma d/dt + Omega0^2) in the
/// oscillator equations of motion: [[-Od^2, -Oc^2], [-Oc^2, Od^2]].
template <typename Scalar>
Matrix2<Scalar> coupling_matrix(const SystemParams<Scalar>& p, Scalar dk) {
  const Scalar od2 = dk / p.m;
  const Scalar oc2 = p.kappa / p.m;
  Matrix2<Scalar> mat;
  mat << -od2, -oc2, -oc2, od2;
  return mat;
}

/// Rows are the (unnormalized, first component 1) eigenvectors of
/// coupling_matrix: row 0 belongs to Omega+, row 1 to Omega-.
template <typename Scalar>
Matrix2<Scalar> transform_matrix(const SystemParams<Scalar>& p, Scalar dk) {
  validate(p);
  Matrix2<Scalar> u;
  if (dk == 0) {
    u << 1, 1, 1, -1;
    return u;
  }
  if (p.kappa == 0) throw DegenerateTransformError("eigenmode transform undefined for kappa = 0 and dk != 0");

  const Scalar r2 = dk / p.kappa;  // (Od/Oc)^2, signed
  const Scalar root = std::sqrt(1 + r2 * r2);
  // -r2 + root and -r2 - root; pick the cancellation-free form per sign
  const Scalar upper = r2 > 0 ? Scalar(1) / (root + r2) : root - r2;
  const Scalar lower = r2 > 0 ? -(root + r2) : Scalar(-1) / (root - r2);
  u << 1, upper, 1, lower;
  return u;
}

/// transform_matrix with each row scaled to unit length.
template <typename Scalar>
Matrix2<Scalar> orthonormal_transform(const SystemParams<Scalar>& p, Scalar dk) {
  Matrix2<Scalar> u = transform_matrix(p, dk);
  u.rowwise().normalize();
  return u;
}

/// (xA, xB) -> (x+, x-) = (xA + xB, xA - xB)
template <typename Derived>
auto oscillators_to_modes(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return Vector2<Scalar>(x(0) + x(1), x(0) - x(1));
}

/// Inverse of oscillators_to_modes. The forward map is not unitary, so the
/// inverse carries the factor 1/2.
template <typename Derived>
auto modes_to_oscillators(const Eigen::MatrixBase<Derived>& modes) {
  using Scalar = typename Derived::Scalar;
  return Vector2<Scalar>((modes(0) + modes(1)) / 2, (modes(0) - modes(1)) / 2);
}

}  // namespace mbloch
