#pragma once

// Pointwise algebra of 2-forms on R^4 in an orthonormal frame.

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "gms/reduced.hpp"

namespace gms {

struct TwoForm4 {
  double f12 = 0.0, f13 = 0.0, f14 = 0.0, f23 = 0.0, f24 = 0.0, f34 = 0.0;

  /// sum over i < j of F_ij^2.
  double norm2() const noexcept;
  TwoForm4 operator+(const TwoForm4& o) const noexcept;
  TwoForm4 operator-(const TwoForm4& o) const noexcept;
  TwoForm4 operator*(double s) const noexcept;
};

/// Antisymmetric matrix with entry (i, j) = F_ij for i < j.
Eigen::Matrix4d to_matrix(const TwoForm4& F);
/// Upper triangle of an antisymmetric matrix.
TwoForm4 from_matrix(const Eigen::Matrix4d& M);

/// Coefficient of F ^ F on the volume form: 2 (F12 F34 - F13 F24 + F14 F23).
double wedge_square(const TwoForm4& F);

/// sqrt(1 + |F|^2 + |F ^ F|^2 / 4).
double bi_density(const TwoForm4& F);

/// |det(I - F) - (1 + |F|^2 + |F ^ F|^2 / 4)|.
double det_identity_gap(const TwoForm4& F);

struct SelfDualDecomp {
  TwoForm4 plus;   ///< F12 = F34, F13 = -F24, F14 = F23
  TwoForm4 minus;  ///< F12 = -F34, F13 = F24, F14 = -F23
};

SelfDualDecomp sd_split(const TwoForm4& F);

struct Sandwich {
  double gms = 0.0;
  double bi = 0.0;
  double hodge = 0.0;
};

/// sqrt(1 + |F|^2) <= bi_density(F) <= 1 + |F|^2 / 2.
Sandwich sandwich(const TwoForm4& F);

/// Frobenius distance between the antisymmetric part of (I - tF)^{-1} and
/// (I - (tF)^2)^{-1} tF.
double resolvent_asym_gap(const TwoForm4& F, double t);

/// Frobenius distance between (I - F^2)^{-1} and I / (1 + |F|^2 / 2), for F
/// self-dual or anti-self-dual.
double selfdual_inverse_gap(const TwoForm4& F);

/// sqrt(det(I - F)) (I - F^2)^{-1} F.
Eigen::Matrix4d bi_el_residual(const TwoForm4& F);

/// Born-Infeld energy of F = f dV on the second S^2 factor. F ^ F vanishes for
/// this ansatz, so the value is reduced_energy(f, h, 2).
double reduced_bi_energy(const Profile& f, const HFunction& h);

/// Uniform components in [-bound, bound].
TwoForm4 random_two_form(std::mt19937_64& rng, double bound);
/// Uniform self-dual (or anti-self-dual) form with components in [-bound, bound].
TwoForm4 random_selfdual(std::mt19937_64& rng, double bound, bool anti = false);
/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& rng);

}  // namespace gms
