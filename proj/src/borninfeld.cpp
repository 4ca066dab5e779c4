#include "gms/borninfeld.hpp"

#include <cmath>

#include <Eigen/LU>

#include "gms/errors.hpp"

namespace gms {

double TwoForm4::norm2() const noexcept {
  return f12 * f12 + f13 * f13 + f14 * f14 + f23 * f23 + f24 * f24 + f34 * f34;
}

TwoForm4 TwoForm4::operator+(const TwoForm4& o) const noexcept {
  return {f12 + o.f12, f13 + o.f13, f14 + o.f14, f23 + o.f23, f24 + o.f24, f34 + o.f34};
}

TwoForm4 TwoForm4::operator-(const TwoForm4& o) const noexcept {
  return {f12 - o.f12, f13 - o.f13, f14 - o.f14, f23 - o.f23, f24 - o.f24, f34 - o.f34};
}

TwoForm4 TwoForm4::operator*(double s) const noexcept {
  return {s * f12, s * f13, s * f14, s * f23, s * f24, s * f34};
}

Eigen::Matrix4d to_matrix(const TwoForm4& F) {
  Eigen::Matrix4d M = Eigen::Matrix4d::Zero();
  M(0, 1) = F.f12;
  M(0, 2) = F.f13;
  M(0, 3) = F.f14;
  M(1, 2) = F.f23;
  M(1, 3) = F.f24;
  M(2, 3) = F.f34;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < i; ++j) M(i, j) = -M(j, i);
  return M;
}

TwoForm4 from_matrix(const Eigen::Matrix4d& M) {
  return {M(0, 1), M(0, 2), M(0, 3), M(1, 2), M(1, 3), M(2, 3)};
}

double wedge_square(const TwoForm4& F) {
  return 2.0 * (F.f12 * F.f34 - F.f13 * F.f24 + F.f14 * F.f23);
}

double bi_density(const TwoForm4& F) {
  const double w = wedge_square(F);
  return std::sqrt(1.0 + F.norm2() + 0.25 * w * w);
}

double det_identity_gap(const TwoForm4& F) {
  const Eigen::Matrix4d A = Eigen::Matrix4d::Identity() - to_matrix(F);
  const double w = wedge_square(F);
  return std::abs(A.determinant() - (1.0 + F.norm2() + 0.25 * w * w));
}

SelfDualDecomp sd_split(const TwoForm4& F) {
  SelfDualDecomp s;
  const double a = 0.5 * (F.f12 + F.f34);
  const double b = 0.5 * (F.f13 - F.f24);
  const double c = 0.5 * (F.f14 + F.f23);
  s.plus = {a, b, c, c, -b, a};
  s.minus = F - s.plus;
  return s;
}

Sandwich sandwich(const TwoForm4& F) {
  const double n2 = F.norm2();
  return {std::sqrt(1.0 + n2), bi_density(F), 1.0 + 0.5 * n2};
}

double resolvent_asym_gap(const TwoForm4& F, double t) {
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d tF = t * to_matrix(F);
  const Eigen::Matrix4d inv = (I - tF).inverse();
  const Eigen::Matrix4d asym = 0.5 * (inv - inv.transpose());
  const Eigen::Matrix4d rhs = (I - tF * tF).inverse() * tF;
  return (asym - rhs).norm();
}

double selfdual_inverse_gap(const TwoForm4& F) {
  const auto parts = sd_split(F);
  const double minority = std::sqrt(std::min(parts.plus.norm2(), parts.minus.norm2()));
  if (minority > 1e-12 * std::max(1.0, std::sqrt(F.norm2())))
    throw PreconditionError("selfdual_inverse_gap: F is neither self-dual nor anti-self-dual");
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d M = to_matrix(F);
  return ((I - M * M).inverse() - I / (1.0 + 0.5 * F.norm2())).norm();
}

Eigen::Matrix4d bi_el_residual(const TwoForm4& F) {
  const Eigen::Matrix4d I = Eigen::Matrix4d::Identity();
  const Eigen::Matrix4d M = to_matrix(F);
  const Eigen::Matrix4d flux = std::sqrt((I - M).determinant()) * (I - M * M).inverse() * M;
  return 0.5 * (flux - flux.transpose());
}

double reduced_bi_energy(const Profile& f, const HFunction& h) {
  if (f.k != 2) throw DegreeError("reduced_bi_energy: needs a k = 2 profile");
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double hh = h(f.thetaNodes[i]);
    TwoForm4 F;
    F.f34 = hh * hh * f.values[i];
    if (wedge_square(F) != 0.0) throw InternalError("reduced_bi_energy: F ^ F must vanish for the ansatz");
  }
  return reduced_energy(f, h, 2);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

TwoForm4 random_two_form(std::mt19937_64& rng, double bound) {
  auto u = [&] { return bound * (2.0 * uniform01(rng) - 1.0); };
  TwoForm4 F;
  F.f12 = u();
  F.f13 = u();
  F.f14 = u();
  F.f23 = u();
  F.f24 = u();
  F.f34 = u();
  return F;
}

TwoForm4 random_selfdual(std::mt19937_64& rng, double bound, bool anti) {
  auto u = [&] { return bound * (2.0 * uniform01(rng) - 1.0); };
  const double a = u(), b = u(), c = u();
  const double s = anti ? -1.0 : 1.0;
  return {a, b, c, s * c, -s * b, s * a};
}

}  // namespace gms
