#pragma once

// Nonlinear Hodge energies E(alpha) = sum_faces F(|alpha|_g) vol_g with
// F'(q) = q rho(q), and their first and second variations in the potential u
// of alpha = aStar + d u.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gms/exterior.hpp"

namespace gms {

enum class RhoKind { GMS, TGMS, Linear, Custom };

/// A density rho(q) of the nonlinear Hodge equation d*(rho(|alpha|) alpha) = 0,
/// together with rho_plus(q) = rho(q) + rho'(q) q.
class RhoModel {
 public:
  using Fn = std::function<double(double)>;

  /// rho = (1 + q^2)^{-1/2}; F = sqrt(1 + q^2).
  static RhoModel gms();
  /// rho = (t^{-2} + q^2)^{-1/2}; F = sqrt(t^{-2} + q^2).
  static RhoModel tgms(double t);
  /// rho = 1; F = q^2 / 2.
  static RhoModel linear();
  /// F is recovered by quadrature of s rho(s) on [0, q].
  static RhoModel custom(Fn rho, Fn rho_plus, std::string name = "custom");

  RhoKind kind() const noexcept { return kind_; }
  double t() const noexcept { return t_; }
  const std::string& name() const noexcept { return name_; }

  double rho(double q) const;
  double rho_plus(double q) const;
  double density(double q) const;
  /// rho'(q) / q, the coefficient of the rank-one part of the Hessian.
  double rho_prime_over_q(double q) const;

 private:
  RhoModel(RhoKind kind, double t, Fn rho, Fn rho_plus, std::string name);

  RhoKind kind_;
  double t_;
  Fn rho_;
  Fn rho_plus_;
  std::string name_;
};

struct EnergyReport {
  double value = 0.0;
  double tvValue = 0.0;
  double maxPointwiseNorm = 0.0;
};

EnergyReport total_energy(const Cochain& a, const ConformalMetric& m, const RhoModel& model);

/// The 0-cochain g with <g, psi>_0 = dE/de at e = 0 along u + e psi; this
/// is the discrete d*(rho(|alpha|) alpha) for alpha = aStar + d u.
Cochain grad_potential(const Cochain& u, const Cochain& aStar, const ConformalMetric& m,
                       const RhoModel& model);

/// H v with <H v, v>_0 = d^2E/de^2 along u + e v.
Cochain hessian_apply(const Cochain& u, const Cochain& v, const Cochain& aStar,
                      const ConformalMetric& m, const RhoModel& model);

/// sum_faces |d v|_g^2 (1 + |alpha|_g^2)^{-3/2} vol_g, the strict-convexity
/// floor for the GMS second variation.
double convexity_lower_bound(const Cochain& u, const Cochain& v, const Cochain& aStar,
                             const ConformalMetric& m);

struct AdmissibilityReport {
  double c = 0.0;
  double kLower = 0.0;  // min of rho, rho_plus on (0, c]
  double kUpper = 0.0;  // max of rho, rho_plus on (0, c]
  double k = 0.0;       // max(kUpper, 1 / kLower)
  bool admissible = false;
  bool regular = false;
  /// (c * 2^m, kUpper / kLower) along the doubling schedule.
  std::vector<std::pair<double, double>> regularityIndicator;
};

/// Sampling probe of the admissibility bounds. Heuristic: extrema are taken
/// over nSamples equispaced points of (0, c], endpoint included.
AdmissibilityReport admissibility_probe(const RhoModel& model, double c, int nSamples,
                                        int doublings = 16);

}  // namespace gms
