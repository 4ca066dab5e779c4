#pragma once

// The S^k x S^k problem reduced to profiles f(theta) on [0, pi], where the
// form is alpha = f(theta) dV of the second sphere factor and the metric is
// g_h = h^{-2} g_E.

#include <limits>
#include <utility>
#include <vector>

#include "gms/hfunction.hpp"

namespace gms {

/// Volume of the unit k-sphere, with omega_0 = 2.
double sphere_volume(int k);

/// h(0)^{-k}.
double c_star(const HFunction& h, int k);

/// Node values of a profile together with the quadrature that integrates
/// against sin^{k-1}(theta) d theta.
struct Profile {
  int k = 1;
  std::vector<double> thetaNodes;
  std::vector<double> weights;
  std::vector<double> values;

  std::size_t size() const noexcept { return thetaNodes.size(); }
};

/// Zero profile on a graded Gauss-Legendre grid of `nodes` points, clustered
/// toward both endpoints. `nodes` must be a positive multiple of 40.
Profile make_profile(int k, int nodes);

/// c / sqrt(1 - c^2 h^{2k}(theta)).
double f_closed_at(double c, const HFunction& h, int k, double theta);

/// The closed-form family sampled on the nodes of `grid`.
Profile f_closed(double c, const HFunction& h, int k, const Profile& grid);

/// (omega_{k-1} / omega_k) * integral of f_c sin^{k-1}.
double kappa_of_c(double c, const HFunction& h, int k, double tol = 1e-13);

struct ThresholdReport {
  double cStar = 0.0;
  double kappaStar = std::numeric_limits<double>::infinity();
  bool divergent = true;
  /// (level, estimate of the integral truncated at (pi/2) 4^{-level} from each end).
  std::vector<std::pair<int, double>> refinementTrace;
};

/// The limit of kappa_of_c as c approaches c_star.
ThresholdReport kappa_star(const HFunction& h, int k, double tol = 1e-6, int maxLevel = 20);

/// Inverse of kappa_of_c. `tol` bounds |kappa_of_c(c) - kappa|.
double c_for_kappa(double kappa, const HFunction& h, int k, double tol = 1e-13);

/// omega_k omega_{k-1} * integral of sqrt(1 + h^{2k} f^2) h^{-2k} sin^{k-1}.
double reduced_energy(const Profile& f, const HFunction& h, int k);

/// (omega_{k-1} / omega_k) * integral of f sin^{k-1} on the profile's quadrature.
double profile_kappa(const Profile& f);

struct ReducedConfig {
  double tol = 1e-12;  ///< on max |f / sqrt(1 + h^{2k} f^2) - c|
  int maxIter = 200;
  bool checkThreshold = true;
};

struct ReducedSolution {
  Profile profile;
  /// Lagrange multiplier normalized so that it equals c at the optimum.
  double multiplier = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  double constraintResidual = 0.0;
};

/// Minimizes reduced_energy subject to profile_kappa(f) = kappa on the nodes of
/// `grid` by Newton's method on the Lagrange system.
ReducedSolution reduced_minimize(double kappa, const HFunction& h, int k, const Profile& grid,
                                 const ReducedConfig& cfg = {});

}  // namespace gms
