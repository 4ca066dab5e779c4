#pragma once

#include <functional>
#include <vector>

namespace gms {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order (10 or 20) mapped to [a, b].
QuadratureRule gauss_legendre(double a, double b, int order);

/// Composite Gauss-Legendre rule on (0, pi) with geometric panels toward both
/// endpoints: `panels_per_half` panels on each half, the smallest of width
/// about 1e-8 * pi/2.
QuadratureRule graded_rule(int panels_per_half, int order);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]: the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// rel_tol * |value| (floored at 50 eps * l1) or max_splits is reached.
IntegralEstimate adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, int max_splits = 2000);

}  // namespace gms
