#include "linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gms/errors.hpp"

namespace gms::detail {

void remove_mean(std::span<double> v) {
  if (v.empty()) return;
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= mean;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

CgResult conjugate_gradient(const LinearOperator& apply, std::span<const double> b,
                            std::span<const double> inv_diag, std::span<double> x,
                            double tol_abs, int max_iterations) {
  const std::size_t n = b.size();
  std::vector<double> r(n), z(n), p(n), ap(n);

  apply(x, ap);
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
  remove_mean(r);

  CgResult result;
  result.residual = norm2(r);
  if (result.residual <= tol_abs) {
    result.converged = true;
    return result;
  }

  for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  p = z;
  double rz = dot(r, z);

  for (int it = 1; it <= max_iterations; ++it) {
    apply(p, ap);
    const double curvature = dot(p, ap);
    const double pp = dot(p, p);
    if (!(curvature > 0.0)) {
      // A zero curvature on a (numerically) constant direction is harmless.
      std::vector<double> pc(p);
      remove_mean(pc);
      if (dot(pc, pc) <= 1e-24 * pp) break;
      throw InternalError("conjugate gradient breakdown: non-positive curvature " +
                          std::to_string(curvature));
    }
    const double step = rz / curvature;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += step * p[i];
      r[i] -= step * ap[i];
    }
    remove_mean(r);
    result.iterations = it;
    result.residual = norm2(r);
    if (result.residual <= tol_abs) {
      result.converged = true;
      return result;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return result;
}

}  // namespace gms::detail
