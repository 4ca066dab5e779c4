#pragma once

// Preconditioned conjugate gradients for the symmetric positive
// semidefinite vertex systems that appear in this library. Their only null
// direction is the constant vector, so residuals are kept mean-free.

#include <functional>
#include <span>
#include <vector>

namespace gms::detail {

using LinearOperator = std::function<void(std::span<const double>, std::span<double>)>;

struct CgResult {
  int iterations = 0;
  double residual = 0.0;  // final ||r||_2
  bool converged = false;
};

/// Solves A x = b from the given x. Stops when ||r||_2 <= tol_abs.
/// Throws InternalError when p^T A p is non-positive beyond round-off.
CgResult conjugate_gradient(const LinearOperator& apply, std::span<const double> b,
                            std::span<const double> inv_diag, std::span<double> x,
                            double tol_abs, int max_iterations);

void remove_mean(std::span<double> v);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double norm_inf(std::span<const double> a);

}  // namespace gms::detail
