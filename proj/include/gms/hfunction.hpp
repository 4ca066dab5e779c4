#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gms/exterior.hpp"

namespace gms {

/// Conformal factor h(theta) on [0, pi], maximal at theta = 0.
///
/// Besides h itself every instance can evaluate drop(theta) = h(0) - h(theta)
/// without cancellation for the built-in and tabulated forms, which is what
/// the near-critical integrands depend on.
class HFunction {
 public:
  using Fn = std::function<double(double)>;

  /// h^2 = 1 + cos^2(theta).
  static HFunction one_plus_cos_squared();
  static HFunction constant(double value = 1.0);
  /// Monotone cubic (Fritsch-Carlson) interpolation of (theta, h) samples
  /// covering [0, pi]. The table is reflected about both endpoints, so
  /// h'(0) = h'(pi) = 0 exactly.
  static HFunction from_table(std::vector<double> theta, std::vector<double> h);
  /// CSV with header `theta,h`.
  static HFunction from_csv(const std::string& path);
  /// Arbitrary callable. Endpoint slopes come from one-sided differences;
  /// drop() switches to a quadratic endpoint model where h(0) - h cancels.
  static HFunction from_callable(Fn h, std::string name = "callable");

  double operator()(double theta) const { return h_(theta); }
  double drop(double theta) const { return drop_(theta); }
  double h_max() const noexcept { return h_max_; }
  double h_prime0() const noexcept { return h_prime0_; }
  double h_prime_pi() const noexcept { return h_prime_pi_; }
  bool strict_maximum() const noexcept { return strict_max_; }
  const std::string& name() const noexcept { return name_; }

  /// 1 - (h(theta) / h(0))^{2k}, computed from drop().
  double deficit(double theta, int k) const;

  /// Even extension to a theta2 sampler on [-pi, pi]: theta2 -> h(|theta2|).
  HSampler even_sampler() const;

 private:
  HFunction(Fn h, Fn drop, double h_prime0, double h_prime_pi, std::string name);

  Fn h_;
  Fn drop_;
  double h_max_;
  double h_prime0_;
  double h_prime_pi_;
  bool strict_max_ = false;
  std::string name_;
};

}  // namespace gms
