#include "gms/hfunction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <string_view>

#include "gms/errors.hpp"

namespace gms {

namespace {

constexpr double kPi = std::numbers::pi;

// Monotone piecewise-cubic Hermite interpolant with zero end slopes.
struct Pchip {
  std::vector<double> x, y, slope;

  Pchip(std::vector<double> xs, std::vector<double> ys) : x(std::move(xs)), y(std::move(ys)) {
    const std::size_t n = x.size();
    std::vector<double> secant(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    slope.assign(n, 0.0);
    // Endpoints: the reflected neighbour has the opposite secant, so the
    // harmonic-mean rule gives zero.
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double s0 = secant[i - 1], s1 = secant[i];
      if (s0 * s1 <= 0.0) continue;
      const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
      const double w1 = 2.0 * h1 + h0, w2 = h1 + 2.0 * h0;
      slope[i] = (w1 + w2) / (w1 / s0 + w2 / s1);
    }
  }

  std::size_t segment(double t) const {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t s = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    return std::min(s, x.size() - 2);
  }

  // Returns (value, drop from y[0]) with the offset taken from the nearer knot.
  std::pair<double, double> eval(double t) const {
    t = std::clamp(t, x.front(), x.back());
    const std::size_t s = segment(t);
    const double dx = x[s + 1] - x[s];
    const double u = (t - x[s]) / dx, v = 1.0 - u;
    double offset_left = (y[s + 1] - y[s]) * u * u * (3.0 - 2.0 * u) +
                         dx * (slope[s] * u * v * v - slope[s + 1] * u * u * v);
    if (u <= 0.5) {
      const double value = y[s] + offset_left;
      return {value, (y[0] - y[s]) - offset_left};
    }
    const double offset_right = (y[s] - y[s + 1]) * v * v * (1.0 + 2.0 * u) +
                                dx * (slope[s] * u * v * v - slope[s + 1] * u * u * v);
    return {y[s + 1] + offset_right, (y[0] - y[s + 1]) - offset_right};
  }
};

}  // namespace

HFunction::HFunction(Fn h, Fn drop, double h_prime0, double h_prime_pi, std::string name)
    : h_(std::move(h)),
      drop_(std::move(drop)),
      h_max_(h_(0.0)),
      h_prime0_(h_prime0),
      h_prime_pi_(h_prime_pi),
      name_(std::move(name)) {
  if (!(h_max_ > 0.0) || !std::isfinite(h_max_))
    throw InvalidMetricError("h(0) must be positive and finite");
  constexpr int kSamples = 2000;
  for (int i = 0; i <= kSamples; ++i) {
    const double theta = kPi * i / kSamples;
    const double v = h_(theta);
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidMetricError("h is not positive at theta = " + std::to_string(theta));
    if (v > h_max_ * (1.0 + 1e-12))
      throw InvalidMetricError("h must attain its maximum at theta = 0 (h(" + std::to_string(theta) +
                               ") > h(0))");
  }
  if (std::abs(h_prime0_) > 1e-8 || std::abs(h_prime_pi_) > 1e-8)
    throw InvalidMetricError("h'(0) and h'(pi) must vanish for a smooth even extension");
  strict_max_ = drop_(1e-3 * kPi) > 0.0 && drop_(1e-2 * kPi) > 0.0;
}

HFunction HFunction::one_plus_cos_squared() {
  auto h = [](double t) {
    const double c = std::cos(t);
    return std::sqrt(1.0 + c * c);
  };
  auto drop = [h](double t) {
    const double s = std::sin(t);
    return s * s / (std::numbers::sqrt2 + h(t));
  };
  return HFunction(h, drop, 0.0, 0.0, "one-plus-cos-squared");
}

HFunction HFunction::constant(double value) {
  return HFunction([value](double) { return value; }, [](double) { return 0.0; }, 0.0, 0.0, "constant");
}

HFunction HFunction::from_table(std::vector<double> theta, std::vector<double> h) {
  if (theta.size() != h.size() || theta.size() < 3)
    throw InvalidMetricError("h table needs at least 3 (theta, h) rows");
  for (std::size_t i = 1; i < theta.size(); ++i)
    if (!(theta[i] > theta[i - 1])) throw InvalidMetricError("h table theta column must be strictly increasing");
  if (std::abs(theta.front()) > 1e-12 || std::abs(theta.back() - kPi) > 1e-9)
    throw InvalidMetricError("h table must span [0, pi]");
  theta.front() = 0.0;
  theta.back() = kPi;
  for (double v : h)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidMetricError("h table values must be positive");
  auto interp = std::make_shared<const Pchip>(std::move(theta), std::move(h));
  return HFunction([interp](double t) { return interp->eval(t).first; },
                   [interp](double t) { return interp->eval(t).second; }, 0.0, 0.0, "table");
}

HFunction HFunction::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidMetricError("cannot open h table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw InvalidMetricError("h table '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "theta,h") throw InvalidMetricError("h table '" + path + "' must start with header 'theta,h'");
  std::vector<double> theta, h;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    double a = 0.0, b = 0.0;
    bool ok = comma != std::string::npos;
    if (ok) {
      const std::string_view sa(line.data(), comma), sb(line.data() + comma + 1, line.size() - comma - 1);
      auto ra = std::from_chars(sa.data(), sa.data() + sa.size(), a);
      auto rb = std::from_chars(sb.data(), sb.data() + sb.size(), b);
      ok = ra.ec == std::errc() && ra.ptr == sa.data() + sa.size() && rb.ec == std::errc() &&
           rb.ptr == sb.data() + sb.size();
    }
    if (!ok) throw InvalidMetricError("h table '" + path + "' line " + std::to_string(lineno) + ": expected 'theta,h'");
    theta.push_back(a);
    h.push_back(b);
  }
  return from_table(std::move(theta), std::move(h));
}

HFunction HFunction::from_callable(Fn h, std::string name) {
  constexpr double delta = 1e-5;
  const double d0 = (-3.0 * h(0.0) + 4.0 * h(delta) - h(2.0 * delta)) / (2.0 * delta);
  const double dpi = (3.0 * h(kPi) - 4.0 * h(kPi - delta) + h(kPi - 2.0 * delta)) / (2.0 * delta);
  const double h0 = h(0.0), hpi = h(kPi);
  // Where h0 - h(theta) cancels, fall back to the quadratic endpoint model
  // h(theta) ~ h(end) + h''(end) s^2 / 2 with h'' from an even difference.
  constexpr double wide = 1e-3;
  const double curv0 = 2.0 * (h(wide) - h0) / (wide * wide);
  const double curvpi = 2.0 * (h(kPi - wide) - hpi) / (wide * wide);
  const double resolved = 1e-6 * std::abs(h0);
  auto drop = [h, h0, hpi, curv0, curvpi, resolved](double t) {
    const double naive = h0 - h(t);
    if (std::abs(naive) > resolved) return naive;
    if (t <= 0.5 * kPi) return -0.5 * curv0 * t * t;
    const double s = kPi - t;
    return (h0 - hpi) - 0.5 * curvpi * s * s;
  };
  return HFunction(std::move(h), drop, d0, dpi, std::move(name));
}

double HFunction::deficit(double theta, int k) const {
  const double rel = drop_(theta) / h_max_;
  return -std::expm1(2.0 * k * std::log1p(-rel));
}

HSampler HFunction::even_sampler() const {
  Fn h = h_;
  return [h](double theta2) { return h(std::min(std::abs(theta2), kPi)); };
}

}  // namespace gms
