#include "gms/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gms/errors.hpp"

namespace gms {

namespace {

template <unsigned N>
QuadratureRule gl_mapped(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  QuadratureRule r;
  // Boost stores the non-negative half; N is even here so there is no centre node.
  for (std::size_t i = x.size(); i-- > 0;) {
    r.nodes.push_back(mid - half * x[i]);
    r.weights.push_back(half * w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(mid + half * x[i]);
    r.weights.push_back(half * w[i]);
  }
  return r;
}

void append(QuadratureRule& into, const QuadratureRule& panel) {
  into.nodes.insert(into.nodes.end(), panel.nodes.begin(), panel.nodes.end());
  into.weights.insert(into.weights.end(), panel.weights.begin(), panel.weights.end());
}

}  // namespace

QuadratureRule gauss_legendre(double a, double b, int order) {
  switch (order) {
    case 10: return gl_mapped<10>(a, b);
    case 20: return gl_mapped<20>(a, b);
    default: throw PreconditionError("gauss_legendre: supported orders are 10 and 20");
  }
}

QuadratureRule graded_rule(int panels_per_half, int order) {
  if (panels_per_half < 1) throw PreconditionError("graded_rule: needs at least one panel per half");
  constexpr double pi = std::numbers::pi;
  const double ratio =
      panels_per_half == 1 ? 0.0 : std::clamp(std::pow(1e-8, 1.0 / (panels_per_half - 1)), 0.1, 0.75);

  // Breakpoints of [0, pi/2] from the endpoint outward.
  std::vector<double> cuts{0.0};
  for (int m = panels_per_half - 1; m >= 1; --m) cuts.push_back(0.5 * pi * std::pow(ratio, m));
  cuts.push_back(0.5 * pi);

  QuadratureRule rule;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) append(rule, gauss_legendre(cuts[p], cuts[p + 1], order));
  for (std::size_t p = cuts.size() - 1; p >= 1; --p)
    append(rule, gauss_legendre(pi - cuts[p], pi - cuts[p - 1], order));
  return rule;
}

IntegralEstimate adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, int max_splits) {
  IntegralEstimate est;
  if (a == b) {
    est.converged = true;
    return est;
  }
  struct Panel {
    double a, b, value, error, l1;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  // Boost reports the Kronrod-Gauss difference on the reference interval;
  // scale it to [lo, hi] here.
  auto panel = [&](double lo, double hi) {
    Panel p{lo, hi, 0.0, 0.0, 0.0};
    p.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, lo, hi, 0, 0.0, &p.error, &p.l1);
    p.error *= 0.5 * (hi - lo);
    return p;
  };
  std::priority_queue<Panel> queue;
  queue.push(panel(a, b));
  est.value = queue.top().value;
  est.error = queue.top().error;
  est.l1 = queue.top().l1;
  const double floor = 50.0 * std::numeric_limits<double>::epsilon();
  for (int split = 0;; ++split) {
    if (est.error <= std::max(rel_tol * std::abs(est.value), floor * est.l1)) {
      est.converged = true;
      break;
    }
    if (split >= max_splits) break;
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(worst);
      break;
    }
    const Panel left = panel(worst.a, mid), right = panel(mid, worst.b);
    est.value += left.value + right.value - worst.value;
    est.error += left.error + right.error - worst.error;
    est.l1 += left.l1 + right.l1 - worst.l1;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to drop the drift of the running updates.
  est.value = est.error = est.l1 = 0.0;
  while (!queue.empty()) {
    est.value += queue.top().value;
    est.error += queue.top().error;
    est.l1 += queue.top().l1;
    queue.pop();
  }
  return est;
}

}  // namespace gms
