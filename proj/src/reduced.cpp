#include "gms/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gms/errors.hpp"
#include "gms/quadrature.hpp"

namespace gms {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

void check_degree(int k) {
  if (k < 1) throw DegreeError("reduced: form degree k must be at least 1");
}

// ratio omega_{k-1} / omega_k.
double sphere_ratio(int k) { return sphere_volume(k - 1) / sphere_volume(k); }

double sin_power(double theta, int k) { return k == 1 ? 1.0 : std::pow(std::sin(theta), k - 1); }

// Closed-form profile at |c| = r c_star, evaluated with
// 1 - c^2 h^{2k} = (1 - r^2) + r^2 D(theta).
struct Family {
  const HFunction& h;
  int k;
  double c;
  double r2;
  double gap;  // 1 - r^2

  Family(const HFunction& hf, int kk, double cc) : h(hf), k(kk), c(cc) {
    const double r = std::abs(c) * std::pow(h.h_max(), k);
    if (!(r < 1.0))
      throw SupercriticalError("|c| = " + std::to_string(std::abs(c)) + " is not below c* = " +
                               std::to_string(c_star(h, k)));
    r2 = r * r;
    gap = (1.0 - r) * (1.0 + r);
  }

  double operator()(double theta) const { return c / std::sqrt(gap + r2 * h.deficit(theta, k)); }
};

}  // namespace

double sphere_volume(int k) {
  if (k < 0) throw DegreeError("sphere_volume: k must be non-negative");
  const double a = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, a) / std::tgamma(a);
}

double c_star(const HFunction& h, int k) {
  check_degree(k);
  return std::pow(h.h_max(), -k);
}

Profile make_profile(int k, int nodes) {
  check_degree(k);
  if (nodes < 40 || nodes % 40 != 0) throw PreconditionError("make_profile: nodes must be a positive multiple of 40");
  constexpr int order = 20;
  const auto rule = graded_rule(nodes / (2 * order), order);
  Profile p;
  p.k = k;
  p.thetaNodes = rule.nodes;
  p.weights.resize(rule.weights.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) p.weights[i] = rule.weights[i] * sin_power(rule.nodes[i], k);
  p.values.assign(rule.nodes.size(), 0.0);
  return p;
}

double f_closed_at(double c, const HFunction& h, int k, double theta) {
  check_degree(k);
  if (c == 0.0) return 0.0;
  return Family(h, k, c)(theta);
}

Profile f_closed(double c, const HFunction& h, int k, const Profile& grid) {
  check_degree(k);
  Profile p = grid;
  p.k = k;
  if (c == 0.0) {
    std::fill(p.values.begin(), p.values.end(), 0.0);
    return p;
  }
  const Family fam(h, k, c);
  p.values.resize(p.thetaNodes.size());
  for (std::size_t i = 0; i < p.thetaNodes.size(); ++i) p.values[i] = fam(p.thetaNodes[i]);
  return p;
}

double kappa_of_c(double c, const HFunction& h, int k, double tol) {
  check_degree(k);
  if (c == 0.0) return 0.0;
  const Family fam(h, k, std::abs(c));
  auto integrand = [&](double t) { return fam(t) * sin_power(t, k); };

  // Geometric breakpoints toward both ends down to the width of the peak.
  const double width = 0.01 * std::sqrt(fam.gap);
  const int levels = std::clamp(static_cast<int>(std::ceil(std::log2(0.5 * kPi / width))), 1, 60);
  std::vector<double> cuts{0.0};
  for (int m = levels; m >= 1; --m) cuts.push_back(0.5 * kPi * std::ldexp(1.0, -m));
  cuts.push_back(0.5 * kPi);
  for (int m = 1; m <= levels; ++m) cuts.push_back(kPi - 0.5 * kPi * std::ldexp(1.0, -m));
  cuts.push_back(kPi);

  const double goal = std::max(tol, 50.0 * kEps);
  double value = 0.0, error = 0.0, l1 = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const auto est = adaptive_integrate(integrand, cuts[p], cuts[p + 1], goal);
    value += est.value;
    error += est.error;
    l1 += est.l1;
  }
  if (!(error <= goal * std::abs(value) + 50.0 * kEps * l1))
    throw PrecisionError("kappa_of_c: quadrature error estimate " + std::to_string(error / std::abs(value)) +
                         " exceeds the requested relative tolerance");
  const double kappa = sphere_ratio(k) * value;
  return c < 0.0 ? -kappa : kappa;
}

ThresholdReport kappa_star(const HFunction& h, int k, double tol, int maxLevel) {
  check_degree(k);
  if (!(tol > 0.0) || maxLevel < 2) throw PreconditionError("kappa_star: needs tol > 0 and maxLevel >= 2");
  ThresholdReport rep;
  rep.cStar = c_star(h, k);

  // An interior maximum (or constant h) leaves a non-integrable zero of the
  // denominator away from the endpoints.
  constexpr int kProbe = 2000;
  for (int i = 1; i < kProbe; ++i) {
    if (!(h.deficit(kPi * i / kProbe, k) > 0.0)) {
      rep.refinementTrace.emplace_back(0, std::numeric_limits<double>::infinity());
      return rep;
    }
  }

  const double ratio = sphere_ratio(k);
  auto integrand = [&](double t) {
    const double d = h.deficit(t, k);
    return d > 0.0 ? rep.cStar / std::sqrt(d) * sin_power(t, k) : 0.0;
  };
  double outer = 0.5 * kPi;
  double integral = 0.0, previous = 0.0;
  for (int level = 1; level <= maxLevel; ++level) {
    const double inner = 0.5 * kPi * std::pow(0.25, level);
    integral += adaptive_integrate(integrand, inner, outer, 1e-13).value;
    integral += adaptive_integrate(integrand, kPi - outer, kPi - inner, 1e-13).value;
    outer = inner;
    rep.refinementTrace.emplace_back(level, ratio * integral);
    if (level >= 2 && std::abs(integral - previous) <= tol * std::abs(integral)) {
      rep.divergent = false;
      // Tails shrink like the cut-off, a factor of 4 per level.
      rep.kappaStar = ratio * (integral + (integral - previous) / 3.0);
      return rep;
    }
    previous = integral;
  }
  return rep;
}

double c_for_kappa(double kappa, const HFunction& h, int k, double tol) {
  check_degree(k);
  if (kappa == 0.0) return 0.0;
  const double target = std::abs(kappa);
  const auto threshold = kappa_star(h, k);
  if (!threshold.divergent && target >= threshold.kappaStar)
    throw NoSolutionError("|kappa| = " + std::to_string(target) + " is not below kappa* = " +
                          std::to_string(threshold.kappaStar) + ": no smooth solution exists");

  const double cs = threshold.cStar;
  double lo = 0.0, hi = 0.0;
  bool bracketed = false;
  for (int m = 1; m <= 52; ++m) {
    hi = cs * (1.0 - std::ldexp(1.0, -m));
    if (kappa_of_c(hi, h, k) >= target) {
      bracketed = true;
      break;
    }
    lo = hi;
  }
  if (!bracketed)
    throw NoSolutionError("|kappa| = " + std::to_string(target) +
                          " needs c closer to c* than double precision resolves");

  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double km = kappa_of_c(mid, h, k);
    if (std::abs(km - target) <= tol) {
      lo = hi = mid;
      break;
    }
    (km < target ? lo : hi) = mid;
  }
  const double c = 0.5 * (lo + hi);
  return kappa < 0.0 ? -c : c;
}

double reduced_energy(const Profile& f, const HFunction& h, int k) {
  check_degree(k);
  if (f.k != k) throw DegreeError("reduced_energy: profile degree does not match k");
  if (f.values.size() != f.thetaNodes.size() || f.weights.size() != f.thetaNodes.size())
    throw PreconditionError("reduced_energy: profile arrays differ in length");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double big_h = std::pow(h(f.thetaNodes[i]), 2 * k);
    sum += f.weights[i] * std::sqrt(1.0 + big_h * f.values[i] * f.values[i]) / big_h;
  }
  return sphere_volume(k) * sphere_volume(k - 1) * sum;
}

double profile_kappa(const Profile& f) {
  check_degree(f.k);
  double sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) sum += f.weights[i] * f.values[i];
  return sphere_ratio(f.k) * sum;
}

ReducedSolution reduced_minimize(double kappa, const HFunction& h, int k, const Profile& grid,
                                 const ReducedConfig& cfg) {
  check_degree(k);
  if (grid.k != k) throw DegreeError("reduced_minimize: grid degree does not match k");
  if (!(cfg.tol > 0.0) || cfg.maxIter < 1) throw PreconditionError("reduced_minimize: needs tol > 0 and maxIter >= 1");
  if (cfg.checkThreshold && kappa != 0.0) {
    const auto threshold = kappa_star(h, k);
    if (!threshold.divergent && std::abs(kappa) >= threshold.kappaStar)
      throw SupercriticalError("reduced_minimize: |kappa| is not below kappa* = " +
                               std::to_string(threshold.kappaStar));
  }

  const std::size_t n = grid.size();
  const double a_coef = sphere_volume(k) * sphere_volume(k - 1);
  const double b_coef = sphere_ratio(k);
  std::vector<double> big_h(n), g(n), dinv(n), step(n), trial(n);
  double wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    big_h[i] = std::pow(h(grid.thetaNodes[i]), 2 * k);
    wsum += grid.weights[i];
  }

  ReducedSolution sol;
  sol.profile = grid;
  std::vector<double>& f = sol.profile.values;
  f.assign(n, kappa / (b_coef * wsum));

  auto energy = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += grid.weights[i] * std::sqrt(1.0 + big_h[i] * v[i] * v[i]) / big_h[i];
    return a_coef * s;
  };
  auto project = [&](std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += grid.weights[i] * v[i];
    const double shift = (kappa / b_coef - s) / wsum;
    for (double& x : v) x += shift;
  };

  double e = energy(f);
  for (int it = 0;; ++it) {
    // Pointwise stationarity variable f / sqrt(1 + H f^2); its weighted
    // Newton mean is the normalized multiplier.
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = 1.0 + big_h[i] * f[i] * f[i];
      g[i] = f[i] / std::sqrt(s);
      dinv[i] = s * std::sqrt(s);
      num += grid.weights[i] * dinv[i] * g[i];
      den += grid.weights[i] * dinv[i];
    }
    const double c = num / den;
    double stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) stat = std::max(stat, std::abs(g[i] - c));
    sol.multiplier = c;
    sol.stationarity = stat;
    sol.iterations = it;
    if (stat <= cfg.tol) break;
    if (it >= cfg.maxIter)
      throw NonConvergenceError("reduced_minimize: no convergence in " + std::to_string(cfg.maxIter) +
                                    " Newton iterations",
                                stat);

    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      step[i] = -dinv[i] * (g[i] - c);
      slope += a_coef * grid.weights[i] * g[i] * step[i];
    }
    const double slack = 64.0 * kEps * std::abs(e);
    double t = 1.0;
    double e_trial = e;
    for (;;) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = f[i] + t * step[i];
      project(trial);
      e_trial = energy(trial);
      if (e_trial <= e + 1e-4 * t * slope + slack) break;
      t *= 0.5;
      if (t < 1e-14)
        throw NonConvergenceError("reduced_minimize: line search failed", stat);
    }
    f.swap(trial);
    e = e_trial;
  }
  sol.constraintResidual = std::abs(profile_kappa(sol.profile) - kappa);
  return sol;
}

}  // namespace gms
