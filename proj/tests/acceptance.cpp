// Runs the eight acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "gms/borninfeld.hpp"
#include "gms/errors.hpp"
#include "gms/experiment.hpp"
#include "gms/optimizer.hpp"
#include "gms/reduced.hpp"
#include "support.hpp"

using namespace gms;

namespace {

// Collects the failed sub-checks of one criterion.
struct Outcome {
  std::vector<std::string> failures;
  std::string summary;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const HFunction& cos_sq() {
  static const HFunction h = HFunction::one_plus_cos_squared();
  return h;
}

ConformalMetric cos_sq_torus(int n) { return build_torus(n, n, cos_sq().even_sampler()); }

void figure2(Outcome& o) {
  ExperimentConfig cfg;
  cfg.command = "figure2";
  cfg.c = {0.5, 0.6, 0.7, 0.705};
  cfg.thetaSamples = 721;
  const auto rec = run(cfg);
  const int n = cfg.thetaSamples;
  const int mid = n / 2;
  o.require(rec.payload.rows.size() == 4u * n, "row count");
  const auto val = [&](std::size_t r, int col) { return std::get<double>(rec.payload.rows[r][col]); };
  for (int curve = 0; curve < 4; ++curve) {
    const std::size_t base = static_cast<std::size_t>(curve) * n;
    bool even = true;
    double peak = 0.0;
    for (int i = 0; i < n; ++i) {
      even = even && val(base + i, 2) == val(base + n - 1 - i, 2);
      peak = std::max(peak, val(base + i, 2));
    }
    const std::string c = fmt("%g", cfg.c[curve]);
    o.require(even, "curve c=" + c + " not even");
    o.require(val(base + mid, 1) == 0.0 && val(base + mid, 2) == peak, "curve c=" + c + " not peaked at 0");
    // Strictly below the peak just off the centre.
    o.require(val(base + mid + 1, 2) < peak, "peak at 0 not strict for c=" + c);
  }
  const double center05 = val(mid, 2);
  const double center0705 = val(3 * static_cast<std::size_t>(n) + mid, 2);
  o.require(std::abs(center05 - 1.0) <= 1e-10, "|alpha_0.5|(0) = " + fmt("%.17g", center05));
  o.require(center0705 > 8.0, "|alpha_0.705|(0) = " + fmt("%.6g", center0705));
  o.summary = "|a_0.5|(0)-1=" + fmt("%.2e", center05 - 1.0) + " |a_0.705|(0)=" + fmt("%.4f", center0705);
}

void torus_closed_form(Outcome& o) {
  const double c = 0.5;
  const double kappa = kappa_of_c(c, cos_sq(), 1);
  std::vector<double> gaps;
  for (int n : {32, 64, 128}) {
    const auto m = cos_sq_torus(n);
    const auto sol = minimize(constant_form(m.grid(), 0.0, kappa), m, RhoModel::gms(), SolverConfig{});
    const auto image = integrate_form(
        m.grid(), [](double, double) { return 0.0; },
        [&](double, double t2) { return f_closed_at(c, cos_sq(), 1, std::min(std::abs(t2), std::numbers::pi)); });
    gaps.push_back(sup_norm(sol.alpha - image, m));
    o.require(sol.gradNorm <= 1e-9, "gradNorm " + fmt("%.3e", sol.gradNorm) + " on " + std::to_string(n));
  }
  for (std::size_t i = 1; i < gaps.size(); ++i)
    o.require(gaps[i - 1] / gaps[i] >= 3.0, "ratio " + fmt("%.3f", gaps[i - 1] / gaps[i]));
  o.summary = "gaps " + fmt("%.2e", gaps[0]) + " " + fmt("%.2e", gaps[1]) + " " + fmt("%.2e", gaps[2]) + " ratios " +
              fmt("%.2f", gaps[0] / gaps[1]) + " " + fmt("%.2f", gaps[1] / gaps[2]);
}

void reduced_closed_form(Outcome& o) {
  const auto& h = cos_sq();
  struct Case {
    int k;
    double kappa;
  };
  const double kstar2 = kappa_star(h, 2).kappaStar;
  std::string summary;
  for (const Case cs : {Case{1, kappa_of_c(0.5, h, 1)}, Case{2, 0.9 * kstar2}}) {
    const auto grid = make_profile(cs.k, 2000);
    const auto sol = reduced_minimize(cs.kappa, h, cs.k, grid);
    const double c = c_for_kappa(cs.kappa, h, cs.k);
    const auto ref = f_closed(c, h, cs.k, grid);
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) gap = std::max(gap, std::abs(sol.profile.values[i] - ref.values[i]));
    const std::string k = std::to_string(cs.k);
    o.require(gap <= 1e-8, "k=" + k + " profile gap " + fmt("%.3e", gap));
    o.require(std::abs(sol.multiplier - c) <= 1e-8, "k=" + k + " multiplier gap " + fmt("%.3e", sol.multiplier - c));
    summary += "k=" + k + " gap " + fmt("%.1e", gap) + " mult " + fmt("%.1e", std::abs(sol.multiplier - c)) + "; ";
  }
  o.summary = summary;
}

void thresholds(Outcome& o) {
  const auto& h = cos_sq();
  const auto k1 = kappa_star(h, 1, 1e-6, 20);
  const auto k2 = kappa_star(h, 2, 1e-6, 20);
  o.require(k1.divergent && std::isinf(k1.kappaStar), "k=1 not divergent");
  bool increasing = true;
  for (std::size_t i = 1; i < k1.refinementTrace.size(); ++i)
    increasing = increasing && k1.refinementTrace[i].second > k1.refinementTrace[i - 1].second;
  o.require(increasing, "k=1 trace not strictly increasing");
  o.require(!k2.divergent && std::isfinite(k2.kappaStar), "k=2 not finite");
  const auto& tr = k2.refinementTrace;
  double rel = 1.0;
  if (tr.size() >= 2) rel = std::abs(tr.back().second - tr[tr.size() - 2].second) / std::abs(tr.back().second);
  o.require(rel <= 1e-6, "k=2 last estimates differ by " + fmt("%.3e", rel));
  bool refused = false;
  try {
    (void)c_for_kappa(1.01 * k2.kappaStar, h, 2);
  } catch (const NoSolutionError&) {
    refused = true;
  }
  o.require(refused, "c_for_kappa(1.01 kappa*) did not refuse");
  o.summary = "k=1 divergent after " + std::to_string(k1.refinementTrace.size()) + " levels; k=2 kappa*=" +
              fmt("%.12f", k2.kappaStar) + " rel " + fmt("%.1e", rel);
}

void convexity(Outcome& o) {
  std::mt19937_64 rng(2024);
  double worst_grad = 0.0, worst_hess = 0.0, worst_floor = -1e300;
  for (int n : {8, 16}) {
    const auto m = cos_sq_torus(n);
    const GridComplex& g = m.grid();
    const Cochain aStar = constant_form(g, 0.2, 0.7);
    const auto energy = [&](const Cochain& u) { return total_energy(aStar + d(g, u), m, RhoModel::gms()).value; };
    for (int rep = 0; rep < 10; ++rep) {
      const Cochain u = gms::testing::smooth_potential(rng, g, 0.5);
      const Cochain psi = gms::testing::smooth_potential(rng, g, 1.0) + gms::testing::random_cochain(rng, g, Degree::Zero, 0.1);

      const double eg = 1e-5;
      const double fd1 = (energy(u + eg * psi) - energy(u - (eg * psi))) / (2.0 * eg);
      const double an1 = inner_product(grad_potential(u, aStar, m, RhoModel::gms()), psi, m);
      worst_grad = std::max(worst_grad, std::abs(an1 - fd1) / std::abs(fd1));

      const double eh = 2e-4;
      const double fd2 = (energy(u + eh * psi) - 2.0 * energy(u) + energy(u - (eh * psi))) / (eh * eh);
      const double an2 = inner_product(hessian_apply(u, psi, aStar, m, RhoModel::gms()), psi, m);
      worst_hess = std::max(worst_hess, std::abs(an2 - fd2) / std::abs(an2));
      worst_floor = std::max(worst_floor, convexity_lower_bound(u, psi, aStar, m) - an2);
    }
  }
  o.require(worst_grad <= 1e-6, "gradient FD rel " + fmt("%.3e", worst_grad));
  o.require(worst_hess <= 1e-5, "Hessian FD rel " + fmt("%.3e", worst_hess));
  o.require(worst_floor <= 1e-10, "convexity floor violated by " + fmt("%.3e", worst_floor));

  const auto m = cos_sq_torus(16);
  const Cochain a = constant_form(m.grid(), 0.3, 0.8);
  SolverConfig cfg;
  const auto s1 = minimize(a, m, RhoModel::gms(), cfg, gms::testing::random_cochain(rng, m.grid(), Degree::Zero, 2.0));
  const auto s2 = minimize(a, m, RhoModel::gms(), cfg, gms::testing::random_cochain(rng, m.grid(), Degree::Zero, 2.0));
  const double diff = sup_norm(s1.alpha - s2.alpha, m);
  o.require(diff <= 10.0 * cfg.gradTol, "random starts differ by " + fmt("%.3e", diff));
  o.summary = "grad " + fmt("%.1e", worst_grad) + " hess " + fmt("%.1e", worst_hess) + " floor " +
              fmt("%.1e", worst_floor) + " starts " + fmt("%.1e", diff);
}

void limits(Outcome& o) {
  const auto m = cos_sq_torus(32);
  const Cochain a = constant_form(m.grid(), 0.0, kappa_of_c(0.5, cos_sq(), 1));
  const auto rep = t_sweep(a, m, {0.01, 0.1, 1.0, 10.0, 100.0}, SolverConfig{});
  const auto& first = rep.entries.front();
  const double ratio = first.harmonicGap / rep.harmonicSupNorm;
  o.require(ratio < 0.05, "harmonic gap ratio " + fmt("%.3e", ratio));
  for (std::size_t i = 0; i < rep.entries.size(); ++i) {
    const auto& e = rep.entries[i];
    const std::string t = fmt("%g", e.t);
    o.require(e.tvValue <= e.tGmsValue, "lower sandwich at t=" + t);
    o.require(e.tGmsValue <= e.tvValue + rep.gVolume / e.t + 1e-8, "upper sandwich at t=" + t);
    if (i > 0) o.require(e.tGmsValue <= rep.entries[i - 1].tGmsValue, "tGms increased at t=" + t);
  }
  o.summary = "harmonicGap/sup " + fmt("%.2e", ratio) + " tGms(100)=" + fmt("%.6f", rep.entries.back().tGmsValue);
}

void born_infeld(Outcome& o) {
  ExperimentConfig cfg;
  cfg.command = "bi-check";
  cfg.seed = 42;
  cfg.samples = 1000;
  const auto rec = run(cfg);
  std::string summary;
  for (const auto& row : rec.payload.rows) {
    const auto& name = std::get<std::string>(row[0]);
    const double value = std::get<double>(row[2]);
    o.require(std::get<bool>(row[4]), name + " = " + fmt("%.3e", value));
    summary += name + " " + fmt("%.1e", value) + "; ";
  }
  // The fuzz table samples 1000 generic forms but only 100 self-dual ones.
  o.require(std::get<long long>(rec.payload.rows[0][1]) == 1000, "generic sample count");
  o.require(std::get<long long>(rec.payload.rows[4][1]) == 100, "self-dual sample count");
  o.summary = summary;
}

void admissibility(Outcome& o) {
  const auto k1 = admissibility_probe(RhoModel::gms(), 1.0, 1000);
  o.require(std::abs(k1.k - std::pow(2.0, 1.5)) <= 1e-3, "k(1) = " + fmt("%.6f", k1.k));
  double prev = 0.0;
  for (double c : {1.0, 10.0, 100.0, 1000.0}) {
    const auto r = admissibility_probe(RhoModel::gms(), c, 1000);
    o.require(r.admissible, "not admissible at c=" + fmt("%g", c));
    o.require(r.k > prev, "k not increasing at c=" + fmt("%g", c));
    o.require(!r.regular, "GMS reported regular at c=" + fmt("%g", c));
    prev = r.k;
  }
  o.require(prev > 1e8, "k(1000) = " + fmt("%.3e", prev));
  for (double c : {1.0, 10.0, 100.0, 1000.0}) {
    const auto r = admissibility_probe(RhoModel::linear(), c, 1000);
    o.require(r.k == 1.0 && r.regular, "linear model at c=" + fmt("%g", c));
  }
  o.summary = "k(1)=" + fmt("%.6f", k1.k) + " k(1000)=" + fmt("%.3e", prev);
}

struct Criterion {
  const char* name;
  double budgetSeconds;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"1 figure reproduction", 1.0, figure2},
      {"2 torus solve vs closed form", 60.0, torus_closed_form},
      {"3 reduced solve vs closed form", 5.0, reduced_closed_form},
      {"4 threshold dichotomy", 10.0, thresholds},
      {"5 convexity and variations", 60.0, convexity},
      {"6 t limits", 30.0, limits},
      {"7 Born-Infeld identities", 5.0, born_infeld},
      {"8 admissibility probe", 1.0, admissibility},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= c.budgetSeconds) o.failures.push_back("runtime " + fmt("%.2f", secs) + " s over budget");
    const bool ok = o.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("%s criterion %s (%.3f s, budget %g s): %s\n", ok ? "PASS" : "FAIL", c.name, secs, c.budgetSeconds,
                o.summary.c_str());
    for (const auto& f : o.failures) std::printf("    %s\n", f.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed;
}
