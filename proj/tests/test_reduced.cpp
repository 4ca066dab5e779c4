#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "gms/errors.hpp"
#include "gms/reduced.hpp"
#include "support.hpp"

using namespace gms;

namespace {

const double kPi = std::numbers::pi;

// Frozen from 40-digit adaptive quadrature of the closed-form integrands.
constexpr double kKappaHalfK1 = 0.63730565406830097605;   // c = 0.5, k = 1
constexpr double kKappaPoint3K2 = 0.33004328339135323477;  // c = 0.3, k = 2
constexpr double kKappaStarK2 = 0.84287517740629802144;    // (1/2) int_0^pi (3 + cos^2)^{-1/2}
constexpr double kCAtNinetyK2 = 0.4935508527427167951;     // kappa_of_c(c) = 0.9 kappa*, k = 2

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << body;
  return path.string();
}

double sup_gap(const Profile& a, const Profile& b) { return gms::testing::max_abs_diff(a.values, b.values); }

}  // namespace

TEST_CASE("HFunction construction and validation") {
  const auto h = HFunction::one_plus_cos_squared();
  CHECK(h.h_max() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-16));
  CHECK(h(kPi / 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h.strict_maximum());
  CHECK(h.drop(1e-9) == doctest::Approx(0.5e-18 / std::sqrt(2.0)).epsilon(1e-8));
  CHECK_FALSE(HFunction::constant(2.0).strict_maximum());

  CHECK_THROWS_AS(HFunction::from_callable([](double t) { return 2.0 - std::cos(t); }), InvalidMetricError);
  CHECK_THROWS_AS(HFunction::from_callable([](double t) { return 2.0 + std::cos(t) - 0.01 * t; }), InvalidMetricError);
  CHECK_THROWS_AS(HFunction::from_callable([](double t) { return std::cos(t); }), InvalidMetricError);
  const auto smooth = HFunction::from_callable([](double t) { return 2.0 + std::cos(t); });
  CHECK(std::abs(smooth.h_prime0()) <= 1e-8);
  CHECK(smooth.drop(1e-9) == doctest::Approx(0.5e-18).epsilon(1e-4));

  SUBCASE("tables") {
    std::string body = "theta,h\n";
    const int n = 181;
    for (int i = 0; i < n; ++i) {
      const double t = kPi * i / (n - 1);
      char line[96];
      std::snprintf(line, sizeof line, "%.17g,%.17g\n", t, std::sqrt(1.0 + std::cos(t) * std::cos(t)));
      body += line;
    }
    const auto tab = HFunction::from_csv(write_temp("gms_h_table.csv", body));
    CHECK(tab.h_prime0() == 0.0);
    CHECK(tab.h_max() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    double err = 0.0;
    for (int i = 0; i <= 1000; ++i) {
      const double t = kPi * i / 1000.0;
      err = std::max(err, std::abs(tab(t) - h(t)));
    }
    // Piecewise cubic on a pi/180 grid.
    CHECK(err < 2e-5);
    CHECK(tab.strict_maximum());
    CHECK(tab.drop(1e-7) > 0.0);
    CHECK(tab.drop(1e-7) / (1e-7 * 1e-7) == doctest::Approx(tab.drop(1e-6) / (1e-6 * 1e-6)).epsilon(1e-4));

    CHECK_THROWS_AS(HFunction::from_csv(write_temp("gms_bad_header.csv", "t,h\n0,1\n")), InvalidMetricError);
    CHECK_THROWS_AS(HFunction::from_csv(write_temp("gms_bad_row.csv", "theta,h\n0,1\nx,1\n3.141592653589793,1\n")),
                    InvalidMetricError);
    CHECK_THROWS_AS(HFunction::from_table({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}), InvalidMetricError);
    CHECK_THROWS_AS(HFunction::from_csv("/nonexistent/h.csv"), InvalidMetricError);
  }
}

TEST_CASE("sphere volumes and critical constants") {
  CHECK(sphere_volume(0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(sphere_volume(1) == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(sphere_volume(2) == doctest::Approx(4.0 * kPi).epsilon(1e-15));
  CHECK(sphere_volume(3) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-15));

  const auto h = HFunction::one_plus_cos_squared();
  CHECK(c_star(h, 1) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK(c_star(h, 2) == doctest::Approx(0.5).epsilon(1e-15));
  for (int k : {1, 2, 5}) CHECK(c_star(HFunction::constant(1.0), k) == 1.0);
  CHECK_THROWS_AS(c_star(h, 0), DegreeError);
}

TEST_CASE("profiles") {
  for (int k : {1, 2, 3}) {
    const auto p = make_profile(k, 2000);
    REQUIRE(p.size() == 2000);
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      CHECK(p.weights[i] > 0.0);
      if (i > 0) CHECK(p.thetaNodes[i] > p.thetaNodes[i - 1]);
      sum += p.weights[i];
    }
    CHECK(p.thetaNodes.front() > 0.0);
    CHECK(p.thetaNodes.back() < kPi);
    CHECK(std::abs(sum - sphere_volume(k) / sphere_volume(k - 1)) <= 1e-10);
  }
  CHECK_THROWS_AS(make_profile(1, 1999), PreconditionError);
}

TEST_CASE("closed-form family") {
  const auto h = HFunction::one_plus_cos_squared();
  const auto grid = make_profile(1, 400);
  for (double v : f_closed(0.0, h, 1, grid).values) CHECK(v == 0.0);
  CHECK(f_closed_at(0.5, h, 1, 0.0) == doctest::Approx(0.7071067811865475244).epsilon(1e-15));
  CHECK(f_closed_at(0.5, h, 1, kPi / 2) == doctest::Approx(0.57735026918962576451).epsilon(1e-15));
  CHECK(h(0.0) * f_closed_at(0.5, h, 1, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f_closed_at(-0.3, h, 1, 0.4) == -f_closed_at(0.3, h, 1, 0.4));
  CHECK_THROWS_AS(f_closed_at(0.71, h, 1, 0.0), SupercriticalError);
  CHECK_THROWS_AS(f_closed(0.5, h, 2, make_profile(2, 40)), SupercriticalError);

  // Blows up at theta = 0 as c approaches c*.
  const double cs = c_star(h, 1);
  for (double bound : {10.0, 1e3, 1e6}) {
    double c = 0.5 * cs;
    while (f_closed_at(c, h, 1, 0.0) <= bound) c = 0.5 * (c + cs);
    CHECK(c < cs);
  }

  // Pointwise Euler-Lagrange quantity is the constant c.
  const auto f = f_closed(0.6, h, 1, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double H = std::pow(h(grid.thetaNodes[i]), 2);
    CHECK(f.values[i] / std::sqrt(1.0 + H * f.values[i] * f.values[i]) == doctest::Approx(0.6).epsilon(1e-13));
  }
}

TEST_CASE("kappa_of_c") {
  const auto h = HFunction::one_plus_cos_squared();
  CHECK(kappa_of_c(0.0, h, 1) == 0.0);
  CHECK(kappa_of_c(0.6, HFunction::constant(1.0), 1) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(kappa_of_c(0.5, h, 1) == doctest::Approx(kKappaHalfK1).epsilon(1e-13));
  CHECK(kappa_of_c(0.3, h, 2) == doctest::Approx(kKappaPoint3K2).epsilon(1e-13));
  CHECK(kappa_of_c(0.3, h, 1) < kappa_of_c(0.5, h, 1));
  CHECK(kappa_of_c(0.5, h, 1) < kappa_of_c(0.7, h, 1));
  for (double c : {0.1, 0.45, 0.7071}) CHECK(kappa_of_c(-c, h, 1) == -kappa_of_c(c, h, 1));
  // Near-critical k = 2 values stay below the threshold.
  CHECK(kappa_of_c(0.5 * (1.0 - 1e-12), h, 2) < kKappaStarK2);
  CHECK(kappa_of_c(0.5 * (1.0 - 1e-12), h, 2) > 0.9999 * kKappaStarK2);
  CHECK_THROWS_AS(kappa_of_c(0.5, h, 2), SupercriticalError);
}

TEST_CASE("kappa_star dichotomy") {
  const auto h = HFunction::one_plus_cos_squared();
  const auto k1 = kappa_star(h, 1);
  CHECK(k1.divergent);
  CHECK(std::isinf(k1.kappaStar));
  REQUIRE(k1.refinementTrace.size() == 20);
  for (std::size_t i = 1; i < k1.refinementTrace.size(); ++i)
    CHECK(k1.refinementTrace[i].second > k1.refinementTrace[i - 1].second);

  const auto k2 = kappa_star(h, 2, 1e-6);
  CHECK_FALSE(k2.divergent);
  const auto& tr = k2.refinementTrace;
  REQUIRE(tr.size() >= 2);
  CHECK(std::abs(tr.back().second - tr[tr.size() - 2].second) <= 1e-6 * tr.back().second);
  CHECK(k2.kappaStar == doctest::Approx(kKappaStarK2).epsilon(1e-9));
  CHECK(k2.cStar == doctest::Approx(0.5).epsilon(1e-15));

  const auto flat = kappa_star(HFunction::constant(1.0), 2);
  CHECK(flat.divergent);
  REQUIRE(flat.refinementTrace.size() == 1);
  CHECK(flat.refinementTrace[0].first == 0);
  CHECK(std::isinf(flat.refinementTrace[0].second));

  // Other metrics with a non-degenerate maximum at 0 follow the same split.
  for (const auto& g : {HFunction::from_callable([](double t) { return 2.0 + std::cos(t); }),
                        HFunction::from_callable([](double t) { return 1.5 + std::cos(2.0 * t); })}) {
    CHECK(kappa_star(g, 1).divergent);
    CHECK_FALSE(kappa_star(g, 2).divergent);
    CHECK_FALSE(kappa_star(g, 3).divergent);
  }
}

TEST_CASE("c_for_kappa") {
  const auto h = HFunction::one_plus_cos_squared();
  CHECK(c_for_kappa(0.0, h, 1) == 0.0);
  CHECK(c_for_kappa(0.75, HFunction::constant(1.0), 1) == doctest::Approx(0.6).epsilon(1e-13));
  CHECK(c_for_kappa(kKappaHalfK1, h, 1) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(c_for_kappa(-kKappaHalfK1, h, 1) == doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(c_for_kappa(0.9 * kKappaStarK2, h, 2) == doctest::Approx(kCAtNinetyK2).epsilon(1e-12));
  CHECK(c_for_kappa(5.0, h, 1) < c_star(h, 1));
  CHECK_THROWS_AS(c_for_kappa(1.01 * kKappaStarK2, h, 2), NoSolutionError);
}

TEST_CASE("reduced energy") {
  const auto flat = HFunction::constant(1.0);
  auto p = make_profile(1, 400);
  CHECK(reduced_energy(p, flat, 1) == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-13));
  std::fill(p.values.begin(), p.values.end(), 0.8);
  CHECK(reduced_energy(p, flat, 1) == doctest::Approx(4.0 * kPi * kPi * std::sqrt(1.64)).epsilon(1e-13));
  CHECK_THROWS_AS(reduced_energy(p, flat, 2), DegreeError);

  // Perturbations that keep the class raise the energy.
  const auto h = HFunction::one_plus_cos_squared();
  const auto grid = make_profile(1, 2000);
  const auto f = f_closed(0.5, h, 1, grid);
  const double e0 = reduced_energy(f, h, 1);
  std::mt19937_64 rng(41);
  double wsum = 0.0;
  for (double w : grid.weights) wsum += w;
  for (int rep = 0; rep < 5; ++rep) {
    Profile g = f;
    double shift = 0.0;
    const double a = gms::testing::uniform(rng, 0.01, 0.2), b = gms::testing::uniform(rng, 1.0, 6.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double dv = a * std::cos(b * g.thetaNodes[i]);
      g.values[i] += dv;
      shift += grid.weights[i] * dv;
    }
    for (double& v : g.values) v -= shift / wsum;
    CHECK(std::abs(profile_kappa(g) - profile_kappa(f)) <= 1e-13);
    CHECK(reduced_energy(g, h, 1) > e0);
  }
}

TEST_CASE("reduced_minimize") {
  const auto h = HFunction::one_plus_cos_squared();
  SUBCASE("trivial class") {
    const auto sol = reduced_minimize(0.0, h, 1, make_profile(1, 400));
    for (double v : sol.profile.values) CHECK(v == 0.0);
    CHECK(sol.multiplier == 0.0);
  }
  SUBCASE("k = 1 recovers the closed form") {
    const auto grid = make_profile(1, 2000);
    const auto sol = reduced_minimize(kKappaHalfK1, h, 1, grid);
    CHECK(sup_gap(sol.profile, f_closed(0.5, h, 1, grid)) < 1e-8);
    CHECK(sol.multiplier == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(sol.constraintResidual <= 1e-10);
    CHECK(sol.stationarity <= 1e-8);
  }
  SUBCASE("k = 2 near the threshold") {
    const auto grid = make_profile(2, 2000);
    const auto sol = reduced_minimize(0.9 * kKappaStarK2, h, 2, grid);
    CHECK(sol.multiplier < c_star(h, 2));
    CHECK(std::abs(sol.multiplier - kCAtNinetyK2) <= 1e-8);
    CHECK(sup_gap(sol.profile, f_closed(kCAtNinetyK2, h, 2, grid)) < 1e-8);
    CHECK(sol.constraintResidual <= 1e-10);
  }
  SUBCASE("supercritical class") {
    CHECK_THROWS_AS(reduced_minimize(1.01 * kKappaStarK2, h, 2, make_profile(2, 400)), SupercriticalError);
  }
  SUBCASE("degree mismatch") { CHECK_THROWS_AS(reduced_minimize(0.1, h, 2, make_profile(1, 40)), DegreeError); }
}
