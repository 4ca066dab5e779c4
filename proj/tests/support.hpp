#pragma once

// Shared generators and dense oracles for the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gms/exterior.hpp"

namespace gms::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::vector<double> random_values(std::mt19937_64& rng, std::size_t n, double scale) {
  std::vector<double> v(n);
  for (double& x : v) x = uniform(rng, -scale, scale);
  return v;
}

inline Cochain random_cochain(std::mt19937_64& rng, const GridComplex& g, Degree deg, double scale) {
  return Cochain{deg, random_values(rng, g.num_cells(deg), scale)};
}

/// Smooth random potential: a few low Fourier modes, so finite differences
/// of the energy stay well conditioned on coarse grids.
inline Cochain smooth_potential(std::mt19937_64& rng, const GridComplex& g, double scale) {
  Cochain u = g.zeros(Degree::Zero);
  for (int mode = 0; mode < 4; ++mode) {
    const int k1 = static_cast<int>(rng() % 3), k2 = static_cast<int>(rng() % 3);
    const double amp = uniform(rng, -scale, scale), phase = uniform(rng, 0.0, 6.283185307179586);
    for (int j = 0; j < g.n2(); ++j)
      for (int i = 0; i < g.n1(); ++i)
        u.values[g.vertex(i, j)] += amp * std::sin(k1 * g.vertex_theta1(i) + k2 * g.vertex_theta2(j) + phase);
  }
  return u;
}

/// Incidence matrix of d on 0-cochains, built from the cell index maps
/// rather than from gms::d.
inline Eigen::MatrixXd dense_d0(const GridComplex& g) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_edges()),
                                            static_cast<Eigen::Index>(g.num_vertices()));
  for (int j = 0; j < g.n2(); ++j)
    for (int i = 0; i < g.n1(); ++i) {
      const auto e1 = static_cast<Eigen::Index>(g.edge1(i, j)), e2 = static_cast<Eigen::Index>(g.edge2(i, j));
      D(e1, static_cast<Eigen::Index>(g.vertex(i + 1, j))) += 1.0;
      D(e1, static_cast<Eigen::Index>(g.vertex(i, j))) -= 1.0;
      D(e2, static_cast<Eigen::Index>(g.vertex(i, j + 1))) += 1.0;
      D(e2, static_cast<Eigen::Index>(g.vertex(i, j))) -= 1.0;
    }
  return D;
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace gms::testing
