#pragma once

// Massless building blocks shared by the energy and optimizer modules. The
// vertex-level quantities here omit the degree-0 mass, i.e. they are plain
// partial derivatives with respect to the vertex values of u.

#include <span>
#include <vector>

#include "gms/energy.hpp"
#include "gms/exterior.hpp"

namespace gms::detail {

struct FaceState {
  std::vector<double> q;      // |alpha|_g per face
  std::vector<double> rho;    // rho(q)
  std::vector<double> kappa;  // rho'(q)/q, zero where q == 0
};

FaceState face_state(const Cochain& alpha, const ConformalMetric& m, const RhoModel& model);

/// D0^T applied to an edge vector.
void transpose_d0(const GridComplex& grid, std::span<const double> edge, std::span<double> out);

/// dE/du_v for every vertex v.
void gradient_massless(const Cochain& alpha, const ConformalMetric& m, const FaceState& s,
                       std::span<double> out);

/// K b where b is an edge vector; K is the second variation at alpha.
void edge_hessian(const Cochain& alpha, const ConformalMetric& m, const FaceState& s,
                  std::span<const double> b, std::span<double> out);

/// D0^T K D0 v.
void hessian_massless(const Cochain& alpha, const ConformalMetric& m, const FaceState& s,
                      std::span<const double> v, std::span<double> out);

/// sum_f F(q_f) vol_f without building a report.
double energy_value(const Cochain& alpha, const ConformalMetric& m, const RhoModel& model);

}  // namespace gms::detail
