#pragma once

// Discrete exterior calculus on a periodic quadrilateral grid (a flat torus
// S^1 x S^1 in coordinates (theta1, theta2)) carrying a conformal factor h
// that depends only on theta2. The metric is g_h = h^{-2} g_E.
//
// Cell layout, with (i, j) taken modulo (n1, n2):
//   vertex (i, j)    at theta1 = i*dx1, theta2 = -P2/2 + (j - 1/2)*dx2
//   edge1  (i, j)    vertex(i, j) -> vertex(i+1, j)      (a dtheta1 edge)
//   edge2  (i, j)    vertex(i, j) -> vertex(i, j+1)      (a dtheta2 edge)
//   face   (i, j)    boundary edge1(i,j) + edge2(i+1,j) - edge1(i,j+1) - edge2(i,j)
// Face rows are centred at theta2 = -P2/2 + j*dx2, so theta2 = 0 is a face
// row whenever n2 is even.

#include <cstddef>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace gms {

enum class Degree : int { Zero = 0, One = 1, Two = 2 };

/// Real values attached to every cell of one degree.
struct Cochain {
  Degree degree = Degree::Zero;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  Cochain& operator+=(const Cochain& other);
  Cochain& operator-=(const Cochain& other);
  Cochain& operator*=(double s);
};

Cochain operator+(Cochain a, const Cochain& b);
Cochain operator-(Cochain a, const Cochain& b);
Cochain operator*(double s, Cochain a);

class GridComplex {
 public:
  GridComplex(int n1, int n2, double period1 = 2.0 * std::numbers::pi,
              double period2 = 2.0 * std::numbers::pi);

  int n1() const noexcept { return n1_; }
  int n2() const noexcept { return n2_; }
  double period1() const noexcept { return period1_; }
  double period2() const noexcept { return period2_; }
  double dx1() const noexcept { return period1_ / n1_; }
  double dx2() const noexcept { return period2_ / n2_; }
  double cell_area() const noexcept { return dx1() * dx2(); }

  std::size_t num_vertices() const noexcept { return static_cast<std::size_t>(n1_) * n2_; }
  std::size_t num_edges() const noexcept { return 2 * num_vertices(); }
  std::size_t num_faces() const noexcept { return num_vertices(); }
  std::size_t num_cells(Degree d) const noexcept;
  int euler_characteristic() const noexcept;

  std::size_t vertex(int i, int j) const noexcept { return slot(i, j); }
  std::size_t edge1(int i, int j) const noexcept { return slot(i, j); }
  std::size_t edge2(int i, int j) const noexcept { return num_vertices() + slot(i, j); }
  std::size_t face(int i, int j) const noexcept { return slot(i, j); }

  double vertex_theta1(int i) const noexcept { return i * dx1(); }
  double vertex_theta2(int j) const noexcept;
  double face_theta2(int j) const noexcept;

  Cochain zeros(Degree d) const;

 private:
  std::size_t slot(int i, int j) const noexcept;

  int n1_;
  int n2_;
  double period1_;
  double period2_;
};

/// Samples of the conformal factor h. Owns a copy of its complex.
class ConformalMetric {
 public:
  ConformalMetric(GridComplex grid, std::vector<double> h_vertex,
                  std::vector<double> h_edge, std::vector<double> h_face);

  static ConformalMetric flat(const GridComplex& grid);

  const GridComplex& grid() const noexcept { return grid_; }
  const std::vector<double>& h_vertex() const noexcept { return h_vertex_; }
  const std::vector<double>& h_edge() const noexcept { return h_edge_; }
  const std::vector<double>& h_face() const noexcept { return h_face_; }

  /// g-volume of a face: h^{-2} * cell area.
  double face_volume(std::size_t f) const noexcept;
  double vertex_volume(std::size_t v) const noexcept;
  double total_volume() const noexcept;

 private:
  GridComplex grid_;
  std::vector<double> h_vertex_;
  std::vector<double> h_edge_;
  std::vector<double> h_face_;
};

/// h as a function of theta2 in [-P2/2, P2/2].
using HSampler = std::function<double(double)>;

/// Builds the n1 x n2 periodic complex and samples h at vertices, edge
/// midpoints and face centres. Throws PreconditionError for n < 4 and
/// InvalidMetricError for a non-positive or non-finite sample.
ConformalMetric build_torus(int n1, int n2, const HSampler& h,
                            double period1 = 2.0 * std::numbers::pi,
                            double period2 = 2.0 * std::numbers::pi);

/// Exterior derivative. Degree 2 input throws DegreeError.
Cochain d(const GridComplex& grid, const Cochain& c);

/// Codifferential induced by inner_product: <d u, a> = <u, codifferential(a)>.
/// Degree 0 input throws DegreeError.
Cochain codifferential(const Cochain& c, const ConformalMetric& m);

/// Per-face value h(face) * |alpha|_E. The Euclidean components are the
/// quadratic means of the two parallel edges per axis; this keeps the
/// face-quadrature Dirichlet form equal to inner_product on 1-cochains.
using FaceField = std::vector<double>;
FaceField pointwise_norm(const Cochain& a, const ConformalMetric& m);

/// Diagonal (DEC Hodge star) L2 pairing.
///   degree 0: h^{-2} cell area per vertex
///   degree 1: dual/primal length ratio per edge (h-free in two dimensions)
///   degree 2: h^{2} / cell area per face
double inner_product(const Cochain& a, const Cochain& b, const ConformalMetric& m);

/// Diagonal weight of inner_product for cell `index` of degree `deg`.
double hodge_weight(const ConformalMetric& m, Degree deg, std::size_t index);

/// Periods along the generating cycles (edge1 row j = 0, edge2 column
/// i = 0), each divided by the cycle length.
std::pair<double, double> periods(const GridComplex& grid, const Cochain& a);

/// max over faces of |d a|.
double closedness_defect(const GridComplex& grid, const Cochain& a);

constexpr double kClosednessTol = 1e-10;

/// The parallel form s1 dtheta1 + s2 dtheta2 as a 1-cochain.
Cochain constant_form(const GridComplex& grid, double s1, double s2);

/// de Rham map of f1 dtheta1 + f2 dtheta2: each edge value is the
/// Gauss-Legendre line integral along that edge.
Cochain integrate_form(const GridComplex& grid,
                       const std::function<double(double, double)>& f1,
                       const std::function<double(double, double)>& f2);

double sup_norm(const Cochain& a, const ConformalMetric& m);

struct HarmonicReport {
  Cochain representative;
  double residualNorm = 0.0;
  int iterations = 0;
};

/// Harmonic representative aStar + d u0 with codifferential == 0 to `tol`
/// (sup norm). Solves the discrete Poisson problem by conjugate gradients.
HarmonicReport harmonic_rep(const Cochain& aStar, const ConformalMetric& m, double tol,
                            int max_iterations = 20000);

}  // namespace gms
