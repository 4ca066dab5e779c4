#include "gms/exterior.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "gms/errors.hpp"
#include "linear_solver.hpp"

namespace gms {

namespace {

void require_same_shape(const Cochain& a, const Cochain& b) {
  if (a.degree != b.degree || a.size() != b.size())
    throw DegreeError("cochain degree or length mismatch");
}

void require_degree(const GridComplex& grid, const Cochain& c, Degree deg, const char* op) {
  if (c.degree != deg)
    throw DegreeError(std::string(op) + ": expected a degree-" +
                      std::to_string(static_cast<int>(deg)) + " cochain");
  if (c.size() != grid.num_cells(deg))
    throw DegreeError(std::string(op) + ": cochain length does not match the complex");
}

double wrap_theta(double theta, double period) {
  const double half = 0.5 * period;
  double t = std::fmod(theta + half, period);
  if (t < 0) t += period;
  return t - half;
}

}  // namespace

Cochain& Cochain::operator+=(const Cochain& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += other.values[i];
  return *this;
}

Cochain& Cochain::operator-=(const Cochain& other) {
  require_same_shape(*this, other);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] -= other.values[i];
  return *this;
}

Cochain& Cochain::operator*=(double s) {
  for (double& v : values) v *= s;
  return *this;
}

Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
Cochain operator*(double s, Cochain a) { return a *= s; }

// ---------------------------------------------------------------------------

GridComplex::GridComplex(int n1, int n2, double period1, double period2)
    : n1_(n1), n2_(n2), period1_(period1), period2_(period2) {
  if (n1 < 4 || n2 < 4)
    throw PreconditionError("grid needs at least 4 cells per axis, got " + std::to_string(n1) +
                            " x " + std::to_string(n2));
  if (!(period1 > 0.0) || !(period2 > 0.0))
    throw PreconditionError("grid periods must be positive");
}

std::size_t GridComplex::num_cells(Degree d) const noexcept {
  switch (d) {
    case Degree::Zero: return num_vertices();
    case Degree::One: return num_edges();
    case Degree::Two: return num_faces();
  }
  return 0;
}

int GridComplex::euler_characteristic() const noexcept {
  return static_cast<int>(num_vertices()) - static_cast<int>(num_edges()) +
         static_cast<int>(num_faces());
}

std::size_t GridComplex::slot(int i, int j) const noexcept {
  const int ii = ((i % n1_) + n1_) % n1_;
  const int jj = ((j % n2_) + n2_) % n2_;
  return static_cast<std::size_t>(jj) * n1_ + ii;
}

double GridComplex::vertex_theta2(int j) const noexcept {
  return -0.5 * period2_ + (j - 0.5) * dx2();
}

double GridComplex::face_theta2(int j) const noexcept { return -0.5 * period2_ + j * dx2(); }

Cochain GridComplex::zeros(Degree d) const {
  return Cochain{d, std::vector<double>(num_cells(d), 0.0)};
}

// ---------------------------------------------------------------------------

ConformalMetric::ConformalMetric(GridComplex grid, std::vector<double> h_vertex,
                                 std::vector<double> h_edge, std::vector<double> h_face)
    : grid_(grid),
      h_vertex_(std::move(h_vertex)),
      h_edge_(std::move(h_edge)),
      h_face_(std::move(h_face)) {
  if (h_vertex_.size() != grid_.num_vertices() || h_edge_.size() != grid_.num_edges() ||
      h_face_.size() != grid_.num_faces())
    throw InvalidMetricError("metric sample counts do not match the complex");
  auto check = [](const std::vector<double>& v, const char* where) {
    for (double x : v)
      if (!(x > 0.0) || !std::isfinite(x))
        throw InvalidMetricError(std::string("non-positive conformal factor sample at ") + where);
  };
  check(h_vertex_, "a vertex");
  check(h_edge_, "an edge");
  check(h_face_, "a face");
}

ConformalMetric ConformalMetric::flat(const GridComplex& grid) {
  return ConformalMetric(grid, std::vector<double>(grid.num_vertices(), 1.0),
                         std::vector<double>(grid.num_edges(), 1.0),
                         std::vector<double>(grid.num_faces(), 1.0));
}

double ConformalMetric::face_volume(std::size_t f) const noexcept {
  return grid_.cell_area() / (h_face_[f] * h_face_[f]);
}

double ConformalMetric::vertex_volume(std::size_t v) const noexcept {
  return grid_.cell_area() / (h_vertex_[v] * h_vertex_[v]);
}

double ConformalMetric::total_volume() const noexcept {
  double vol = 0.0;
  for (std::size_t f = 0; f < grid_.num_faces(); ++f) vol += face_volume(f);
  return vol;
}

ConformalMetric build_torus(int n1, int n2, const HSampler& h, double period1, double period2) {
  GridComplex grid(n1, n2, period1, period2);
  std::vector<double> hv(grid.num_vertices()), he(grid.num_edges()), hf(grid.num_faces());
  for (int j = 0; j < n2; ++j) {
    // h depends on theta2 only: sample once per row.
    const double h_vrow = h(wrap_theta(grid.vertex_theta2(j), period2));
    const double h_frow = h(wrap_theta(grid.face_theta2(j), period2));
    for (int i = 0; i < n1; ++i) {
      hv[grid.vertex(i, j)] = h_vrow;
      he[grid.edge1(i, j)] = h_vrow;
      he[grid.edge2(i, j)] = h_frow;
      hf[grid.face(i, j)] = h_frow;
    }
  }
  return ConformalMetric(grid, std::move(hv), std::move(he), std::move(hf));
}

// ---------------------------------------------------------------------------

Cochain d(const GridComplex& grid, const Cochain& c) {
  const int n1 = grid.n1(), n2 = grid.n2();
  if (c.degree == Degree::Two) throw DegreeError("d: no cells above degree 2");
  require_degree(grid, c, c.degree, "d");
  const auto& x = c.values;

  if (c.degree == Degree::Zero) {
    Cochain out = grid.zeros(Degree::One);
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        out.values[grid.edge1(i, j)] = x[grid.vertex(i + 1, j)] - x[grid.vertex(i, j)];
        out.values[grid.edge2(i, j)] = x[grid.vertex(i, j + 1)] - x[grid.vertex(i, j)];
      }
    return out;
  }

  Cochain out = grid.zeros(Degree::Two);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i)
      out.values[grid.face(i, j)] = x[grid.edge1(i, j)] + x[grid.edge2(i + 1, j)] -
                                    x[grid.edge1(i, j + 1)] - x[grid.edge2(i, j)];
  return out;
}

double hodge_weight(const ConformalMetric& m, Degree deg, std::size_t index) {
  const GridComplex& g = m.grid();
  switch (deg) {
    case Degree::Zero: return m.vertex_volume(index);
    case Degree::One:
      return index < g.num_vertices() ? g.dx2() / g.dx1() : g.dx1() / g.dx2();
    case Degree::Two: {
      const double h = m.h_face()[index];
      return h * h / g.cell_area();
    }
  }
  return 0.0;
}

Cochain codifferential(const Cochain& c, const ConformalMetric& m) {
  const GridComplex& grid = m.grid();
  const int n1 = grid.n1(), n2 = grid.n2();
  if (c.degree == Degree::Zero) throw DegreeError("codifferential: no cells below degree 0");
  require_degree(grid, c, c.degree, "codifferential");

  if (c.degree == Degree::One) {
    std::vector<double> y(c.size());
    for (std::size_t e = 0; e < y.size(); ++e) y[e] = hodge_weight(m, Degree::One, e) * c.values[e];
    Cochain out = grid.zeros(Degree::Zero);
    for (int j = 0; j < n2; ++j)
      for (int i = 0; i < n1; ++i) {
        const std::size_t v = grid.vertex(i, j);
        const double s = y[grid.edge1(i - 1, j)] - y[grid.edge1(i, j)] + y[grid.edge2(i, j - 1)] -
                         y[grid.edge2(i, j)];
        out.values[v] = s / hodge_weight(m, Degree::Zero, v);
      }
    return out;
  }

  std::vector<double> y(c.size());
  for (std::size_t f = 0; f < y.size(); ++f) y[f] = hodge_weight(m, Degree::Two, f) * c.values[f];
  Cochain out = grid.zeros(Degree::One);
  for (int j = 0; j < n2; ++j)
    for (int i = 0; i < n1; ++i) {
      const std::size_t e1 = grid.edge1(i, j), e2 = grid.edge2(i, j);
      out.values[e1] = (y[grid.face(i, j)] - y[grid.face(i, j - 1)]) / hodge_weight(m, Degree::One, e1);
      out.values[e2] = (y[grid.face(i - 1, j)] - y[grid.face(i, j)]) / hodge_weight(m, Degree::One, e2);
    }
  return out;
}

FaceField pointwise_norm(const Cochain& a, const ConformalMetric& m) {
  const GridComplex& grid = m.grid();
  require_degree(grid, a, Degree::One, "pointwise_norm");
  const double inv1 = 1.0 / (2.0 * grid.dx1() * grid.dx1());
  const double inv2 = 1.0 / (2.0 * grid.dx2() * grid.dx2());
  const auto& x = a.values;
  FaceField out(grid.num_faces());
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const double b = x[grid.edge1(i, j)], t = x[grid.edge1(i, j + 1)];
      const double l = x[grid.edge2(i, j)], r = x[grid.edge2(i + 1, j)];
      const double q2 = (b * b + t * t) * inv1 + (l * l + r * r) * inv2;
      const std::size_t f = grid.face(i, j);
      out[f] = m.h_face()[f] * std::sqrt(q2);
    }
  return out;
}

double inner_product(const Cochain& a, const Cochain& b, const ConformalMetric& m) {
  require_same_shape(a, b);
  require_degree(m.grid(), a, a.degree, "inner_product");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += hodge_weight(m, a.degree, k) * a.values[k] * b.values[k];
  return s;
}

std::pair<double, double> periods(const GridComplex& grid, const Cochain& a) {
  require_degree(grid, a, Degree::One, "periods");
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < grid.n1(); ++i) s1 += a.values[grid.edge1(i, 0)];
  for (int j = 0; j < grid.n2(); ++j) s2 += a.values[grid.edge2(0, j)];
  return {s1 / grid.period1(), s2 / grid.period2()};
}

double closedness_defect(const GridComplex& grid, const Cochain& a) {
  const Cochain da = d(grid, a);
  return detail::norm_inf(da.values);
}

Cochain constant_form(const GridComplex& grid, double s1, double s2) {
  Cochain out = grid.zeros(Degree::One);
  const std::size_t nv = grid.num_vertices();
  std::fill(out.values.begin(), out.values.begin() + static_cast<std::ptrdiff_t>(nv), s1 * grid.dx1());
  std::fill(out.values.begin() + static_cast<std::ptrdiff_t>(nv), out.values.end(), s2 * grid.dx2());
  return out;
}

Cochain integrate_form(const GridComplex& grid, const std::function<double(double, double)>& f1,
                       const std::function<double(double, double)>& f2) {
  using Rule = boost::math::quadrature::gauss<double, 10>;
  Cochain out = grid.zeros(Degree::One);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const double t1 = grid.vertex_theta1(i), t2 = grid.vertex_theta2(j);
      out.values[grid.edge1(i, j)] =
          Rule::integrate([&](double s) { return f1(s, t2); }, t1, t1 + grid.dx1());
      out.values[grid.edge2(i, j)] =
          Rule::integrate([&](double s) { return f2(t1, s); }, t2, t2 + grid.dx2());
    }
  return out;
}

double sup_norm(const Cochain& a, const ConformalMetric& m) {
  return detail::norm_inf(pointwise_norm(a, m));
}

// ---------------------------------------------------------------------------

HarmonicReport harmonic_rep(const Cochain& aStar, const ConformalMetric& m, double tol,
                            int max_iterations) {
  const GridComplex& grid = m.grid();
  require_degree(grid, aStar, Degree::One, "harmonic_rep");
  if (!(tol > 0.0)) throw PreconditionError("harmonic_rep: tolerance must be positive");
  const double defect = closedness_defect(grid, aStar);
  if (defect > kClosednessTol)
    throw PreconditionError("harmonic_rep: input is not closed (max |d a| = " +
                            std::to_string(defect) + ")");

  const std::size_t nv = grid.num_vertices();
  double min_w0 = hodge_weight(m, Degree::Zero, 0);
  for (std::size_t v = 1; v < nv; ++v) min_w0 = std::min(min_w0, hodge_weight(m, Degree::Zero, v));

  // delta u = -d* aStar, written without the vertex masses:
  //   D0^T W1 D0 u = -D0^T W1 aStar.
  auto massless_div = [&](const Cochain& edge_values, std::span<double> out) {
    const Cochain dstar = codifferential(edge_values, m);
    for (std::size_t v = 0; v < nv; ++v) out[v] = hodge_weight(m, Degree::Zero, v) * dstar.values[v];
  };
  detail::LinearOperator apply = [&](std::span<const double> u, std::span<double> out) {
    Cochain uc{Degree::Zero, std::vector<double>(u.begin(), u.end())};
    massless_div(d(grid, uc), out);
  };

  std::vector<double> rhs(nv);
  massless_div(aStar, rhs);
  for (double& r : rhs) r = -r;

  const double w11 = hodge_weight(m, Degree::One, 0);
  const double w12 = hodge_weight(m, Degree::One, nv);
  std::vector<double> inv_diag(nv, 1.0 / (2.0 * (w11 + w12)));

  std::vector<double> u(nv, 0.0);
  HarmonicReport report;
  double cg_tol = tol * min_w0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    const int budget = max_iterations - report.iterations;
    const auto cg = detail::conjugate_gradient(apply, rhs, inv_diag, u, cg_tol, budget);
    report.iterations += cg.iterations;
    detail::remove_mean(u);
    Cochain rep = aStar + d(grid, Cochain{Degree::Zero, u});
    report.residualNorm = detail::norm_inf(codifferential(rep, m).values);
    report.representative = std::move(rep);
    if (report.residualNorm <= tol) return report;
    if (!cg.converged || report.iterations >= max_iterations) break;
    cg_tol *= 0.1;
  }
  throw NonConvergenceError("harmonic_rep: conjugate gradients did not reach tolerance, residual " +
                                std::to_string(report.residualNorm),
                            report.residualNorm);
}

}  // namespace gms
