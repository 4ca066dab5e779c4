#include "gms/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "energy_kernels.hpp"
#include "gms/errors.hpp"
#include "gms/quadrature.hpp"
#include "linear_solver.hpp"

namespace gms {

RhoModel::RhoModel(RhoKind kind, double t, Fn rho, Fn rho_plus, std::string name)
    : kind_(kind), t_(t), rho_(std::move(rho)), rho_plus_(std::move(rho_plus)), name_(std::move(name)) {}

RhoModel RhoModel::gms() {
  return RhoModel(RhoKind::GMS, 1.0, nullptr, nullptr, "gms");
}

RhoModel RhoModel::tgms(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw PreconditionError("tgms: t must be positive");
  return RhoModel(RhoKind::TGMS, t, nullptr, nullptr, "tgms");
}

RhoModel RhoModel::linear() { return RhoModel(RhoKind::Linear, 1.0, nullptr, nullptr, "linear"); }

RhoModel RhoModel::custom(Fn rho, Fn rho_plus, std::string name) {
  if (!rho || !rho_plus) throw PreconditionError("custom model needs both rho and rho_plus");
  return RhoModel(RhoKind::Custom, 1.0, std::move(rho), std::move(rho_plus), std::move(name));
}

double RhoModel::rho(double q) const {
  switch (kind_) {
    case RhoKind::GMS: return 1.0 / std::sqrt(1.0 + q * q);
    case RhoKind::TGMS: return 1.0 / std::sqrt(1.0 / (t_ * t_) + q * q);
    case RhoKind::Linear: return 1.0;
    case RhoKind::Custom: return rho_(q);
  }
  return 0.0;
}

double RhoModel::rho_plus(double q) const {
  switch (kind_) {
    case RhoKind::GMS: {
      const double s = 1.0 + q * q;
      return 1.0 / (s * std::sqrt(s));
    }
    case RhoKind::TGMS: {
      const double eps = 1.0 / (t_ * t_);
      const double s = eps + q * q;
      return eps / (s * std::sqrt(s));
    }
    case RhoKind::Linear: return 1.0;
    case RhoKind::Custom: return rho_plus_(q);
  }
  return 0.0;
}

double RhoModel::density(double q) const {
  switch (kind_) {
    case RhoKind::GMS: return std::sqrt(1.0 + q * q);
    case RhoKind::TGMS: return std::sqrt(1.0 / (t_ * t_) + q * q);
    case RhoKind::Linear: return 0.5 * q * q;
    case RhoKind::Custom:
      if (q == 0.0) return 0.0;
      return adaptive_integrate([this](double s) { return s * rho_(s); }, 0.0, q, 1e-14).value;
  }
  return 0.0;
}

double RhoModel::rho_prime_over_q(double q) const {
  switch (kind_) {
    case RhoKind::GMS: {
      const double s = 1.0 + q * q;
      return -1.0 / (s * std::sqrt(s));
    }
    case RhoKind::TGMS: {
      const double s = 1.0 / (t_ * t_) + q * q;
      return -1.0 / (s * std::sqrt(s));
    }
    case RhoKind::Linear: return 0.0;
    case RhoKind::Custom:
      // Multiplies (sum c a b)^2 <= q^2 |b|^2, so the cancellation error
      // stays bounded by eps |b|^2.
      if (q == 0.0) return 0.0;
      return (rho_plus_(q) - rho_(q)) / (q * q);
  }
  return 0.0;
}

// ---------------------------------------------------------------------------

namespace detail {

FaceState face_state(const Cochain& alpha, const ConformalMetric& m, const RhoModel& model) {
  FaceState s;
  s.q = pointwise_norm(alpha, m);
  s.rho.resize(s.q.size());
  s.kappa.resize(s.q.size());
  for (std::size_t f = 0; f < s.q.size(); ++f) {
    s.rho[f] = model.rho(s.q[f]);
    s.kappa[f] = s.q[f] > 0.0 ? model.rho_prime_over_q(s.q[f]) : 0.0;
  }
  return s;
}

void transpose_d0(const GridComplex& grid, std::span<const double> y, std::span<double> out) {
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i)
      out[grid.vertex(i, j)] = y[grid.edge1(i - 1, j)] - y[grid.edge1(i, j)] +
                               y[grid.edge2(i, j - 1)] - y[grid.edge2(i, j)];
}

void gradient_massless(const Cochain& alpha, const ConformalMetric& m, const FaceState& s,
                       std::span<double> out) {
  const GridComplex& grid = m.grid();
  const double w1 = hodge_weight(m, Degree::One, 0);
  const double w2 = hodge_weight(m, Degree::One, grid.num_vertices());
  std::vector<double> flux(grid.num_edges());
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const std::size_t e1 = grid.edge1(i, j), e2 = grid.edge2(i, j);
      const double r1 = 0.5 * (s.rho[grid.face(i, j)] + s.rho[grid.face(i, j - 1)]);
      const double r2 = 0.5 * (s.rho[grid.face(i, j)] + s.rho[grid.face(i - 1, j)]);
      flux[e1] = w1 * r1 * alpha.values[e1];
      flux[e2] = w2 * r2 * alpha.values[e2];
    }
  transpose_d0(grid, flux, out);
}

void edge_hessian(const Cochain& alpha, const ConformalMetric& m, const FaceState& s,
                  std::span<const double> b, std::span<double> out) {
  const GridComplex& grid = m.grid();
  const double area = grid.cell_area();
  const double c1 = 1.0 / (2.0 * grid.dx1() * grid.dx1());
  const double c2 = 1.0 / (2.0 * grid.dx2() * grid.dx2());
  const auto& a = alpha.values;
  std::fill(out.begin(), out.end(), 0.0);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const std::size_t f = grid.face(i, j);
      const std::size_t eb = grid.edge1(i, j), et = grid.edge1(i, j + 1);
      const std::size_t el = grid.edge2(i, j), er = grid.edge2(i + 1, j);
      const double rho = s.rho[f];
      const double h = m.h_face()[f];
      const double mixed = s.kappa[f] * h * h *
                           (c1 * (a[eb] * b[eb] + a[et] * b[et]) + c2 * (a[el] * b[el] + a[er] * b[er]));
      out[eb] += area * c1 * (rho * b[eb] + mixed * a[eb]);
      out[et] += area * c1 * (rho * b[et] + mixed * a[et]);
      out[el] += area * c2 * (rho * b[el] + mixed * a[el]);
      out[er] += area * c2 * (rho * b[er] + mixed * a[er]);
    }
}

void hessian_massless(const Cochain& alpha, const ConformalMetric& m, const FaceState& s,
                      std::span<const double> v, std::span<double> out) {
  const GridComplex& grid = m.grid();
  const Cochain dv = d(grid, Cochain{Degree::Zero, std::vector<double>(v.begin(), v.end())});
  std::vector<double> kb(grid.num_edges());
  edge_hessian(alpha, m, s, dv.values, kb);
  transpose_d0(grid, kb, out);
}

double energy_value(const Cochain& alpha, const ConformalMetric& m, const RhoModel& model) {
  const FaceField q = pointwise_norm(alpha, m);
  double e = 0.0;
  for (std::size_t f = 0; f < q.size(); ++f) e += model.density(q[f]) * m.face_volume(f);
  return e;
}

}  // namespace detail

// ---------------------------------------------------------------------------

namespace {

Cochain alpha_of(const Cochain& u, const Cochain& aStar, const ConformalMetric& m) {
  if (u.degree != Degree::Zero || u.size() != m.grid().num_vertices())
    throw DegreeError("potential must be a degree-0 cochain on the complex");
  if (aStar.degree != Degree::One || aStar.size() != m.grid().num_edges())
    throw DegreeError("class representative must be a degree-1 cochain on the complex");
  return aStar + d(m.grid(), u);
}

Cochain divide_by_vertex_mass(std::vector<double> massless, const ConformalMetric& m) {
  for (std::size_t v = 0; v < massless.size(); ++v) massless[v] /= m.vertex_volume(v);
  return Cochain{Degree::Zero, std::move(massless)};
}

}  // namespace

EnergyReport total_energy(const Cochain& a, const ConformalMetric& m, const RhoModel& model) {
  const FaceField q = pointwise_norm(a, m);
  EnergyReport r;
  for (std::size_t f = 0; f < q.size(); ++f) {
    const double vol = m.face_volume(f);
    r.value += model.density(q[f]) * vol;
    r.tvValue += q[f] * vol;
    r.maxPointwiseNorm = std::max(r.maxPointwiseNorm, q[f]);
  }
  return r;
}

Cochain grad_potential(const Cochain& u, const Cochain& aStar, const ConformalMetric& m,
                       const RhoModel& model) {
  const Cochain alpha = alpha_of(u, aStar, m);
  const auto state = detail::face_state(alpha, m, model);
  std::vector<double> g(m.grid().num_vertices());
  detail::gradient_massless(alpha, m, state, g);
  return divide_by_vertex_mass(std::move(g), m);
}

Cochain hessian_apply(const Cochain& u, const Cochain& v, const Cochain& aStar,
                      const ConformalMetric& m, const RhoModel& model) {
  const Cochain alpha = alpha_of(u, aStar, m);
  if (v.degree != Degree::Zero || v.size() != m.grid().num_vertices())
    throw DegreeError("hessian direction must be a degree-0 cochain on the complex");
  const auto state = detail::face_state(alpha, m, model);
  std::vector<double> hv(m.grid().num_vertices());
  detail::hessian_massless(alpha, m, state, v.values, hv);
  return divide_by_vertex_mass(std::move(hv), m);
}

double convexity_lower_bound(const Cochain& u, const Cochain& v, const Cochain& aStar,
                             const ConformalMetric& m) {
  const Cochain alpha = alpha_of(u, aStar, m);
  const FaceField q = pointwise_norm(alpha, m);
  const FaceField dv = pointwise_norm(d(m.grid(), v), m);
  double s = 0.0;
  for (std::size_t f = 0; f < q.size(); ++f) {
    const double w = 1.0 + q[f] * q[f];
    s += dv[f] * dv[f] / (w * std::sqrt(w)) * m.face_volume(f);
  }
  return s;
}

// ---------------------------------------------------------------------------

namespace {

struct SampledBounds {
  double lower;
  double upper;
};

SampledBounds sample_bounds(const RhoModel& model, double c, int n) {
  SampledBounds b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (int i = 1; i <= n; ++i) {
    const double q = c * static_cast<double>(i) / n;
    const double r = model.rho(q), rp = model.rho_plus(q);
    if (!std::isfinite(r) || !std::isfinite(rp))
      throw ModelDomainError("model '" + model.name() + "' is not finite at q = " + std::to_string(q));
    b.lower = std::min({b.lower, r, rp});
    b.upper = std::max({b.upper, r, rp});
  }
  return b;
}

double k_of(const SampledBounds& b) {
  if (!(b.lower > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(b.upper, 1.0 / b.lower);
}

}  // namespace

AdmissibilityReport admissibility_probe(const RhoModel& model, double c, int nSamples, int doublings) {
  if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("admissibility_probe: c must be positive");
  if (nSamples < 100) throw PreconditionError("admissibility_probe: needs at least 100 samples");
  if (doublings < 2) throw PreconditionError("admissibility_probe: needs at least 2 doublings");

  AdmissibilityReport rep;
  rep.c = c;
  const SampledBounds b = sample_bounds(model, c, nSamples);
  rep.kLower = b.lower;
  rep.kUpper = b.upper;
  rep.k = k_of(b);
  rep.admissible = std::isfinite(rep.k);

  // Regular means one k serves every c: look for k(c 2^m) to level off.
  double prev_k = rep.k;
  double last_growth = std::numeric_limits<double>::infinity();
  rep.regularityIndicator.emplace_back(c, b.lower > 0.0 ? b.upper / b.lower : rep.k);
  for (int m = 1; m <= doublings && rep.admissible; ++m) {
    const double cm = std::ldexp(c, m);
    const SampledBounds bm = sample_bounds(model, cm, nSamples);
    const double km = k_of(bm);
    rep.regularityIndicator.emplace_back(cm, bm.lower > 0.0 ? bm.upper / bm.lower : km);
    if (!std::isfinite(km)) {
      last_growth = std::numeric_limits<double>::infinity();
      break;
    }
    last_growth = km / prev_k - 1.0;
    prev_k = km;
  }
  rep.regular = rep.admissible && last_growth <= 1e-6;
  return rep;
}

}  // namespace gms
