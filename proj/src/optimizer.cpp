#include "gms/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "energy_kernels.hpp"
#include "linear_solver.hpp"

namespace gms {

void SolverConfig::validate() const {
  if (!(gradTol > 0.0)) throw PreconditionError("solver.grad_tol must be positive");
  if (maxNewton <= 0) throw PreconditionError("solver.max_newton must be positive");
  if (maxCG <= 0) throw PreconditionError("solver.max_cg must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw PreconditionError("solver.shrink must lie in (0, 1)");
  if (!(sufficientDecrease > 0.0 && sufficientDecrease < 1.0))
    throw PreconditionError("solver.sufficient_decrease must lie in (0, 1)");
}

namespace {

std::string num(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// Jacobi diagonal of D0^T K D0.
std::vector<double> inverse_diagonal(const Cochain& alpha, const ConformalMetric& m,
                                     const detail::FaceState& s) {
  const GridComplex& grid = m.grid();
  const double area = grid.cell_area();
  const double c1 = 1.0 / (2.0 * grid.dx1() * grid.dx1());
  const double c2 = 1.0 / (2.0 * grid.dx2() * grid.dx2());
  const auto& a = alpha.values;
  std::vector<double> kdiag(grid.num_edges(), 0.0);
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const std::size_t f = grid.face(i, j);
      const double h2k = s.kappa[f] * m.h_face()[f] * m.h_face()[f];
      auto add = [&](std::size_t e, double c) { kdiag[e] += area * c * (s.rho[f] + h2k * c * a[e] * a[e]); };
      add(grid.edge1(i, j), c1);
      add(grid.edge1(i, j + 1), c1);
      add(grid.edge2(i, j), c2);
      add(grid.edge2(i + 1, j), c2);
    }
  std::vector<double> inv(grid.num_vertices());
  for (int j = 0; j < grid.n2(); ++j)
    for (int i = 0; i < grid.n1(); ++i) {
      const double dsum = kdiag[grid.edge1(i, j)] + kdiag[grid.edge1(i - 1, j)] +
                          kdiag[grid.edge2(i, j)] + kdiag[grid.edge2(i, j - 1)];
      inv[grid.vertex(i, j)] = dsum > 0.0 ? 1.0 / dsum : 1.0;
    }
  return inv;
}

double grad_sup_norm(std::span<const double> massless, const ConformalMetric& m) {
  double g = 0.0;
  for (std::size_t v = 0; v < massless.size(); ++v)
    g = std::max(g, std::abs(massless[v] / m.vertex_volume(v)));
  return g;
}

}  // namespace

Solution minimize(const Cochain& aStar, const ConformalMetric& m, const RhoModel& model,
                  const SolverConfig& cfg, const std::optional<Cochain>& initial) {
  cfg.validate();
  const GridComplex& grid = m.grid();
  if (aStar.degree != Degree::One || aStar.size() != grid.num_edges())
    throw DegreeError("minimize: aStar must be a 1-cochain on the complex");
  if (model.kind() == RhoKind::Custom)
    throw PreconditionError("minimize: custom densities carry no convexity guarantee");
  const double defect = closedness_defect(grid, aStar);
  if (defect > kClosednessTol)
    throw PreconditionError("minimize: aStar is not closed (max |d a| = " + num(defect) + ")");

  const std::size_t nv = grid.num_vertices();
  std::vector<double> u(nv, 0.0);
  if (initial) {
    if (initial->degree != Degree::Zero || initial->size() != nv)
      throw DegreeError("minimize: initial potential must be a 0-cochain on the complex");
    u = initial->values;
  }
  detail::remove_mean(u);

  auto alpha_at = [&](const std::vector<double>& pot) {
    return aStar + d(grid, Cochain{Degree::Zero, pot});
  };

  Cochain alpha = alpha_at(u);
  double energy = detail::energy_value(alpha, m, model);
  std::vector<double> g(nv), step(nv), trial(nv);
  int cg_total = 0;
  double grad_norm = std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it) {
    const auto state = detail::face_state(alpha, m, model);
    detail::gradient_massless(alpha, m, state, g);
    grad_norm = grad_sup_norm(g, m);
    if (grad_norm <= cfg.gradTol) {
      Solution sol;
      sol.u = Cochain{Degree::Zero, u};
      sol.alpha = std::move(alpha);
      sol.energy = total_energy(sol.alpha, m, model);
      sol.gradNorm = grad_norm;
      sol.newtonIters = it;
      sol.cgIters = cg_total;
      return sol;
    }
    if (it >= cfg.maxNewton)
      throw MinimizeNonConvergence("minimize: Newton did not converge in " + std::to_string(cfg.maxNewton) +
                                       " iterations, gradient norm " + num(grad_norm),
                                   grad_norm, Cochain{Degree::Zero, u});

    // Inexact Newton step: (D0^T K D0) step = -g.
    std::vector<double> rhs(g);
    for (double& r : rhs) r = -r;
    const double forcing = std::min(0.1, std::sqrt(grad_norm));
    const double cg_tol = forcing * detail::norm2(rhs);
    const auto inv_diag = inverse_diagonal(alpha, m, state);
    detail::LinearOperator apply = [&](std::span<const double> v, std::span<double> out) {
      detail::hessian_massless(alpha, m, state, v, out);
    };
    std::fill(step.begin(), step.end(), 0.0);
    const auto cg = detail::conjugate_gradient(apply, rhs, inv_diag, step, cg_tol, cfg.maxCG);
    cg_total += cg.iterations;
    detail::remove_mean(step);

    double slope = detail::dot(g, step);
    if (!(slope < 0.0)) {
      // Truncated CG gave no descent: fall back to the preconditioned gradient.
      for (std::size_t v = 0; v < nv; ++v) step[v] = -inv_diag[v] * g[v];
      detail::remove_mean(step);
      slope = detail::dot(g, step);
    }

    // Backtracking on the energy. The slack term admits steps whose energy
    // change is below round-off once the gradient is tiny.
    const double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(energy);
    double s = 1.0;
    bool accepted = false;
    Cochain alpha_trial;
    double e_trial = energy;
    while (s > 1e-12) {
      for (std::size_t v = 0; v < nv; ++v) trial[v] = u[v] + s * step[v];
      alpha_trial = alpha_at(trial);
      e_trial = detail::energy_value(alpha_trial, m, model);
      if (e_trial <= energy + cfg.sufficientDecrease * s * slope + slack) {
        accepted = true;
        break;
      }
      s *= cfg.shrink;
    }
    if (!accepted)
      throw MinimizeNonConvergence("minimize: line search failed, gradient norm " + num(grad_norm), grad_norm,
                                   Cochain{Degree::Zero, u});
    u = trial;
    detail::remove_mean(u);
    alpha = alpha_at(u);
    energy = detail::energy_value(alpha, m, model);
  }
}

SweepReport t_sweep(const Cochain& aStar, const ConformalMetric& m, const std::vector<double>& ts,
                    const SolverConfig& cfg) {
  if (ts.empty()) throw PreconditionError("t_sweep: needs at least one t");
  for (std::size_t k = 0; k < ts.size(); ++k) {
    if (!(ts[k] > 0.0)) throw PreconditionError("t_sweep: every t must be positive");
    if (k > 0 && !(ts[k] > ts[k - 1])) throw PreconditionError("t_sweep: ts must be strictly increasing");
  }

  SweepReport rep;
  rep.gVolume = m.total_volume();
  const auto harmonic = harmonic_rep(aStar, m, std::max(1e-12, 0.01 * cfg.gradTol));
  rep.harmonic = harmonic.representative;
  rep.harmonicSupNorm = sup_norm(rep.harmonic, m);

  std::optional<Cochain> warm;
  for (double t : ts) {
    SweepEntry entry;
    entry.t = t;
    try {
      entry.solution = minimize(aStar, m, RhoModel::tgms(t), cfg, warm);
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("t = " + num(t) + ": " + e.what(), e.residual());
    }
    entry.tvValue = entry.solution.energy.tvValue;
    entry.tGmsValue = entry.solution.energy.value;
    entry.supNorm = entry.solution.energy.maxPointwiseNorm;
    entry.harmonicGap = sup_norm(entry.solution.alpha - rep.harmonic, m);
    warm = entry.solution.u;
    rep.entries.push_back(std::move(entry));
  }

  double best_tv = std::numeric_limits<double>::infinity();
  for (const auto& e : rep.entries) best_tv = std::min(best_tv, e.tvValue);
  for (auto& e : rep.entries) e.gammaUpperBound = rep.gVolume / e.t + best_tv;
  return rep;
}

std::vector<Solution> class_sweep(const Cochain& aStar, const ConformalMetric& m,
                                  const std::vector<double>& scales, const SolverConfig& cfg) {
  if (scales.empty()) throw PreconditionError("class_sweep: needs at least one scale");
  for (std::size_t k = 1; k < scales.size(); ++k)
    if (!(scales[k] > scales[k - 1])) throw PreconditionError("class_sweep: scales must be strictly increasing");

  std::vector<Solution> out;
  std::optional<Cochain> warm;
  double prev = 0.0;
  for (double s : scales) {
    if (warm && prev != 0.0) *warm *= s / prev;
    try {
      out.push_back(minimize(s * aStar, m, RhoModel::gms(), cfg, warm));
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError("scale = " + num(s) + ": " + e.what(), e.residual());
    }
    warm = out.back().u;
    prev = s;
  }
  return out;
}

}  // namespace gms
