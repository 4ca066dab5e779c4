#pragma once

#include <optional>
#include <vector>

#include "gms/energy.hpp"
#include "gms/errors.hpp"
#include "gms/exterior.hpp"

namespace gms {

struct SolverConfig {
  double gradTol = 1e-9;
  int maxNewton = 100;
  int maxCG = 2000;
  double shrink = 0.5;
  double sufficientDecrease = 1e-4;

  /// Throws PreconditionError unless every field is in range.
  void validate() const;
};

struct Solution {
  Cochain u;      // mean-zero potential
  Cochain alpha;  // aStar + d u
  EnergyReport energy;
  double gradNorm = 0.0;  // sup norm of grad_potential
  int newtonIters = 0;
  int cgIters = 0;
};

/// Raised when Newton exhausts maxNewton. Keeps the last iterate.
class MinimizeNonConvergence : public NonConvergenceError {
 public:
  MinimizeNonConvergence(const std::string& what, double residual, Cochain last_u)
      : NonConvergenceError(what, residual), last_u_(std::move(last_u)) {}
  const Cochain& last_iterate() const noexcept { return last_u_; }

 private:
  Cochain last_u_;
};

/// Damped inexact Newton on the potential for the strictly convex energy of
/// `model` (GMS, tGMS or Linear) in the class of aStar. `initial` is an
/// optional starting potential; the default is u = 0.
Solution minimize(const Cochain& aStar, const ConformalMetric& m, const RhoModel& model,
                  const SolverConfig& cfg, const std::optional<Cochain>& initial = std::nullopt);

struct SweepEntry {
  double t = 0.0;
  Solution solution;  // beta_t, the tGMS(t) minimizer in [aStar]
  double tvValue = 0.0;
  double tGmsValue = 0.0;
  double supNorm = 0.0;
  double harmonicGap = 0.0;      // sup |beta_t - alpha_H|_g
  double gammaUpperBound = 0.0;  // gVolume / t + smallest TV value in the sweep
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  Cochain harmonic;  // alpha_H
  double harmonicSupNorm = 0.0;
  double gVolume = 0.0;
};

/// tGMS minimizers of [aStar] for ascending ts, each warm-started from the
/// previous potential.
SweepReport t_sweep(const Cochain& aStar, const ConformalMetric& m, const std::vector<double>& ts,
                    const SolverConfig& cfg);

/// GMS minimizers in the classes [s aStar] for ascending scales s; the
/// previous potential is rescaled by s_next / s_prev as the warm start.
std::vector<Solution> class_sweep(const Cochain& aStar, const ConformalMetric& m,
                                  const std::vector<double>& scales, const SolverConfig& cfg);

}  // namespace gms
