#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sps/core/oracle.hpp"
#include "sps/core/series.hpp"

namespace sps {

enum class FitMethod { kSumConstraint, kTailLimit };

const char* fit_method_name(FitMethod method);

struct FitResult {
  Vector p;
  FitMethod method = FitMethod::kSumConstraint;
  // Sum constraint: max equation misfit. Tail limit: largest spread of the
  // per-sample estimates over any mode's window.
  double residual = 0.0;
  double t_ref = 0.0;
  int iterations = 0;
  std::vector<std::string> warnings;
};

struct FitOptions {
  int max_iterations = 100;
  int max_halvings = 30;
  // Converged once max misfit <= tolerance * max(1, |x_ref|_inf).
  double tolerance = 1e-10;
  // When set and t_ref lies below it, the fit still runs but records a warning.
  std::optional<double> certified_t0;
};

// Solves evaluate(scale_free_parameters(unit, p), lambda, t_ref) = x_ref for p
// by damped Newton, starting from the linearized solution.
FitResult fit_sum(const CoefficientTensor& unit, const Vector& lambda, const Vector& x_ref,
                  double t_ref, const FitOptions& options = {});

struct TailFitOptions {
  // Each mode is estimated over the final fraction of [0, t_k], where t_k is
  // the trajectory end or the time mode k has decayed to decay_floor,
  // whichever comes first.
  double window_fraction = 0.25;
  double decay_floor = 1e-8;
  // Allowed spread of the per-sample estimates, relative to their mean.
  double drift_tolerance = 0.01;
  // Absolute allowance added to the drift check, scaled by max(1, |c|_inf).
  double drift_floor = 1e-6;
};

// Recovers p from a trajectory by successive deflation of the slow modes.
//
// The deviation x - c is projected onto each mode with the inverse of the
// first-order directions. Mode k is then matched sample by sample against the
// series restricted to modes 1..k, with p_1..p_{k-1} already known and the
// faster modes dropped; each sample gives a scalar polynomial equation in p_k.
// With the linear terms only this reduces to lim (x - c) e^{-lambda_k t}.
FitResult fit_tail_limits(const Trajectory& trajectory, const CoefficientTensor& unit,
                          const Vector& lambda, const TailFitOptions& options = {});

// Total-degree truncation used to build the tensor for fit_tail_limits: deep
// enough that the cross terms dropped inside the windows are negligible.
TruncationSpec tail_fit_truncation(const Vector& lambda);

}  // namespace sps
