#pragma once

#include <vector>

#include "sps/core/model.hpp"

namespace sps {

/// Uniformly sampled numerical solution.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  double step = 0.0;
  // Richardson estimate of the global error (max norm over the grid), or 0
  // when the half-step comparison was skipped.
  double est_error = 0.0;
};

struct IntegrateOptions {
  double step = 1e-3;
  bool estimate_error = true;
  double divergence_bound = 1e12;
};

// Right-hand side diag(x)(b + A x).
Vector vector_field(const QuadraticSystem& system, const Vector& x);

// One classical RK4 step.
Vector rk4_step(const QuadraticSystem& system, const Vector& x, double h);

// Fixed-step RK4 from t = 0 to t_end. The step is shrunk slightly, if needed,
// so that a whole number of steps lands exactly on t_end.
Trajectory integrate(const QuadraticSystem& system, const Vector& x0, double t_end,
                     const IntegrateOptions& options = {});

}  // namespace sps
