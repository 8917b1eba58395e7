#include "sps/core/oracle.hpp"

#include <cmath>
#include <sstream>

#include "sps/core/error.hpp"

namespace sps {
namespace {

std::vector<Vector> march(const QuadraticSystem& system, const Vector& x0, double h, long steps,
                          double bound) {
  std::vector<Vector> states;
  states.reserve(static_cast<std::size_t>(steps) + 1);
  states.push_back(x0);
  Vector x = x0;
  for (long s = 1; s <= steps; ++s) {
    x = rk4_step(system, x, h);
    if (!x.allFinite() || x.cwiseAbs().maxCoeff() > bound) {
      std::ostringstream msg;
      msg << "state diverged near t = " << h * static_cast<double>(s);
      throw Error(ErrorCode::kDivergence, msg.str());
    }
    states.push_back(x);
  }
  return states;
}

}  // namespace

Vector vector_field(const QuadraticSystem& system, const Vector& x) {
  return x.cwiseProduct(system.b + system.A * x);
}

Vector rk4_step(const QuadraticSystem& system, const Vector& x, double h) {
  const Vector k1 = vector_field(system, x);
  const Vector k2 = vector_field(system, x + 0.5 * h * k1);
  const Vector k3 = vector_field(system, x + 0.5 * h * k2);
  const Vector k4 = vector_field(system, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory integrate(const QuadraticSystem& system, const Vector& x0, double t_end,
                     const IntegrateOptions& options) {
  if (x0.size() != system.dim()) throw Error(ErrorCode::kDimension, "initial state has wrong length");
  if (!x0.allFinite()) throw Error(ErrorCode::kNonFinite, "initial state is not finite");
  if (!(options.step > 0.0) || !std::isfinite(options.step)) {
    throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  }
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
    throw Error(ErrorCode::kInvalidArgument, "t_end must be non-negative");
  }
  const long steps = std::max(0L, static_cast<long>(std::ceil(t_end / options.step - 1e-9)));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : options.step;

  Trajectory out;
  out.step = h;
  out.states = march(system, x0, h, steps, options.divergence_bound);
  out.times.reserve(out.states.size());
  for (long s = 0; s <= steps; ++s) out.times.push_back(h * static_cast<double>(s));
  if (steps > 0) out.times.back() = t_end;

  if (options.estimate_error && steps > 0) {
    const auto fine = march(system, x0, 0.5 * h, 2 * steps, options.divergence_bound);
    double worst = 0.0;
    for (long s = 0; s <= steps; ++s) {
      worst = std::max(worst, (out.states[static_cast<std::size_t>(s)] -
                               fine[static_cast<std::size_t>(2 * s)])
                                  .cwiseAbs()
                                  .maxCoeff());
    }
    out.est_error = worst * 16.0 / 15.0;
  }
  return out;
}

}  // namespace sps
