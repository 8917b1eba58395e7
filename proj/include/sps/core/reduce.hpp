#pragma once

#include "sps/core/model.hpp"

namespace sps {

/// Corrected model over the first L variables.
///
/// Each kept equation gains delta_i x_i and gamma_i dx_i/dt, which amounts to
/// A_hat = diag(gamma*) A_sub and b_hat = diag(gamma*)(b_sub + delta) with
/// gamma*_i = 1 / (1 - gamma_i).
struct ReducedModel {
  int keep = 0;
  Matrix a_sub;
  Vector b_sub;
  Vector delta;
  Vector gamma;
  Vector gamma_star;
  Vector c_hat;
  Vector lambda_hat;
  // Full-system equilibrium and spectrum, for side-by-side reporting.
  Vector c_full;
  Vector lambda_full;
};

// Upper-left L x L block of A and the first L entries of b (and x0).
// Requires 1 <= L < M.
QuadraticSystem partial(const QuadraticSystem& system, int keep);

// delta = -(A_sub c_{1:L} + b_sub), which makes the corrected equilibrium
// equal the first L components of the full one. L = M is accepted and gives 0.
Vector correct_delta(const QuadraticSystem& system, int keep);

// gamma with eig(diag(gamma*) diag(c_hat) A_sub) equal to the L slowest full
// eigenvalues. Solved by matching characteristic polynomial coefficients
// with damped Newton from several starts; the solution with the smallest
// |gamma| wins.
Vector correct_gamma(const QuadraticSystem& system, int keep, const Vector& delta);

ReducedModel reduce(const QuadraticSystem& system, int keep);

// (A_hat, b_hat) as a system of its own; x0 and truncation carry over.
QuadraticSystem corrected_system(const QuadraticSystem& system, const ReducedModel& model);
QuadraticSystem corrected_system(const QuadraticSystem& system, int keep);

}  // namespace sps
