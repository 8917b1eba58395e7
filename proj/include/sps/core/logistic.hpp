#pragma once

#include <vector>

#include "sps/core/model.hpp"

namespace sps::logistic {

/// dx/dt = r x (1 - x / k) with x(0) = x0.
struct Params {
  double r = 1.0;
  double k = 1.0;
  double x0 = 1.0;
};

// Throws kInvalidArgument unless r, k, x0 are positive and finite.
void check(const Params& params);

// k / (1 + a e^{-r t}) with a = (k - x0) / x0.
double closed_form(const Params& params, double t);

// alpha_0 = k, alpha_1 = k (x0 - k) / x0, alpha_n = alpha_1^n / k^{n-1}.
std::vector<double> series_coefficients(const Params& params, int degree);

// sum_n alpha_n e^{-r n t} over the given coefficients.
double series_value(const Params& params, const std::vector<double>& coefficients, double t);

// (1/r) ln|1 - k/x0|; -infinity when x0 = k.
double t0_unclamped(const Params& params);
// max(0, t0_unclamped).
double t0_exact(const Params& params);

// The same equation as the quadratic system A = [[-r/k]], b = [r], x0 = [x0].
QuadraticSystem as_system(const Params& params);

}  // namespace sps::logistic
