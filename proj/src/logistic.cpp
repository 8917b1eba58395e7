#include "sps/core/logistic.hpp"

#include <cmath>
#include <limits>

#include "sps/core/error.hpp"

namespace sps::logistic {

void check(const Params& params) {
  for (double v : {params.r, params.k, params.x0}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, "r, k and x0 must be positive and finite");
    }
  }
}

double closed_form(const Params& params, double t) {
  check(params);
  const double a = (params.k - params.x0) / params.x0;
  return params.k / (1.0 + a * std::exp(-params.r * t));
}

std::vector<double> series_coefficients(const Params& params, int degree) {
  check(params);
  if (degree < 0) throw Error(ErrorCode::kInvalidArgument, "degree must be >= 0");
  std::vector<double> out{params.k};
  const double alpha1 = params.k * (params.x0 - params.k) / params.x0;
  const double ratio = alpha1 / params.k;
  double term = alpha1;
  for (int n = 1; n <= degree; ++n) {
    out.push_back(term);
    term *= ratio;
  }
  return out;
}

double series_value(const Params& params, const std::vector<double>& coefficients, double t) {
  double out = 0.0;
  for (std::size_t n = 0; n < coefficients.size(); ++n) {
    out += coefficients[n] * std::exp(-params.r * static_cast<double>(n) * t);
  }
  return out;
}

double t0_unclamped(const Params& params) {
  check(params);
  const double q = std::abs(1.0 - params.k / params.x0);
  if (q == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(q) / params.r;
}

double t0_exact(const Params& params) {
  return std::max(0.0, t0_unclamped(params));
}

QuadraticSystem as_system(const Params& params) {
  check(params);
  QuadraticSystem out;
  out.A = Matrix::Constant(1, 1, -params.r / params.k);
  out.b = Vector::Constant(1, params.r);
  out.x0 = Vector::Constant(1, params.x0);
  return out;
}

}  // namespace sps::logistic
