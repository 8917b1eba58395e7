#include "sps/core/linalg.hpp"

#include <cmath>
#include <utility>

namespace sps::linalg {

std::optional<Vector> solve_partial_pivot(Matrix a, Vector rhs, double rel_tol) {
  const Eigen::Index n = a.rows();
  const double scale = a.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  const double floor = rel_tol * scale;

  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index pivot = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(pivot, k))) pivot = i;
    }
    if (!(std::abs(a(pivot, k)) > floor)) return std::nullopt;
    if (pivot != k) {
      a.row(k).swap(a.row(pivot));
      std::swap(rhs(k), rhs(pivot));
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double factor = a(i, k) / a(k, k);
      if (factor == 0.0) continue;
      a.row(i).tail(n - k) -= factor * a.row(k).tail(n - k);
      rhs(i) -= factor * rhs(k);
    }
  }
  for (Eigen::Index k = n - 1; k >= 0; --k) {
    double acc = rhs(k);
    for (Eigen::Index j = k + 1; j < n; ++j) acc -= a(k, j) * rhs(j);
    rhs(k) = acc / a(k, k);
  }
  return rhs;
}

double spectral_norm(const Matrix& a, double tol, int max_iterations) {
  if (a.size() == 0) return 0.0;
  const Matrix gram = a.transpose() * a;
  // Start from the all-ones direction plus a ramp so it is not orthogonal to
  // the dominant singular vector for symmetric sign patterns.
  Vector v(gram.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = 1.0 + 0.1 * static_cast<double>(i);
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector w = gram * v;
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    w /= norm;
    const double next = std::sqrt(norm);
    v = std::move(w);
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace sps::linalg
