#pragma once

#include <optional>

#include "sps/core/model.hpp"

namespace sps::linalg {

// Gaussian elimination with partial pivoting. Returns nullopt when a pivot
// falls below rel_tol * max|a_ij|, i.e. the matrix is numerically singular.
std::optional<Vector> solve_partial_pivot(Matrix a, Vector rhs, double rel_tol = 1e-12);

// Largest singular value, by power iteration on A^T A.
double spectral_norm(const Matrix& a, double tol = 1e-10, int max_iterations = 10000);

}  // namespace sps::linalg
