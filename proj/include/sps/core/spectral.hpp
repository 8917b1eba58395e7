#pragma once

#include <vector>

#include "sps/core/model.hpp"

namespace sps {

/// Linear structure of a system at its equilibrium.
///
/// `eigenvalues` are sorted by ascending magnitude, so the first entry is the
/// slowest mode. Column i of `kernels` spans ker(lambda_i I - J), is unit
/// length, and its first largest-magnitude component is positive.
struct SpectralData {
  Vector equilibrium;
  Matrix linearization;
  Vector eigenvalues;
  Matrix kernels;
};

struct SpectralOptions {
  // Imaginary parts above this fraction of the spectral radius are complex.
  double complex_tolerance = 1e-9;
  // Eigenvalues closer than this fraction of the spectral radius are repeated.
  double gap_tolerance = 1e-9;
  int lattice_bound = 20;
  double resonance_tolerance = 1e-9;
  // Cap on the number of lattice points scanned; the bound is lowered for
  // large M until (2Z+1)^M fits.
  double lattice_budget = 1e7;
};

// c with A c = -b.
Vector equilibrium(const QuadraticSystem& system);

// J_ij = c_i A_ij.
Matrix linearization(const Matrix& a, const Vector& c);

// Real eigenvalues sorted by ascending magnitude. Throws on complex, repeated
// or non-negative eigenvalues; the series expansion assumes none of these.
Vector spectrum(const Matrix& j, const SpectralOptions& options = {});

// Every non-zero integer vector z with max|z_i| <= lattice_bound and
// |z . lambda| < tol * |lambda_1|. This is a finite scan: an empty result
// does not prove the eigenvalues are rationally independent.
std::vector<std::vector<int>> resonance_check(const Vector& lambda, int lattice_bound = 20,
                                              double tol = 1e-9);

// Unit vector spanning ker(lambda I - J). Throws kKernelDimension when the
// kernel is not one dimensional.
Vector kernel_direction(const Matrix& j, double lambda);

// Equilibrium, linearization, spectrum, lattice resonance scan and kernel
// directions, in that order.
SpectralData analyze(const QuadraticSystem& system, const SpectralOptions& options = {});

}  // namespace sps
