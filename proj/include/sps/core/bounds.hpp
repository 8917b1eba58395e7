#pragma once

#include <vector>

#include "sps/core/series.hpp"
#include "sps/core/spectral.hpp"

namespace sps {

inline constexpr double kDefaultDelta = 0.5;

/// Constants guaranteeing |alpha_i^n| <= K^{|n|} / prod(n_j + 1) for every n,
/// and hence convergence of the series for t > t0.
struct ConvergenceCertificate {
  int n0 = 0;
  int n1 = 0;
  int n2 = 0;
  // K over the free parameters the certificate was computed for, and over
  // unit free parameters.
  double k = 0.0;
  double k_unit = 0.0;
  // max(0, ln K / |lambda_1|); t0_unclamped keeps the sign.
  double t0 = 0.0;
  double t0_unclamped = 0.0;
  double delta = kDefaultDelta;
  double opnorm_a = 0.0;
  double opnorm_j = 0.0;
  // Bound on |(I - J/(n . lambda))^{-1}| for |n| >= N0: 1 / (1 - delta).
  double opnorm_inverse_bound = 0.0;
  // Set when the tensor could not be built to degree N2 within budget (or
  // overflowed); K then covers degrees 1..degree_reached only.
  bool partial = false;
  int degree_reached = 0;
  Vector free_parameters;
};

// Smallest N with |J| / (N |lambda_1|) <= delta.
int compute_n0(double opnorm_j, double lambda1, double delta = kDefaultDelta);
int compute_n0(const Matrix& j, double lambda1, double delta = kDefaultDelta);

// Smallest N >= 1 with 2^M M (ln(N+1) + 1)^M |A| / (N |lambda_1|) < 1 - delta.
int compute_n1(double opnorm_a, double lambda1, int dim, double delta = kDefaultDelta);

// max over i and 1 <= |n| <= max_degree of (prod(n_j+1) |alpha_i^n|)^{1/|n|}.
// Throws kMissingCoefficient if the tensor lacks an index in that range.
double compute_k(const CoefficientTensor& coeffs, int max_degree);

// Same maximum for the tensor rescaled by p, evaluated in log space so that
// large degrees do not overflow. `unit` must carry unit free parameters.
double compute_k_scaled(const CoefficientTensor& unit, const Vector& p, int max_degree);

// Per-degree maxima: entry d is the max over |n| = d (entry 0 unused).
std::vector<double> k_profile(const CoefficientTensor& unit, const Vector& p, int max_degree);

struct CertificateOptions {
  double delta = kDefaultDelta;
  BuildOptions build{kDefaultEntryBudget, kDefaultWorkBudget, true};
};

// Builds the unit tensor to total degree N2 (or as far as the budget allows)
// and evaluates K for the free parameters p.
ConvergenceCertificate certificate(const QuadraticSystem& system, const SpectralData& spectral,
                                   const Vector& p, const CertificateOptions& options = {});

// One certificate per delta, sharing a single tensor build.
std::vector<ConvergenceCertificate> certificate_grid(const QuadraticSystem& system,
                                                     const SpectralData& spectral,
                                                     const Vector& p,
                                                     const std::vector<double>& deltas,
                                                     const BuildOptions& build = {kDefaultEntryBudget,
                                                                                  kDefaultWorkBudget,
                                                                                  true});

// Index into a certificate grid of the smallest t0 (first on ties).
std::size_t grid_minimizer(const std::vector<ConvergenceCertificate>& grid);

}  // namespace sps
