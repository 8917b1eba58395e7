#include "sps/core/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sps/core/error.hpp"
#include "sps/core/linalg.hpp"

namespace sps {
namespace {

constexpr int kMaxScan = std::numeric_limits<int>::max() / 2;

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw Error(ErrorCode::kInvalidArgument, "delta must lie in (0, 1)");
}

double n1_lhs(double n, double opnorm_a, double lambda1, int dim) {
  return std::pow(2.0, dim) * dim * std::pow(std::log(n + 1.0) + 1.0, dim) * opnorm_a /
         (n * lambda1);
}

// Largest total degree whose tensor fits both budgets.
int feasible_degree(int wanted, int dim, const BuildOptions& build) {
  int lo = 0;
  int hi = wanted;
  auto fits = [&](int n) {
    const TruncationSpec t = TruncationSpec::total_degree(n);
    return convolution_work(t, dim) <= build.work_budget &&
           std::pow(n + 1.0, dim) <= build.entry_budget;
  };
  if (fits(hi)) return hi;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

// log of max over i of |alpha_i^n| prod p^n; -inf when every entry vanishes.
double log_term(const CoefficientTensor& unit, const MultiIndex& n, const std::size_t key,
                const Vector& log_abs_p) {
  if (!unit.filled(key)) throw Error(ErrorCode::kMissingCoefficient, "tensor has no coefficient at a required index");
  double scale = 0.0;
  for (int j = 0; j < n.dim(); ++j) {
    if (n[j] == 0) continue;
    if (log_abs_p(j) == -std::numeric_limits<double>::infinity()) {
      return -std::numeric_limits<double>::infinity();
    }
    scale += n[j] * log_abs_p(j);
  }
  double largest = 0.0;
  for (int i = 0; i < unit.dim(); ++i) largest = std::max(largest, std::abs(unit.value(i, key)));
  if (largest == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(largest) + scale;
}

void require_degrees(const CoefficientTensor& coeffs, int max_degree) {
  if (coeffs.complete_degree() < max_degree ||
      (coeffs.truncation().mode == TruncationSpec::Mode::kPerIndex && max_degree > coeffs.truncation().value)) {
    std::ostringstream msg;
    msg << "K up to degree " << max_degree << " needs every index of that degree; the tensor is complete to degree "
        << coeffs.complete_degree();
    throw Error(ErrorCode::kMissingCoefficient, msg.str());
  }
}

ConvergenceCertificate assemble(const QuadraticSystem& system, const SpectralData& spectral,
                                const Vector& p, double delta, double opnorm_a, double opnorm_j) {
  check_delta(delta);
  ConvergenceCertificate cert;
  const double lambda1 = std::abs(spectral.eigenvalues(0));
  cert.delta = delta;
  cert.opnorm_a = opnorm_a;
  cert.opnorm_j = opnorm_j;
  cert.opnorm_inverse_bound = 1.0 / (1.0 - delta);
  cert.n0 = compute_n0(opnorm_j, lambda1, delta);
  cert.n1 = compute_n1(opnorm_a, lambda1, system.dim(), delta);
  cert.n2 = std::max(cert.n0, cert.n1);
  cert.free_parameters = p;
  return cert;
}

void finish(ConvergenceCertificate& cert, const CoefficientTensor& unit, const Vector& p,
            double lambda1) {
  const int degree = std::min(cert.n2, unit.complete_degree());
  cert.degree_reached = degree;
  cert.partial = degree < cert.n2;
  cert.k = compute_k_scaled(unit, p, degree);
  cert.k_unit = compute_k_scaled(unit, Vector::Ones(unit.dim()), degree);
  cert.t0_unclamped = cert.k > 0.0 ? std::log(cert.k) / lambda1
                                   : -std::numeric_limits<double>::infinity();
  cert.t0 = std::max(0.0, cert.t0_unclamped);
}

}  // namespace

int compute_n0(double opnorm_j, double lambda1, double delta) {
  check_delta(delta);
  const double n = std::ceil(opnorm_j / (delta * std::abs(lambda1)));
  return std::max(1, static_cast<int>(std::min(n, static_cast<double>(kMaxScan))));
}

int compute_n0(const Matrix& j, double lambda1, double delta) {
  return compute_n0(linalg::spectral_norm(j), lambda1, delta);
}

int compute_n1(double opnorm_a, double lambda1, int dim, double delta) {
  check_delta(delta);
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  const double l1 = std::abs(lambda1);
  const double target = 1.0 - delta;
  // The left side falls monotonically once ln(N+1) + 1 > M; scan up to there,
  // then bracket and bisect.
  const int knee = static_cast<int>(std::ceil(std::exp(static_cast<double>(dim)))) + 1;
  for (int n = 1; n <= knee; ++n) {
    if (n1_lhs(n, opnorm_a, l1, dim) < target) return n;
  }
  long lo = knee;
  long hi = knee;
  while (n1_lhs(static_cast<double>(hi), opnorm_a, l1, dim) >= target) {
    lo = hi;
    hi *= 2;
    if (hi > kMaxScan) throw Error(ErrorCode::kBudget, "N1 exceeds the representable range");
  }
  while (hi - lo > 1) {
    const long mid = lo + (hi - lo) / 2;
    (n1_lhs(static_cast<double>(mid), opnorm_a, l1, dim) < target ? hi : lo) = mid;
  }
  return static_cast<int>(hi);
}

double compute_k(const CoefficientTensor& coeffs, int max_degree) {
  require_degrees(coeffs, max_degree);
  double k = 0.0;
  const IndexSet& set = coeffs.index_set();
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const MultiIndex& n = set.indices()[pos];
    if (n.degree() == 0 || n.degree() > max_degree) continue;
    double weight = 1.0;
    for (int v : n.components()) weight *= v + 1.0;
    if (!coeffs.filled(set.keys()[pos])) {
      throw Error(ErrorCode::kMissingCoefficient, "tensor has no coefficient at a required index");
    }
    for (int i = 0; i < coeffs.dim(); ++i) {
      const double a = std::abs(coeffs.value(i, set.keys()[pos]));
      if (a > 0.0) k = std::max(k, std::pow(weight * a, 1.0 / n.degree()));
    }
  }
  return k;
}

std::vector<double> k_profile(const CoefficientTensor& unit, const Vector& p, int max_degree) {
  require_degrees(unit, max_degree);
  if (p.size() != unit.dim()) throw Error(ErrorCode::kDimension, "free parameter vector has wrong length");
  const Vector log_abs_p = p.cwiseAbs().array().log().matrix();
  std::vector<double> log_k(static_cast<std::size_t>(max_degree) + 1,
                            -std::numeric_limits<double>::infinity());
  const IndexSet& set = unit.index_set();
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const MultiIndex& n = set.indices()[pos];
    if (n.degree() == 0 || n.degree() > max_degree) continue;
    double log_weight = 0.0;
    for (int v : n.components()) log_weight += std::log(v + 1.0);
    const double lt = log_term(unit, n, set.keys()[pos], log_abs_p);
    auto& slot = log_k[static_cast<std::size_t>(n.degree())];
    slot = std::max(slot, (log_weight + lt) / n.degree());
  }
  std::vector<double> out(log_k.size(), 0.0);
  for (std::size_t d = 1; d < log_k.size(); ++d) out[d] = std::exp(log_k[d]);
  return out;
}

double compute_k_scaled(const CoefficientTensor& unit, const Vector& p, int max_degree) {
  const auto profile = k_profile(unit, p, max_degree);
  double k = 0.0;
  for (double v : profile) k = std::max(k, v);
  return k;
}

ConvergenceCertificate certificate(const QuadraticSystem& system, const SpectralData& spectral,
                                   const Vector& p, const CertificateOptions& options) {
  return certificate_grid(system, spectral, p, {options.delta}, options.build).front();
}

std::vector<ConvergenceCertificate> certificate_grid(const QuadraticSystem& system,
                                                     const SpectralData& spectral,
                                                     const Vector& p,
                                                     const std::vector<double>& deltas,
                                                     const BuildOptions& build) {
  if (deltas.empty()) throw Error(ErrorCode::kInvalidArgument, "no delta values given");
  if (p.size() != system.dim()) throw Error(ErrorCode::kDimension, "free parameter vector has wrong length");
  const double opnorm_a = linalg::spectral_norm(system.A);
  const double opnorm_j = linalg::spectral_norm(spectral.linearization);
  std::vector<ConvergenceCertificate> grid;
  int wanted = 0;
  for (double delta : deltas) {
    grid.push_back(assemble(system, spectral, p, delta, opnorm_a, opnorm_j));
    wanted = std::max(wanted, grid.back().n2);
  }
  const int degree = feasible_degree(wanted, system.dim(), build);
  const CoefficientTensor unit =
      build_coefficients(system, spectral, TruncationSpec::total_degree(degree),
                         Vector::Ones(system.dim()), build);
  const double lambda1 = std::abs(spectral.eigenvalues(0));
  for (auto& cert : grid) finish(cert, unit, p, lambda1);
  return grid;
}

std::size_t grid_minimizer(const std::vector<ConvergenceCertificate>& grid) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].t0_unclamped < grid[best].t0_unclamped) best = i;
  }
  return best;
}

}  // namespace sps
