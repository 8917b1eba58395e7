#include "sps/core/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "sps/core/error.hpp"
#include "sps/core/linalg.hpp"

namespace sps {
namespace {

std::string format_vector(const std::vector<int>& z) {
  std::ostringstream out;
  out << '(';
  for (std::size_t i = 0; i < z.size(); ++i) out << (i ? "," : "") << z[i];
  out << ')';
  return out.str();
}

// Eigenvalues of a 2x2 matrix from the characteristic quadratic, arranged to
// avoid cancellation in the smaller root.
std::vector<std::complex<double>> quadratic_eigenvalues(const Matrix& j) {
  const double trace = j(0, 0) + j(1, 1);
  const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
  const double diff = j(0, 0) - j(1, 1);
  const double disc = diff * diff + 4.0 * j(0, 1) * j(1, 0);
  if (disc < 0.0) {
    const double im = 0.5 * std::sqrt(-disc);
    return {{0.5 * trace, im}, {0.5 * trace, -im}};
  }
  const double root = std::sqrt(disc);
  const double big = -0.5 * (-trace - std::copysign(root, trace == 0.0 ? 1.0 : trace));
  if (big == 0.0) return {{0.0, 0.0}, {0.0, 0.0}};
  return {{big, 0.0}, {det / big, 0.0}};
}

}  // namespace

Vector equilibrium(const QuadraticSystem& system) {
  auto c = linalg::solve_partial_pivot(system.A, -system.b);
  if (!c) throw Error(ErrorCode::kSingular, "A is singular; the equilibrium -A^{-1} b does not exist");
  return *c;
}

Matrix linearization(const Matrix& a, const Vector& c) { return c.asDiagonal() * a; }

Vector spectrum(const Matrix& j, const SpectralOptions& options) {
  const Eigen::Index m = j.rows();
  std::vector<std::complex<double>> values;
  if (m == 1) {
    values = {{j(0, 0), 0.0}};
  } else if (m == 2) {
    values = quadratic_eigenvalues(j);
  } else {
    Eigen::EigenSolver<Matrix> solver(j, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::kInternal, "eigenvalue iteration did not converge");
    }
    for (Eigen::Index i = 0; i < m; ++i) values.push_back(solver.eigenvalues()(i));
  }

  double radius = 0.0;
  for (const auto& v : values) radius = std::max(radius, std::abs(v));

  for (const auto& v : values) {
    if (std::abs(v.imag()) > options.complex_tolerance * radius) {
      std::ostringstream msg;
      msg << "linearization has a complex eigenvalue pair " << v.real() << " +/- "
          << std::abs(v.imag()) << "i; the expansion assumes real eigenvalues";
      throw Error(ErrorCode::kComplexSpectrum, msg.str());
    }
  }

  std::vector<double> real;
  for (const auto& v : values) real.push_back(v.real());
  std::sort(real.begin(), real.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });

  for (double v : real) {
    if (!(v < 0.0)) {
      std::ostringstream msg;
      msg << "linearization has eigenvalue " << v << " >= 0; the expansion assumes strictly "
          << "negative eigenvalues";
      throw Error(ErrorCode::kNonNegativeEigenvalue, msg.str());
    }
  }
  for (std::size_t a = 0; a < real.size(); ++a) {
    for (std::size_t b = a + 1; b < real.size(); ++b) {
      if (std::abs(real[a] - real[b]) <= options.gap_tolerance * radius) {
        std::ostringstream msg;
        msg << "linearization has a repeated eigenvalue " << real[a]
            << "; the expansion assumes distinct eigenvalues";
        throw Error(ErrorCode::kRepeatedEigenvalue, msg.str());
      }
    }
  }
  return Eigen::Map<Vector>(real.data(), static_cast<Eigen::Index>(real.size()));
}

std::vector<std::vector<int>> resonance_check(const Vector& lambda, int lattice_bound, double tol) {
  std::vector<std::vector<int>> hits;
  const auto m = static_cast<std::size_t>(lambda.size());
  if (m == 0 || lattice_bound < 1) return hits;
  const double threshold = tol * lambda.cwiseAbs().minCoeff();

  std::vector<int> z(m, -lattice_bound);
  while (true) {
    double dot = 0.0;
    bool nonzero = false;
    for (std::size_t i = 0; i < m; ++i) {
      dot += z[i] * lambda(static_cast<Eigen::Index>(i));
      nonzero = nonzero || z[i] != 0;
    }
    if (nonzero && std::abs(dot) < threshold) hits.push_back(z);

    std::size_t i = 0;
    while (i < m && z[i] == lattice_bound) z[i++] = -lattice_bound;
    if (i == m) break;
    ++z[i];
  }
  return hits;
}

Vector kernel_direction(const Matrix& j, double lambda) {
  const Eigen::Index m = j.rows();
  const Matrix shifted = lambda * Matrix::Identity(m, m) - j;
  if (m == 1) {
    if (std::abs(shifted(0, 0)) > 1e-9 * std::max(std::abs(lambda), std::abs(j(0, 0)))) {
      throw Error(ErrorCode::kKernelDimension, "value is not an eigenvalue of J");
    }
    return Vector::Ones(1);
  }
  Eigen::JacobiSVD<Matrix> svd(shifted, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = std::max({s(0), std::abs(lambda), j.cwiseAbs().maxCoeff()});
  const double rank_tol = 1e-9 * scale;
  if (s(m - 1) > rank_tol) {
    throw Error(ErrorCode::kKernelDimension, "value is not an eigenvalue of J (trivial kernel)");
  }
  if (s(m - 2) <= rank_tol) {
    throw Error(ErrorCode::kKernelDimension,
                "eigenvalue has a kernel of dimension > 1; the expansion needs simple eigenvalues");
  }
  Vector v = svd.matrixV().col(m - 1);
  v.normalize();
  Eigen::Index lead = 0;
  for (Eigen::Index i = 1; i < m; ++i) {
    if (std::abs(v(i)) > std::abs(v(lead)) * (1.0 + 1e-12)) lead = i;
  }
  if (v(lead) < 0.0) v = -v;
  return v;
}

SpectralData analyze(const QuadraticSystem& system, const SpectralOptions& options) {
  SpectralData out;
  out.equilibrium = equilibrium(system);
  out.linearization = linearization(system.A, out.equilibrium);
  out.eigenvalues = spectrum(out.linearization, options);

  const int m = system.dim();
  int bound = options.lattice_bound;
  while (bound > 1 && std::pow(2.0 * bound + 1.0, m) > options.lattice_budget) --bound;
  const auto hits = resonance_check(out.eigenvalues, bound, options.resonance_tolerance);
  if (!hits.empty()) {
    throw Error(ErrorCode::kResonance,
                "eigenvalues are rationally dependent: z = " + format_vector(hits.front()) +
                    " gives z . lambda = 0; the expansion assumes no integer resonance");
  }

  out.kernels.resize(m, m);
  for (int i = 0; i < m; ++i) out.kernels.col(i) = kernel_direction(out.linearization, out.eigenvalues(i));
  return out;
}

}  // namespace sps
