#include "sps/core/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <bit>
#include <numeric>
#include <optional>
#include <sstream>

#include "sps/core/error.hpp"
#include "sps/core/linalg.hpp"
#include "sps/core/spectral.hpp"

namespace sps {
namespace {

void check_keep(const QuadraticSystem& system, int keep, bool allow_full) {
  const int limit = allow_full ? system.dim() : system.dim() - 1;
  if (keep < 1 || keep > limit) {
    std::ostringstream msg;
    msg << "keep must lie in [1, " << limit << "], got " << keep;
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
}

Vector solve_or_throw(const Matrix& a, const Vector& rhs, const char* what) {
  auto x = linalg::solve_partial_pivot(a, rhs);
  if (!x) throw Error(ErrorCode::kSingular, what);
  return *x;
}

// Elementary symmetric polynomials e_1..e_L of the entries of mu.
Vector elementary_symmetric(const Vector& mu) {
  const auto n = mu.size();
  Vector e = Vector::Zero(n + 1);
  e(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k >= 1; --k) e(k) += mu(i) * e(k - 1);
  }
  return e.tail(n);
}

// Characteristic-coefficient equations for diag(g) B: the k-th coefficient is
// sum over |S| = k of prod_{i in S} g_i det(B_SS).
class CharMatch {
 public:
  CharMatch(const Matrix& b, const Vector& target) : size_(static_cast<int>(b.rows())), target_(target) {
    const unsigned count = 1u << size_;
    minors_.assign(count, 1.0);
    for (unsigned mask = 1; mask < count; ++mask) {
      std::vector<int> idx;
      for (int i = 0; i < size_; ++i) {
        if (mask & (1u << i)) idx.push_back(i);
      }
      Matrix sub(idx.size(), idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t c = 0; c < idx.size(); ++c) sub(r, c) = b(idx[r], idx[c]);
      }
      minors_[mask] = sub.determinant();
    }
  }

  Vector residual(const Vector& g) const {
    Vector f = -target_;
    for (unsigned mask = 1; mask < minors_.size(); ++mask) {
      double prod = minors_[mask];
      for (int i = 0; i < size_; ++i) {
        if (mask & (1u << i)) prod *= g(i);
      }
      f(std::popcount(mask) - 1) += prod;
    }
    return f;
  }

  Matrix jacobian(const Vector& g) const {
    Matrix j = Matrix::Zero(size_, size_);
    for (unsigned mask = 1; mask < minors_.size(); ++mask) {
      const int row = std::popcount(mask) - 1;
      for (int col = 0; col < size_; ++col) {
        if (!(mask & (1u << col))) continue;
        double prod = minors_[mask];
        for (int i = 0; i < size_; ++i) {
          if (i != col && (mask & (1u << i))) prod *= g(i);
        }
        j(row, col) += prod;
      }
    }
    return j;
  }

 private:
  int size_;
  Vector target_;
  std::vector<double> minors_;
};

std::optional<Vector> newton(const CharMatch& eq, Vector g, double tol) {
  Vector f = eq.residual(g);
  double norm = f.cwiseAbs().maxCoeff();
  for (int it = 0; it < 100; ++it) {
    if (norm <= tol) return g;
    const auto step = linalg::solve_partial_pivot(eq.jacobian(g), -f);
    if (!step) return std::nullopt;
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= 30; ++h, scale *= 0.5) {
      const Vector trial = g + scale * *step;
      const Vector trial_f = eq.residual(trial);
      const double trial_norm = trial_f.cwiseAbs().maxCoeff();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        g = trial;
        f = trial_f;
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) return norm <= tol ? std::optional<Vector>(g) : std::nullopt;
  }
  return norm <= tol ? std::optional<Vector>(g) : std::nullopt;
}

// Eigenvalues of m sorted by ascending magnitude, or nullopt if any is complex.
std::optional<Vector> real_spectrum(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, false);
  if (solver.info() != Eigen::Success) return std::nullopt;
  const auto& ev = solver.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  Vector out(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i).imag()) > 1e-9 * scale) return std::nullopt;
    out(i) = ev(i).real();
  }
  std::sort(out.data(), out.data() + out.size(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  return out;
}

Vector gamma_from_star(const Vector& star) {
  return (1.0 - star.array().inverse()).matrix();
}

}  // namespace

QuadraticSystem partial(const QuadraticSystem& system, int keep) {
  check_keep(system, keep, false);
  QuadraticSystem out;
  out.A = system.A.topLeftCorner(keep, keep);
  out.b = system.b.head(keep);
  if (system.x0) out.x0 = system.x0->head(keep);
  out.truncation = system.truncation;
  if (reciprocal_condition(out.A) < kMinReciprocalCondition) {
    throw Error(ErrorCode::kSingular, "kept block of A is singular");
  }
  return out;
}

Vector correct_delta(const QuadraticSystem& system, int keep) {
  check_keep(system, keep, true);
  const Vector c = equilibrium(system);
  return -(system.A.topLeftCorner(keep, keep) * c.head(keep) + system.b.head(keep));
}

Vector correct_gamma(const QuadraticSystem& system, int keep, const Vector& delta) {
  check_keep(system, keep, true);
  if (delta.size() != keep) throw Error(ErrorCode::kDimension, "delta has wrong length");
  if (keep > 20) throw Error(ErrorCode::kInvalidArgument, "eigenvalue matching supports at most 20 kept variables");
  const Matrix a_sub = system.A.topLeftCorner(keep, keep);
  const Vector c_hat = -solve_or_throw(a_sub, system.b.head(keep) + delta, "kept block of A is singular");
  const Matrix b = c_hat.asDiagonal() * a_sub;
  const Vector full = spectrum(linearization(system.A, equilibrium(system)));
  const Vector mu = full.head(keep);

  // det(tI - diag(g) B) = sum_k (-1)^k e_k(g) t^{L-k}; match e_k to those of mu.
  const CharMatch eq(b, elementary_symmetric(mu));
  const double tol = 1e-13 * std::max(1.0, elementary_symmetric(mu).cwiseAbs().maxCoeff());

  std::vector<Vector> starts;
  starts.push_back(Vector::Ones(keep));
  if (keep <= 6) {
    std::vector<int> perm(static_cast<std::size_t>(keep));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      Vector g(keep);
      bool ok = true;
      for (int i = 0; i < keep; ++i) {
        ok = ok && b(i, i) != 0.0;
        if (ok) g(i) = mu(perm[static_cast<std::size_t>(i)]) / b(i, i);
      }
      if (ok) starts.push_back(g);
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  for (double s : {0.5, 2.0, -1.0}) starts.push_back(Vector::Constant(keep, s));

  std::optional<Vector> best;
  for (const Vector& start : starts) {
    const auto g = newton(eq, start, tol);
    if (!g || (g->array() == 0.0).any()) continue;
    const auto lambda_hat = real_spectrum(g->asDiagonal() * b);
    if (!lambda_hat) continue;
    if ((*lambda_hat - mu).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, mu.cwiseAbs().maxCoeff())) continue;
    const Vector gamma = gamma_from_star(*g);
    if (!best || gamma.norm() < best->norm()) best = gamma;
  }
  if (!best) {
    throw Error(ErrorCode::kReduction,
                "no real gamma found that matches the slow eigenvalues of the full system");
  }
  return *best;
}

ReducedModel reduce(const QuadraticSystem& system, int keep) {
  const QuadraticSystem part = partial(system, keep);
  ReducedModel out;
  out.keep = keep;
  out.a_sub = part.A;
  out.b_sub = part.b;
  out.c_full = equilibrium(system);
  out.lambda_full = spectrum(linearization(system.A, out.c_full));
  out.delta = correct_delta(system, keep);
  out.gamma = correct_gamma(system, keep, out.delta);
  out.gamma_star = (1.0 - out.gamma.array()).inverse().matrix();
  out.c_hat = -solve_or_throw(out.a_sub, out.b_sub + out.delta, "kept block of A is singular");
  const auto lambda_hat = real_spectrum(out.gamma_star.cwiseProduct(out.c_hat).asDiagonal() * out.a_sub);
  if (!lambda_hat) throw Error(ErrorCode::kReduction, "corrected spectrum is complex");
  out.lambda_hat = *lambda_hat;
  return out;
}

QuadraticSystem corrected_system(const QuadraticSystem& system, const ReducedModel& model) {
  QuadraticSystem out;
  out.A = model.gamma_star.asDiagonal() * model.a_sub;
  out.b = model.gamma_star.asDiagonal() * (model.b_sub + model.delta);
  if (system.x0) out.x0 = system.x0->head(model.keep);
  out.truncation = system.truncation;
  return out;
}

QuadraticSystem corrected_system(const QuadraticSystem& system, int keep) {
  return corrected_system(system, reduce(system, keep));
}

}  // namespace sps
