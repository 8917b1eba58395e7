#include "sps/core/fit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sps/core/error.hpp"
#include "sps/core/linalg.hpp"

namespace sps {
namespace {

struct Term {
  std::vector<int> n;
  Vector weight;
};

// Stored terms with alpha^n * exp((n . lambda) t) folded into the weight.
std::vector<Term> timed_terms(const CoefficientTensor& unit, const Vector& lambda, double t) {
  std::vector<Term> terms;
  const IndexSet& set = unit.index_set();
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const std::size_t key = set.keys()[pos];
    if (!unit.filled(key)) continue;
    const MultiIndex& n = set.indices()[pos];
    const double exponent = n.dot(lambda) * t;
    if (exponent > kMaxExponent) {
      throw Error(ErrorCode::kOverflow, "series term overflows at the reference time");
    }
    terms.push_back({n.components(), unit.at(n) * std::exp(exponent)});
  }
  return terms;
}

Matrix first_order_directions(const CoefficientTensor& unit) {
  const int dim = unit.dim();
  Matrix v(dim, dim);
  for (int k = 0; k < dim; ++k) v.col(k) = unit.at(MultiIndex::unit(dim, k));
  return v;
}

void require_unit(const CoefficientTensor& unit, const Vector& lambda) {
  if (lambda.size() != unit.dim()) throw Error(ErrorCode::kDimension, "eigenvalue vector has wrong length");
  if (!(unit.free_parameters().array() == 1.0).all()) {
    throw Error(ErrorCode::kInvalidArgument, "fitting expects a unit-parameter tensor");
  }
  if (unit.complete_degree() < 1) {
    throw Error(ErrorCode::kInvalidArgument, "fitting needs the first-order coefficients");
  }
}

class SumSystem {
 public:
  SumSystem(std::vector<Term> terms, Vector target, int max_power)
      : terms_(std::move(terms)), target_(std::move(target)), max_power_(max_power) {}

  Vector residual(const Vector& p) const {
    fill_powers(p);
    Vector r = -target_;
    for (const Term& t : terms_) r += monomial(t.n, -1) * t.weight;
    return r;
  }

  Matrix jacobian(const Vector& p) const {
    fill_powers(p);
    const auto dim = target_.size();
    Matrix j = Matrix::Zero(dim, dim);
    for (const Term& t : terms_) {
      for (Eigen::Index k = 0; k < dim; ++k) {
        const int nk = t.n[static_cast<std::size_t>(k)];
        if (nk == 0) continue;
        j.col(k) += (nk * monomial(t.n, static_cast<int>(k))) * t.weight;
      }
    }
    return j;
  }

 private:
  void fill_powers(const Vector& p) const {
    const auto dim = static_cast<std::size_t>(p.size());
    powers_.assign(dim, std::vector<double>(static_cast<std::size_t>(max_power_) + 1, 1.0));
    for (std::size_t k = 0; k < dim; ++k) {
      for (int e = 1; e <= max_power_; ++e) {
        powers_[k][static_cast<std::size_t>(e)] =
            powers_[k][static_cast<std::size_t>(e) - 1] * p(static_cast<Eigen::Index>(k));
      }
    }
  }

  // prod_j p_j^{n_j}, with the exponent of `lowered` reduced by one.
  double monomial(const std::vector<int>& n, int lowered) const {
    double m = 1.0;
    for (std::size_t j = 0; j < n.size(); ++j) {
      const int e = n[j] - (static_cast<int>(j) == lowered ? 1 : 0);
      m *= powers_[j][static_cast<std::size_t>(e)];
    }
    return m;
  }

  std::vector<Term> terms_;
  Vector target_;
  int max_power_;
  mutable std::vector<std::vector<double>> powers_;
};

}  // namespace

const char* fit_method_name(FitMethod method) {
  return method == FitMethod::kSumConstraint ? "sum-constraint" : "tail-limit";
}

FitResult fit_sum(const CoefficientTensor& unit, const Vector& lambda, const Vector& x_ref,
                  double t_ref, const FitOptions& options) {
  require_unit(unit, lambda);
  if (x_ref.size() != unit.dim()) throw Error(ErrorCode::kDimension, "reference state has wrong length");
  if (!x_ref.allFinite() || !std::isfinite(t_ref)) {
    throw Error(ErrorCode::kNonFinite, "reference state or time is not finite");
  }
  const int dim = unit.dim();
  int max_power = 0;
  for (const MultiIndex& n : unit.index_set().indices()) {
    for (int v : n.components()) max_power = std::max(max_power, v);
  }
  const SumSystem system(timed_terms(unit, lambda, t_ref), x_ref, max_power);

  FitResult out;
  out.method = FitMethod::kSumConstraint;
  out.t_ref = t_ref;
  if (options.certified_t0 && t_ref < *options.certified_t0) {
    std::ostringstream msg;
    msg << "t_ref = " << t_ref << " lies below the certified t0 = " << *options.certified_t0
        << "; convergence of the series there is not guaranteed";
    out.warnings.push_back(msg.str());
  }

  const Vector c = unit.at(MultiIndex::zero(dim));
  const auto p0 = linalg::solve_partial_pivot(first_order_directions(unit), x_ref - c);
  if (!p0) throw Error(ErrorCode::kFitSingularJacobian, "first-order directions are singular");
  Vector p = p0->cwiseProduct((-lambda * t_ref).array().exp().matrix());

  const double tol = options.tolerance * std::max(1.0, x_ref.cwiseAbs().maxCoeff());
  Vector r = system.residual(p);
  double norm = r.cwiseAbs().maxCoeff();
  for (int it = 0; it <= options.max_iterations; ++it) {
    if (norm <= tol) {
      out.p = p;
      out.residual = norm;
      out.iterations = it;
      return out;
    }
    if (it == options.max_iterations) break;
    const auto step = linalg::solve_partial_pivot(system.jacobian(p), -r);
    if (!step) {
      throw Error(ErrorCode::kFitSingularJacobian, "Jacobian of the sum constraint is singular");
    }
    double scale = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, scale *= 0.5) {
      const Vector trial = p + scale * *step;
      const Vector trial_r = system.residual(trial);
      const double trial_norm = trial_r.cwiseAbs().maxCoeff();
      if (std::isfinite(trial_norm) && trial_norm < norm) {
        p = trial;
        r = trial_r;
        norm = trial_norm;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "sum-constraint Newton did not converge (misfit " << norm << ")";
  throw Error(ErrorCode::kFitNonConvergence, msg.str());
}

FitResult fit_tail_limits(const Trajectory& trajectory, const CoefficientTensor& unit,
                          const Vector& lambda, const TailFitOptions& options) {
  require_unit(unit, lambda);
  if (trajectory.times.size() != trajectory.states.size() || trajectory.times.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trajectory is empty or inconsistent");
  }
  if (!(options.window_fraction > 0.0 && options.window_fraction <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "window fraction must lie in (0, 1]");
  }
  const int dim = unit.dim();
  const Vector c = unit.at(MultiIndex::zero(dim));
  const Matrix w = first_order_directions(unit).inverse();
  const double t_last = trajectory.times.back();
  const double floor = options.drift_floor * std::max(1.0, c.cwiseAbs().maxCoeff());

  FitResult out;
  out.method = FitMethod::kTailLimit;
  out.p = Vector::Zero(dim);
  const IndexSet& set = unit.index_set();

  for (int k = 0; k < dim; ++k) {
    // Terms that involve only modes 0..k, projected on mode k.
    std::vector<std::pair<const MultiIndex*, double>> terms;
    for (std::size_t pos = 0; pos < set.size(); ++pos) {
      const MultiIndex& n = set.indices()[pos];
      if (n.degree() == 0 || !unit.filled(set.keys()[pos])) continue;
      bool slow = true;
      for (int j = k + 1; j < dim; ++j) slow = slow && n[j] == 0;
      if (slow) terms.emplace_back(&n, w.row(k).dot(unit.at(n)));
    }

    const double t_end = std::min(t_last, std::log(options.decay_floor) / lambda(k));
    const double t_begin = t_end * (1.0 - options.window_fraction);
    if (k == 0) out.t_ref = t_end;

    std::vector<double> estimates;
    for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
      const double t = trajectory.times[s];
      if (t < t_begin || t > t_end) continue;
      const double y = w.row(k).dot(trajectory.states[s] - c);
      // g(q) = sum_d coef[d] q^d with the known slower parameters folded in.
      std::vector<double> coef(static_cast<std::size_t>(set.max_degree()) + 1, 0.0);
      for (const auto& [n, proj] : terms) {
        double m = proj * std::exp(n->dot(lambda) * t);
        for (int j = 0; j < k; ++j) m *= std::pow(out.p(j), (*n)[j]);
        coef[static_cast<std::size_t>((*n)[k])] += m;
      }
      double q = y * std::exp(-lambda(k) * t);
      bool converged = false;
      for (int it = 0; it < 50 && !converged; ++it) {
        double g = -y;
        double dg = 0.0;
        double power = 1.0;
        for (std::size_t d = 0; d < coef.size(); ++d) {
          g += coef[d] * power;
          if (d + 1 < coef.size()) dg += static_cast<double>(d + 1) * coef[d + 1] * power;
          power *= q;
        }
        if (dg == 0.0 || !std::isfinite(dg)) break;
        const double delta = g / dg;
        q -= delta;
        converged = std::abs(delta) <= 1e-14 * std::max(1.0, std::abs(q));
      }
      if (!converged || !std::isfinite(q)) {
        std::ostringstream msg;
        msg << "tail-limit equation for mode " << k + 1 << " did not converge at t = " << t;
        throw Error(ErrorCode::kFitNonConvergence, msg.str());
      }
      estimates.push_back(q);
    }
    if (estimates.size() < 2) {
      std::ostringstream msg;
      msg << "tail window for mode " << k + 1 << " holds fewer than two samples";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
    double mean = 0.0;
    for (double e : estimates) mean += e;
    mean /= static_cast<double>(estimates.size());
    const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
    const double spread = *hi - *lo;
    if (spread > options.drift_tolerance * std::abs(mean) + floor) {
      std::ostringstream msg;
      msg << "tail estimate for mode " << k + 1 << " drifts by " << spread << " around " << mean;
      throw Error(ErrorCode::kTailDrift, msg.str());
    }
    out.p(k) = mean;
    out.residual = std::max(out.residual, spread);
  }
  return out;
}

TruncationSpec tail_fit_truncation(const Vector& lambda) {
  const double ratio = std::abs(lambda(lambda.size() - 1)) / std::abs(lambda(0));
  const int n = static_cast<int>(std::ceil(2.0 * ratio)) + 4;
  return TruncationSpec::total_degree(std::clamp(n, 6, 30));
}

}  // namespace sps
