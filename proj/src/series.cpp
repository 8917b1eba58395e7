#include "sps/core/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sps/core/error.hpp"
#include "sps/core/linalg.hpp"

namespace sps {
namespace {

std::string describe(const MultiIndex& n) {
  std::ostringstream out;
  out << '(';
  for (int i = 0; i < n.dim(); ++i) out << (i ? "," : "") << n[i];
  out << ')';
  return out.str();
}

// Compositions of `degree` into `dim` parts, each at most `cap`, in
// lexicographic order.
void append_shell(int degree, int dim, int cap, std::vector<int>& prefix,
                  std::vector<MultiIndex>& out) {
  const int slot = static_cast<int>(prefix.size());
  const int remaining_slots = dim - slot;
  if (remaining_slots == 1) {
    if (degree <= cap) {
      prefix.push_back(degree);
      out.emplace_back(prefix);
      prefix.pop_back();
    }
    return;
  }
  const int low = std::max(0, degree - cap * (remaining_slots - 1));
  const int high = std::min(cap, degree);
  for (int v = low; v <= high; ++v) {
    prefix.push_back(v);
    append_shell(degree - v, dim, cap, prefix, out);
    prefix.pop_back();
  }
}

double binomial(double n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// sum_k x[k] * y[-k], four independent accumulators.
inline double dot_reverse(const double* x, const double* y, std::size_t count) {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    a0 += x[k] * y[-static_cast<std::ptrdiff_t>(k)];
    a1 += x[k + 1] * y[-static_cast<std::ptrdiff_t>(k + 1)];
    a2 += x[k + 2] * y[-static_cast<std::ptrdiff_t>(k + 2)];
    a3 += x[k + 3] * y[-static_cast<std::ptrdiff_t>(k + 3)];
  }
  for (; k < count; ++k) a0 += x[k] * y[-static_cast<std::ptrdiff_t>(k)];
  return (a0 + a1) + (a2 + a3);
}

// Two-component case: all three pair sums in one pass over the block.
inline void pair_block(const double* x0, const double* x1, const double* y0, const double* y1,
                       std::size_t count, Matrix& s) {
  double s00a = 0.0, s01a = 0.0, s11a = 0.0;
  double s00b = 0.0, s01b = 0.0, s11b = 0.0;
  std::size_t k = 0;
  for (; k + 2 <= count; k += 2) {
    const auto r = -static_cast<std::ptrdiff_t>(k);
    s00a += x0[k] * y0[r];
    s01a += x0[k] * y1[r];
    s11a += x1[k] * y1[r];
    s00b += x0[k + 1] * y0[r - 1];
    s01b += x0[k + 1] * y1[r - 1];
    s11b += x1[k + 1] * y1[r - 1];
  }
  if (k < count) {
    const auto r = -static_cast<std::ptrdiff_t>(k);
    s00a += x0[k] * y0[r];
    s01a += x0[k] * y1[r];
    s11a += x1[k] * y1[r];
  }
  s(0, 0) += s00a + s00b;
  s(0, 1) += s01a + s01b;
  s(1, 1) += s11a + s11b;
}

// Convolution over the interior of the box [0, n] without presence checks.
Matrix convolve(const CoefficientTensor& t, const MultiIndex& n) {
  const int dim = t.dim();
  const IndexSet& set = t.index_set();
  const std::size_t kn = set.key(n);
  std::vector<const double*> comp(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) comp[static_cast<std::size_t>(i)] = t.component(i).data();

  Matrix s = Matrix::Zero(dim, dim);
  std::vector<int> m(static_cast<std::size_t>(dim), 0);
  std::size_t base = 0;
  const int n0 = n[0];
  while (true) {
    bool outer_zero = true;
    bool outer_full = true;
    for (int d = 1; d < dim; ++d) {
      outer_zero = outer_zero && m[static_cast<std::size_t>(d)] == 0;
      outer_full = outer_full && m[static_cast<std::size_t>(d)] == n[d];
    }
    const int lo = outer_zero ? 1 : 0;
    const int hi = outer_full ? n0 - 1 : n0;
    if (lo <= hi) {
      const std::size_t start = base + static_cast<std::size_t>(lo);
      const std::size_t mirror = kn - start;
      const auto count = static_cast<std::size_t>(hi - lo + 1);
      if (dim == 2) {
        pair_block(comp[0] + start, comp[1] + start, comp[0] + mirror, comp[1] + mirror, count, s);
      } else {
        for (int i = 0; i < dim; ++i) {
          for (int j = i; j < dim; ++j) {
            s(i, j) += dot_reverse(comp[static_cast<std::size_t>(i)] + start,
                                   comp[static_cast<std::size_t>(j)] + mirror, count);
          }
        }
      }
    }
    int d = 1;
    for (; d < dim; ++d) {
      auto& md = m[static_cast<std::size_t>(d)];
      if (md < n[d]) {
        ++md;
        base += set.stride(d);
        break;
      }
      base -= static_cast<std::size_t>(md) * set.stride(d);
      md = 0;
    }
    if (d >= dim) break;
  }
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < i; ++j) s(i, j) = s(j, i);
  }
  return s;
}

Vector solve_shifted(const SpectralData& spectral, const Matrix& a, const Matrix& s,
                     const MultiIndex& n) {
  const double shift = n.dot(spectral.eigenvalues);
  const Eigen::Index dim = a.rows();
  const double gap = (spectral.eigenvalues.array() - shift).abs().minCoeff();
  const double scale = std::max(std::abs(shift), spectral.eigenvalues.cwiseAbs().maxCoeff());
  const Vector rhs = a.cwiseProduct(s).rowwise().sum();
  std::optional<Vector> alpha;
  if (gap > 1e-12 * scale) {
    alpha = linalg::solve_partial_pivot(shift * Matrix::Identity(dim, dim) - spectral.linearization,
                                        rhs, 1e-12);
  }
  if (!alpha) {
    std::ostringstream msg;
    msg << "resonance at n = " << describe(n) << ": n . lambda = " << shift
        << " coincides with an eigenvalue of J";
    throw Error(ErrorCode::kResonance, msg.str());
  }
  return *alpha;
}

void check_budget(const TruncationSpec& truncation, int dim, const BuildOptions& options) {
  const double work = convolution_work(truncation, dim);
  if (work > options.work_budget) {
    std::ostringstream msg;
    msg << "truncation needs " << work << " convolution terms, above the budget of "
        << options.work_budget;
    throw Error(ErrorCode::kBudget, msg.str());
  }
}

}  // namespace

MultiIndex::MultiIndex(std::vector<int> components) : n_(std::move(components)) {
  for (int v : n_) {
    if (v < 0) throw Error(ErrorCode::kInvalidArgument, "multi-index components must be >= 0");
  }
  degree_ = std::accumulate(n_.begin(), n_.end(), 0);
}

MultiIndex::MultiIndex(std::initializer_list<int> components)
    : MultiIndex(std::vector<int>(components)) {}

MultiIndex MultiIndex::unit(int dim, int i) {
  std::vector<int> n(static_cast<std::size_t>(dim), 0);
  n[static_cast<std::size_t>(i)] = 1;
  return MultiIndex(std::move(n));
}

double MultiIndex::dot(const Vector& lambda) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < n_.size(); ++i) acc += n_[i] * lambda(static_cast<Eigen::Index>(i));
  return acc;
}

std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  return a.n_ <=> b.n_;
}

std::vector<MultiIndex> enumerate_indices(const TruncationSpec& truncation, int dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (truncation.value < 0) throw Error(ErrorCode::kInvalidArgument, "truncation cap must be >= 0");
  const bool per_index = truncation.mode == TruncationSpec::Mode::kPerIndex;
  const int cap = truncation.value;
  const int max_degree = per_index ? cap * dim : cap;
  std::vector<MultiIndex> out;
  std::vector<int> prefix;
  for (int d = 0; d <= max_degree; ++d) append_shell(d, dim, cap, prefix, out);
  return out;
}

double convolution_work(const TruncationSpec& truncation, int dim) {
  const double cap = truncation.value;
  if (truncation.mode == TruncationSpec::Mode::kPerIndex) {
    return std::pow((cap + 1.0) * (cap + 2.0) / 2.0, dim);
  }
  // sum_{|n| <= N} prod(n_i + 1) = C(N + 2M, 2M)
  return binomial(cap + 2.0 * dim, 2 * dim);
}

IndexSet::IndexSet(TruncationSpec truncation, int dim, double entry_budget)
    : truncation_(truncation), dim_(dim) {
  if (dim < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (truncation.value < 0) throw Error(ErrorCode::kInvalidArgument, "truncation cap must be >= 0");
  const double radix = truncation.value + 1.0;
  const double slots = std::pow(radix, dim);
  if (slots > entry_budget) {
    std::ostringstream msg;
    msg << "truncation needs " << slots << " coefficient slots, above the budget of "
        << entry_budget;
    throw Error(ErrorCode::kBudget, msg.str());
  }
  strides_.resize(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) {
    strides_[static_cast<std::size_t>(i)] = slot_count_;
    slot_count_ *= static_cast<std::size_t>(truncation.value + 1);
  }
  max_degree_ = truncation.mode == TruncationSpec::Mode::kPerIndex ? truncation.value * dim
                                                                    : truncation.value;
  indices_ = enumerate_indices(truncation, dim);
  keys_.reserve(indices_.size());
  shell_begin_.assign(static_cast<std::size_t>(max_degree_) + 2, indices_.size());
  for (std::size_t pos = 0; pos < indices_.size(); ++pos) {
    keys_.push_back(key(indices_[pos]));
    const auto d = static_cast<std::size_t>(indices_[pos].degree());
    shell_begin_[d] = std::min(shell_begin_[d], pos);
  }
  for (std::size_t d = shell_begin_.size() - 1; d-- > 0;) {
    shell_begin_[d] = std::min(shell_begin_[d], shell_begin_[d + 1]);
  }
}

bool IndexSet::contains(const MultiIndex& n) const {
  if (n.dim() != dim_) return false;
  if (truncation_.mode == TruncationSpec::Mode::kTotalDegree) return n.degree() <= truncation_.value;
  for (int v : n.components()) {
    if (v > truncation_.value) return false;
  }
  return true;
}

std::size_t IndexSet::key(const MultiIndex& n) const {
  std::size_t k = 0;
  for (int i = 0; i < dim_; ++i) k += static_cast<std::size_t>(n[i]) * strides_[static_cast<std::size_t>(i)];
  return k;
}

std::pair<std::size_t, std::size_t> IndexSet::shell(int degree) const {
  if (degree < 0 || degree > max_degree_) return {indices_.size(), indices_.size()};
  return {shell_begin_[static_cast<std::size_t>(degree)],
          shell_begin_[static_cast<std::size_t>(degree) + 1]};
}

CoefficientTensor::CoefficientTensor(IndexSet index_set, Vector free_parameters,
                                     std::vector<int> anchors)
    : set_(std::move(index_set)),
      free_parameters_(std::move(free_parameters)),
      anchors_(std::move(anchors)),
      values_(static_cast<std::size_t>(set_.dim()) * set_.slot_count(), 0.0),
      filled_(set_.slot_count(), 0) {}

bool CoefficientTensor::has(const MultiIndex& n) const {
  return set_.contains(n) && filled_[set_.key(n)] != 0;
}

Vector CoefficientTensor::at(const MultiIndex& n) const {
  if (!has(n)) throw Error(ErrorCode::kMissingCoefficient, "no coefficient for n = " + describe(n));
  const std::size_t k = set_.key(n);
  Vector out(dim());
  for (int i = 0; i < dim(); ++i) out(i) = value(i, k);
  return out;
}

void CoefficientTensor::set(const MultiIndex& n, const Vector& alpha) {
  if (!set_.contains(n)) {
    throw Error(ErrorCode::kInvalidArgument, "n = " + describe(n) + " is outside the truncation");
  }
  if (alpha.size() != dim()) throw Error(ErrorCode::kDimension, "coefficient vector has wrong length");
  const std::size_t k = set_.key(n);
  for (int i = 0; i < dim(); ++i) values_[static_cast<std::size_t>(i) * set_.slot_count() + k] = alpha(i);
  filled_[k] = 1;
}

void CoefficientTensor::clear(const MultiIndex& n) {
  if (!set_.contains(n)) return;
  const std::size_t k = set_.key(n);
  for (int i = 0; i < dim(); ++i) values_[static_cast<std::size_t>(i) * set_.slot_count() + k] = 0.0;
  filled_[k] = 0;
}

std::span<const double> CoefficientTensor::component(int i) const {
  return {values_.data() + static_cast<std::size_t>(i) * set_.slot_count(), set_.slot_count()};
}

int anchor_component(const Vector& kernel) {
  const double largest = kernel.cwiseAbs().maxCoeff();
  if (std::abs(kernel(0)) > 1e-8 * largest) return 0;
  Eigen::Index lead = 0;
  kernel.cwiseAbs().maxCoeff(&lead);
  return static_cast<int>(lead);
}

CoefficientTensor seed_coefficients(const SpectralData& spectral, const TruncationSpec& truncation,
                                    const Vector& free_parameters, double entry_budget) {
  const int dim = static_cast<int>(spectral.equilibrium.size());
  if (free_parameters.size() != dim) {
    throw Error(ErrorCode::kDimension, "free parameter vector must have one entry per mode");
  }
  std::vector<int> anchors;
  for (int k = 0; k < dim; ++k) anchors.push_back(anchor_component(spectral.kernels.col(k)));

  CoefficientTensor tensor(IndexSet(truncation, dim, entry_budget), free_parameters, anchors);
  tensor.set(MultiIndex::zero(dim), spectral.equilibrium);
  if (tensor.index_set().max_degree() >= 1) {
    for (int k = 0; k < dim; ++k) {
      const Vector v = spectral.kernels.col(k);
      tensor.set(MultiIndex::unit(dim, k),
                 free_parameters(k) * v / v(anchors[static_cast<std::size_t>(k)]));
    }
  }
  tensor.set_complete_degree(std::min(1, tensor.index_set().max_degree()));
  return tensor;
}

Matrix convolution_s(const CoefficientTensor& coeffs, const MultiIndex& n) {
  if (n.dim() != coeffs.dim()) throw Error(ErrorCode::kDimension, "multi-index has wrong dimension");
  // Every interior point must already be present.
  const int dim = coeffs.dim();
  std::vector<int> m(static_cast<std::size_t>(dim), 0);
  while (true) {
    const MultiIndex mi(m);
    if (mi.degree() != 0 && mi != n && !coeffs.has(mi)) {
      throw Error(ErrorCode::kMissingCoefficient,
                  "convolution for n = " + describe(n) + " needs missing coefficient " + describe(mi));
    }
    int d = 0;
    for (; d < dim; ++d) {
      auto& md = m[static_cast<std::size_t>(d)];
      if (md < n[d]) {
        ++md;
        break;
      }
      md = 0;
    }
    if (d == dim) break;
  }
  return convolve(coeffs, n);
}

Vector next_coefficient(const SpectralData& spectral, const Matrix& a,
                        const CoefficientTensor& coeffs, const MultiIndex& n) {
  if (n.degree() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "coefficients of degree 0 and 1 are seeded, not solved for (n = " + describe(n) + ")");
  }
  return solve_shifted(spectral, a, convolution_s(coeffs, n), n);
}

CoefficientTensor build_coefficients(const QuadraticSystem& system, const SpectralData& spectral,
                                     const TruncationSpec& truncation,
                                     const Vector& free_parameters, const BuildOptions& options) {
  check_budget(truncation, system.dim(), options);
  CoefficientTensor tensor =
      seed_coefficients(spectral, truncation, free_parameters, options.entry_budget);
  const IndexSet& set = tensor.index_set();
  const auto& indices = set.indices();
  for (int d = 2; d <= set.max_degree(); ++d) {
    const auto [begin, end] = set.shell(d);
    for (std::size_t pos = begin; pos < end; ++pos) {
      const MultiIndex& n = indices[pos];
      Vector alpha = solve_shifted(spectral, system.A, convolve(tensor, n), n);
      if (!alpha.allFinite()) {
        if (options.stop_on_overflow) {
          for (std::size_t q = begin; q < pos; ++q) tensor.clear(indices[q]);
          tensor.set_complete_degree(d - 1);
          return tensor;
        }
        throw Error(ErrorCode::kOverflow,
                    "coefficient at n = " + describe(n) + " overflowed double precision");
      }
      tensor.set(n, alpha);
    }
    tensor.set_complete_degree(d);
  }
  return tensor;
}

CoefficientTensor build_coefficients(const QuadraticSystem& system, const SpectralData& spectral,
                                     const TruncationSpec& truncation) {
  return build_coefficients(system, spectral, truncation, Vector::Ones(system.dim()));
}

CoefficientTensor scale_free_parameters(const CoefficientTensor& unit, const Vector& p) {
  if (p.size() != unit.dim()) throw Error(ErrorCode::kDimension, "free parameter vector has wrong length");
  if (!(unit.free_parameters().array() == 1.0).all()) {
    throw Error(ErrorCode::kInvalidArgument, "scale_free_parameters expects a unit-parameter tensor");
  }
  CoefficientTensor out(unit.index_set(), p, unit.anchors());
  for (const MultiIndex& n : unit.index_set().indices()) {
    if (!unit.has(n)) continue;
    double scale = 1.0;
    for (int k = 0; k < n.dim(); ++k) scale *= std::pow(p(k), n[k]);
    out.set(n, scale * unit.at(n));
  }
  out.set_complete_degree(unit.complete_degree());
  return out;
}

namespace {

// Sum over stored n of weight(n) * alpha^n * exp((n . lambda) t).
template <typename Weight>
Vector sum_series(const CoefficientTensor& coeffs, const Vector& lambda, double t, Weight weight) {
  const int dim = coeffs.dim();
  if (lambda.size() != dim) throw Error(ErrorCode::kDimension, "eigenvalue vector has wrong length");
  const IndexSet& set = coeffs.index_set();
  double worst = -std::numeric_limits<double>::infinity();
  for (const MultiIndex& n : set.indices()) worst = std::max(worst, n.dot(lambda) * t);
  if (worst > kMaxExponent) {
    std::ostringstream msg;
    msg << "series term exponent " << worst << " at t = " << t << " exceeds " << kMaxExponent;
    throw Error(ErrorCode::kOverflow, msg.str());
  }
  Vector out = Vector::Zero(dim);
  const auto& keys = set.keys();
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const std::size_t k = keys[pos];
    if (!coeffs.filled(k)) continue;
    const MultiIndex& n = set.indices()[pos];
    const double rate = n.dot(lambda);
    const double w = weight(rate) * std::exp(rate * t);
    for (int i = 0; i < dim; ++i) out(i) += w * coeffs.value(i, k);
  }
  return out;
}

}  // namespace

Vector evaluate(const CoefficientTensor& coeffs, const Vector& lambda, double t) {
  return sum_series(coeffs, lambda, t, [](double) { return 1.0; });
}

Vector evaluate_derivative(const CoefficientTensor& coeffs, const Vector& lambda, double t) {
  return sum_series(coeffs, lambda, t, [](double rate) { return rate; });
}

std::vector<ResidualEntry> residual_spectrum(const QuadraticSystem& system,
                                             const CoefficientTensor& coeffs,
                                             const Vector& lambda) {
  const int dim = coeffs.dim();
  const IndexSet& set = coeffs.index_set();
  const TruncationSpec doubled{set.truncation().mode, 2 * set.truncation().value};
  const IndexSet wide(doubled, dim, std::numeric_limits<double>::infinity());

  // A alpha^m for every stored m, keyed by the tensor's packing.
  std::vector<Vector> a_alpha(set.slot_count());
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const std::size_t k = set.keys()[pos];
    if (coeffs.filled(k)) a_alpha[k] = system.A * coeffs.at(set.indices()[pos]);
  }

  std::vector<ResidualEntry> out;
  out.reserve(wide.size());
  std::vector<int> m(static_cast<std::size_t>(dim));
  std::vector<int> rest(static_cast<std::size_t>(dim));
  for (const MultiIndex& n : wide.indices()) {
    ResidualEntry entry{n, Vector::Zero(dim), coeffs.contains(n)};
    if (entry.in_truncation && coeffs.has(n)) {
      const Vector alpha = coeffs.at(n);
      entry.value = (n.dot(lambda) - system.b.array()).matrix().cwiseProduct(alpha);
    }
    std::fill(m.begin(), m.end(), 0);
    while (true) {
      for (int d = 0; d < dim; ++d) rest[static_cast<std::size_t>(d)] = n[d] - m[static_cast<std::size_t>(d)];
      const MultiIndex mi(m);
      const MultiIndex ri(rest);
      if (coeffs.has(mi) && coeffs.has(ri)) {
        const std::size_t km = set.key(mi);
        const Vector& ar = a_alpha[set.key(ri)];
        for (int i = 0; i < dim; ++i) entry.value(i) -= coeffs.value(i, km) * ar(i);
      }
      int d = 0;
      for (; d < dim; ++d) {
        auto& md = m[static_cast<std::size_t>(d)];
        if (md < n[d]) {
          ++md;
          break;
        }
        md = 0;
      }
      if (d == dim) break;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

double max_in_truncation_residual(const std::vector<ResidualEntry>& residual) {
  double worst = 0.0;
  for (const auto& e : residual) {
    if (e.in_truncation) worst = std::max(worst, e.value.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace sps
