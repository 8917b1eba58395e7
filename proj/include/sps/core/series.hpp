#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "sps/core/model.hpp"
#include "sps/core/spectral.hpp"

namespace sps {

// Default cap on packed coefficient slots held by one tensor.
inline constexpr double kDefaultEntryBudget = 1e7;
// Default cap on the number of convolution terms (sum over n of prod(n_i+1))
// a single build may evaluate.
inline constexpr double kDefaultWorkBudget = 4e10;

/// Exponent vector n of one term alpha^n exp((n . lambda) t).
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> components);
  MultiIndex(std::initializer_list<int> components);

  static MultiIndex zero(int dim) { return MultiIndex(std::vector<int>(dim, 0)); }
  static MultiIndex unit(int dim, int i);

  int dim() const { return static_cast<int>(n_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return n_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& components() const { return n_; }

  double dot(const Vector& lambda) const;

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.n_ == b.n_; }
  // Ascending total degree, ties broken lexicographically.
  friend std::strong_ordering operator<=>(const MultiIndex& a, const MultiIndex& b);

 private:
  std::vector<int> n_;
  int degree_ = 0;
};

// All indices admitted by the truncation, sorted by degree then lexicographically.
std::vector<MultiIndex> enumerate_indices(const TruncationSpec& truncation, int dim);

// Number of convolution terms needed to build every coefficient of the
// truncation: sum over n of prod(n_i + 1).
double convolution_work(const TruncationSpec& truncation, int dim);

/// Ordered multi-index set with a dense mixed-radix packing.
///
/// key(n) = sum n_i * radix^i is linear, so key(n - m) = key(n) - key(m) for
/// m <= n; the convolution loops rely on this.
class IndexSet {
 public:
  IndexSet(TruncationSpec truncation, int dim, double entry_budget = kDefaultEntryBudget);

  int dim() const { return dim_; }
  const TruncationSpec& truncation() const { return truncation_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return indices_.size(); }
  std::size_t slot_count() const { return slot_count_; }
  std::size_t stride(int i) const { return strides_[static_cast<std::size_t>(i)]; }

  const std::vector<MultiIndex>& indices() const { return indices_; }
  const std::vector<std::size_t>& keys() const { return keys_; }

  bool contains(const MultiIndex& n) const;
  // Packed key; n must lie inside the packing box (every n_i <= radix - 1).
  std::size_t key(const MultiIndex& n) const;

  // [begin, end) positions in indices() of the shell with the given degree.
  std::pair<std::size_t, std::size_t> shell(int degree) const;

 private:
  TruncationSpec truncation_;
  int dim_;
  int max_degree_;
  std::size_t slot_count_ = 1;
  std::vector<std::size_t> strides_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> keys_;
  std::vector<std::size_t> shell_begin_;
};

/// Map n -> alpha^n over a truncation.
///
/// Stored component-major in the dense packing of the index set. The first
/// order entries are p_k times the kernel direction of mode k rescaled so its
/// anchor component is 1; every other entry is a fixed constant times
/// prod p_k^{n_k}.
class CoefficientTensor {
 public:
  CoefficientTensor(IndexSet index_set, Vector free_parameters, std::vector<int> anchors);

  const IndexSet& index_set() const { return set_; }
  int dim() const { return set_.dim(); }
  const TruncationSpec& truncation() const { return set_.truncation(); }
  const Vector& free_parameters() const { return free_parameters_; }
  // anchors()[k]: the component of alpha^{e_k} that equals p_k.
  const std::vector<int>& anchors() const { return anchors_; }
  // Highest degree D such that every shell up to D has been computed.
  int complete_degree() const { return complete_degree_; }
  void set_complete_degree(int degree) { complete_degree_ = degree; }

  bool contains(const MultiIndex& n) const { return set_.contains(n); }
  bool has(const MultiIndex& n) const;
  Vector at(const MultiIndex& n) const;
  void set(const MultiIndex& n, const Vector& alpha);
  void clear(const MultiIndex& n);

  std::span<const double> component(int i) const;
  bool filled(std::size_t key) const { return filled_[key] != 0; }
  double value(int i, std::size_t key) const { return values_[static_cast<std::size_t>(i) * set_.slot_count() + key]; }

 private:
  IndexSet set_;
  Vector free_parameters_;
  std::vector<int> anchors_;
  std::vector<double> values_;
  std::vector<unsigned char> filled_;
  int complete_degree_ = -1;
};

struct BuildOptions {
  double entry_budget = kDefaultEntryBudget;
  double work_budget = kDefaultWorkBudget;
  // Stop at the last finite shell instead of throwing kOverflow.
  bool stop_on_overflow = false;
};

// Anchor component for a kernel direction: component 0 when it is non-zero,
// otherwise the largest-magnitude component.
int anchor_component(const Vector& kernel);

// Tensor holding only the degree-0 and degree-1 entries: alpha^0 = c and
// alpha^{e_k} = p_k * v_k / v_k[anchor_k].
CoefficientTensor seed_coefficients(const SpectralData& spectral, const TruncationSpec& truncation,
                                    const Vector& free_parameters,
                                    double entry_budget = kDefaultEntryBudget);

// S^n_ij = sum over m <= n, m not in {0, n}, of alpha_i^m alpha_j^{n-m}.
Matrix convolution_s(const CoefficientTensor& coeffs, const MultiIndex& n);

// Solves ((n . lambda) I - J) alpha^n = s^n with s^n the diagonal of A S^n.
// Throws kResonance when n . lambda is numerically an eigenvalue of J.
Vector next_coefficient(const SpectralData& spectral, const Matrix& a,
                        const CoefficientTensor& coeffs, const MultiIndex& n);

// Full tensor, one degree shell at a time.
CoefficientTensor build_coefficients(const QuadraticSystem& system, const SpectralData& spectral,
                                     const TruncationSpec& truncation,
                                     const Vector& free_parameters,
                                     const BuildOptions& options = {});
CoefficientTensor build_coefficients(const QuadraticSystem& system, const SpectralData& spectral,
                                     const TruncationSpec& truncation);

// Rescales a unit-parameter tensor: alpha^n -> alpha^n * prod p_k^{n_k}.
CoefficientTensor scale_free_parameters(const CoefficientTensor& unit, const Vector& p);

// Truncated series x(t) = sum alpha^n exp((n . lambda) t) and its time
// derivative. Throws kOverflow if any exponent exceeds kMaxExponent.
inline constexpr double kMaxExponent = 700.0;
Vector evaluate(const CoefficientTensor& coeffs, const Vector& lambda, double t);
Vector evaluate_derivative(const CoefficientTensor& coeffs, const Vector& lambda, double t);

struct ResidualEntry {
  MultiIndex index;
  Vector value;
  bool in_truncation = false;
};

// Coefficients of d/dt x - diag(x)(b + A x) for the truncated series x, over
// the doubled truncation (cap 2d or total degree 2N). In-truncation entries
// are the recursion's solve residuals; the rest are truncation error.
std::vector<ResidualEntry> residual_spectrum(const QuadraticSystem& system,
                                             const CoefficientTensor& coeffs,
                                             const Vector& lambda);

// Largest infinity-norm over the in-truncation residual entries.
double max_in_truncation_residual(const std::vector<ResidualEntry>& residual);

}  // namespace sps
