#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sps {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Systems whose interaction matrix has a reciprocal condition estimate below
// this are rejected: the equilibrium -A^{-1} b is not meaningful there.
inline constexpr double kMinReciprocalCondition = 1e-12;

/// Which multi-indices a truncated series keeps.
///
/// A per-index cap d keeps every n with max(n_i) <= d, (d+1)^M indices in
/// total. A total-degree cap N keeps every n with sum(n_i) <= N, which is
/// C(N+M, M) indices. A cap of 0 keeps only the constant term.
struct TruncationSpec {
  enum class Mode { kPerIndex, kTotalDegree };

  Mode mode = Mode::kPerIndex;
  int value = 3;

  static TruncationSpec per_index(int cap) { return {Mode::kPerIndex, cap}; }
  static TruncationSpec total_degree(int cap) { return {Mode::kTotalDegree, cap}; }

  friend bool operator==(const TruncationSpec&, const TruncationSpec&) = default;
};

/// The quadratic system  dx/dt = diag(x) (b + A x).
///
/// `A` carries interaction rates, `b` the linear growth rates. The initial
/// state and the truncation are optional; operations that need either fail
/// with an explicit error instead of inventing a default.
struct QuadraticSystem {
  Matrix A;
  Vector b;
  std::optional<Vector> x0;
  std::optional<TruncationSpec> truncation;

  int dim() const { return static_cast<int>(b.size()); }
};

// Parses a system-definition document:
//   {"A": [[..],..], "b": [..], "x0": [..], "truncation": {"per_index": 3}}
// "x0" and "truncation" are optional; any other key is rejected. The result
// has already been through validate().
QuadraticSystem parse_system(std::string_view text);
QuadraticSystem load_system(const std::filesystem::path& path);

// Inverse of parse_system. Doubles are written in shortest round-trip form so
// that parse_system(emit_system(s)) reproduces every entry bit for bit.
std::string emit_system(const QuadraticSystem& system);

// Checks shapes, finiteness and invertibility of A. Returns the system
// unchanged on success.
QuadraticSystem validate(QuadraticSystem system);

// sigma_min / sigma_max of a square matrix (0 for an empty or zero matrix).
double reciprocal_condition(const Matrix& a);

}  // namespace sps
