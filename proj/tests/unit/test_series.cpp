#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sps/core/error.hpp"
#include "sps/core/series.hpp"
#include "systems.hpp"

using doctest::Approx;
using sps::ErrorCode;
using sps::MultiIndex;
using sps::TruncationSpec;

namespace {

sps::CoefficientTensor unit_tensor(const sps::QuadraticSystem& s, TruncationSpec t) {
  const auto spectral = sps::analyze(s);
  return sps::build_coefficients(s, spectral, t);
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const sps::Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("index enumeration") {
  CHECK(sps::enumerate_indices(TruncationSpec::per_index(3), 2).size() == 16);
  CHECK(sps::enumerate_indices(TruncationSpec::per_index(3), 3).size() == 64);
  // C(N + M, M)
  CHECK(sps::enumerate_indices(TruncationSpec::total_degree(6), 2).size() == 28);
  CHECK(sps::enumerate_indices(TruncationSpec::total_degree(4), 3).size() == 35);
  CHECK(sps::enumerate_indices(TruncationSpec::per_index(0), 2).size() == 1);

  const auto idx = sps::enumerate_indices(TruncationSpec::per_index(2), 2);
  CHECK(std::is_sorted(idx.begin(), idx.end()));
  CHECK(idx.front() == MultiIndex::zero(2));
  CHECK(idx[1] == MultiIndex({0, 1}));
  CHECK(idx[2] == MultiIndex({1, 0}));
  CHECK(idx.back() == MultiIndex({2, 2}));

  CHECK(sps::convolution_work(TruncationSpec::per_index(1), 2) == 9.0);
}

TEST_CASE("packed keys are linear") {
  const sps::IndexSet set(TruncationSpec::total_degree(5), 3);
  for (const auto& n : set.indices()) {
    for (const auto& m : set.indices()) {
      bool below = true;
      for (int i = 0; i < 3; ++i) below = below && m[i] <= n[i];
      if (!below) continue;
      std::vector<int> diff(3);
      for (int i = 0; i < 3; ++i) diff[static_cast<std::size_t>(i)] = n[i] - m[i];
      CHECK(set.key(MultiIndex(diff)) == set.key(n) - set.key(m));
    }
  }
  const auto [b, e] = set.shell(2);
  CHECK(e - b == 6);
  CHECK(!set.contains(MultiIndex({3, 3, 0})));
}

TEST_CASE("competition system at cap 3 reproduces the tabulated coefficients") {
  const auto coeffs = unit_tensor(testsys::competition(), TruncationSpec::per_index(3));
  // table[n2][n1] holds alpha_1^{n1,n2}, two decimals.
  const double table[4][4] = {{1, 1, -0.08, -0.64},
                              {1, 2, 1.28, -0.56},
                              {0.93, 2.82, 3.51, 1.33},
                              {0.85, 3.46, 6.27, 5.58}};
  for (int n1 = 0; n1 <= 3; ++n1) {
    for (int n2 = 0; n2 <= 3; ++n2) {
      CAPTURE(n1);
      CAPTURE(n2);
      CHECK(std::abs(coeffs.at(MultiIndex({n1, n2}))(0) - table[n2][n1]) <= 0.01);
    }
  }
  const auto mixed = coeffs.at(MultiIndex({1, 1}));
  CHECK(std::abs(mixed(0) - 2.0) <= 1e-10);
  CHECK(std::abs(mixed(1)) <= 1e-10);
}

TEST_CASE("in-truncation residuals vanish") {
  for (const auto& s : {testsys::competition(), testsys::weak_pair(), testsys::three_species()}) {
    const auto spectral = sps::analyze(s);
    for (int cap : {2, 3, 4}) {
      const auto coeffs = sps::build_coefficients(s, spectral, TruncationSpec::per_index(cap));
      const auto residual = sps::residual_spectrum(s, coeffs, spectral.eigenvalues);
      double scale = 1.0;
      for (const auto& n : coeffs.index_set().indices())
        scale = std::max(scale, coeffs.at(n).lpNorm<Eigen::Infinity>());
      // Unit parameters make the three-variable coefficients large.
      CHECK(sps::max_in_truncation_residual(residual) <= 1e-9 * (s.dim() == 2 ? 1.0 : scale));
      // The doubled truncation carries real truncation error.
      const bool outside = std::any_of(residual.begin(), residual.end(), [](const auto& r) {
        return !r.in_truncation && r.value.norm() > 1e-9;
      });
      CHECK(outside);
    }
  }
}

TEST_CASE("coefficients are monomials in the free parameters") {
  const auto s = testsys::weak_pair();
  const auto spectral = sps::analyze(s);
  const auto t = TruncationSpec::per_index(4);
  const auto unit = sps::build_coefficients(s, spectral, t);
  const auto p = testsys::vector({2.0, 3.0});
  const auto direct = sps::build_coefficients(s, spectral, t, p);
  const auto scaled = sps::scale_free_parameters(unit, p);
  for (const auto& n : unit.index_set().indices()) {
    const double factor = std::pow(2.0, n[0]) * std::pow(3.0, n[1]);
    for (int i = 0; i < 2; ++i) {
      const double expected = unit.at(n)(i) * factor;
      CHECK(std::abs(direct.at(n)(i) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
      CHECK(std::abs(scaled.at(n)(i) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
    }
  }
}

TEST_CASE("decoupled logistic pair keeps modes apart") {
  const auto s = testsys::decoupled();
  const auto spectral = sps::analyze(s);
  const auto coeffs =
      sps::build_coefficients(s, spectral, TruncationSpec::per_index(4), testsys::vector({0.5, 0.25}));
  CHECK(coeffs.anchors() == std::vector<int>{0, 1});
  for (const auto& n : coeffs.index_set().indices()) {
    const auto a = coeffs.at(n);
    if (n[0] > 0 && n[1] > 0) {
      CHECK(a.norm() <= 1e-12);
    } else if (n[1] == 0) {
      CHECK(a(0) == Approx(std::pow(0.5, n[0])));
      CHECK(std::abs(a(1) - (n[0] == 0 ? 1.0 : 0.0)) <= 1e-12);
    } else {
      CHECK(a(1) == Approx(std::pow(0.25, n[1])));
      CHECK(std::abs(a(0)) <= 1e-12);
    }
  }
}

TEST_CASE("build order inside a shell does not matter") {
  const auto s = testsys::competition();
  const auto spectral = sps::analyze(s);
  const auto t = TruncationSpec::total_degree(5);
  const auto built = sps::build_coefficients(s, spectral, t);
  auto manual = sps::seed_coefficients(spectral, t, sps::Vector::Ones(2));
  for (int d = 2; d <= 5; ++d) {
    const auto [b, e] = manual.index_set().shell(d);
    for (std::size_t k = e; k > b; --k) {
      const auto& n = manual.index_set().indices()[k - 1];
      manual.set(n, sps::next_coefficient(spectral, s.A, manual, n));
    }
  }
  for (const auto& n : built.index_set().indices()) {
    CHECK((manual.at(n) - built.at(n)).norm() <= 1e-13 * std::max(1.0, built.at(n).norm()));
  }
}

TEST_CASE("relabeling the variables permutes the coefficients") {
  const auto s = testsys::weak_pair();
  const auto swapped = testsys::make({{-1, -0.1}, {-0.3, -1}}, {1.7, 2.45});
  const auto sa = sps::analyze(s);
  const auto sb = sps::analyze(swapped);
  const auto t = TruncationSpec::per_index(3);
  const auto p = testsys::vector({0.7, -1.3});
  const auto a = sps::build_coefficients(s, sa, t, p);
  // Same physical solution: mode k of the swapped system has first-order term
  // P alpha^{e_k}, whose anchor component gives p'_k.
  sps::Vector q(2);
  for (int k = 0; k < 2; ++k) {
    const auto e = a.at(MultiIndex::unit(2, k));
    const sps::Vector pe = testsys::vector({e(1), e(0)});
    q(k) = pe(sps::anchor_component(sb.kernels.col(k)));
  }
  const auto b = sps::build_coefficients(swapped, sb, t, q);
  for (const auto& n : a.index_set().indices()) {
    const auto x = a.at(n);
    const auto y = b.at(n);
    CHECK(std::abs(x(0) - y(1)) <= 1e-10 * std::max(1.0, std::abs(x(0))));
    CHECK(std::abs(x(1) - y(0)) <= 1e-10 * std::max(1.0, std::abs(x(1))));
  }
}

TEST_CASE("evaluate matches the explicit sum and its derivative") {
  const auto s = testsys::competition();
  const auto spectral = sps::analyze(s);
  const auto coeffs =
      sps::build_coefficients(s, spectral, TruncationSpec::per_index(3), testsys::vector({0.3, -0.2}));
  const double t = 0.8;
  sps::Vector sum = sps::Vector::Zero(2);
  for (const auto& n : coeffs.index_set().indices()) sum += coeffs.at(n) * std::exp(n.dot(spectral.eigenvalues) * t);
  CHECK((sps::evaluate(coeffs, spectral.eigenvalues, t) - sum).norm() <= 1e-13);

  const double h = 1e-5;
  const sps::Vector fd = (sps::evaluate(coeffs, spectral.eigenvalues, t + h) -
                          sps::evaluate(coeffs, spectral.eigenvalues, t - h)) /
                         (2 * h);
  CHECK((sps::evaluate_derivative(coeffs, spectral.eigenvalues, t) - fd).norm() <= 1e-8);

  CHECK(code_of([&] { sps::evaluate(coeffs, spectral.eigenvalues, -200.0); }) == ErrorCode::kOverflow);
}

TEST_CASE("error paths") {
  const auto s = testsys::competition();
  const auto spectral = sps::analyze(s);
  const auto seed = sps::seed_coefficients(spectral, TruncationSpec::per_index(3), sps::Vector::Ones(2));
  CHECK(code_of([&] { sps::next_coefficient(spectral, s.A, seed, MultiIndex({2, 2})); }) ==
        ErrorCode::kMissingCoefficient);
  CHECK(code_of([&] { sps::next_coefficient(spectral, s.A, seed, MultiIndex({1, 0})); }) ==
        ErrorCode::kInvalidArgument);

  sps::BuildOptions tiny;
  tiny.entry_budget = 10;
  CHECK(code_of([&] {
          sps::build_coefficients(s, spectral, TruncationSpec::per_index(3), sps::Vector::Ones(2), tiny);
        }) == ErrorCode::kBudget);
  sps::BuildOptions slow;
  slow.work_budget = 50;
  CHECK(code_of([&] {
          sps::build_coefficients(s, spectral, TruncationSpec::per_index(3), sps::Vector::Ones(2), slow);
        }) == ErrorCode::kBudget);

  const auto constant = unit_tensor(s, TruncationSpec::per_index(0));
  CHECK(constant.index_set().size() == 1);
  CHECK(constant.at(MultiIndex::zero(2))(1) == Approx(2.0));
}
