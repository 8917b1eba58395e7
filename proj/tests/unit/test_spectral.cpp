#include <doctest.h>

#include <cmath>

#include "sps/core/error.hpp"
#include "sps/core/spectral.hpp"
#include "systems.hpp"

using doctest::Approx;
using sps::ErrorCode;

namespace {

ErrorCode analyze_error(const sps::QuadraticSystem& s) {
  try {
    sps::analyze(s);
  } catch (const sps::Error& e) {
    return e.code();
  }
  FAIL("analyze accepted the system");
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("equilibria of the two-variable examples") {
  const auto c = sps::equilibrium(testsys::competition());
  CHECK(std::abs(c(0) - 1.0) <= 1e-12);
  CHECK(std::abs(c(1) - 2.0) <= 1e-12);

  const auto d = sps::equilibrium(testsys::weak_pair());
  CHECK(std::abs(d(0) - 2.0) <= 1e-10);
  CHECK(std::abs(d(1) - 1.5) <= 1e-10);
}

TEST_CASE("linearization is diag(c) A") {
  const auto j = sps::linearization(testsys::matrix({{-2, -1}, {-1, -1}}), testsys::vector({1, 2}));
  CHECK(j(0, 0) == -2.0);
  CHECK(j(0, 1) == -1.0);
  CHECK(j(1, 0) == -2.0);
  CHECK(j(1, 1) == -2.0);
}

TEST_CASE("spectra sorted by ascending magnitude") {
  const auto data = sps::analyze(testsys::competition());
  CHECK(std::abs(data.eigenvalues(0) - (-2.0 + std::sqrt(2.0))) <= 1e-10);
  CHECK(std::abs(data.eigenvalues(1) - (-2.0 - std::sqrt(2.0))) <= 1e-10);

  const auto weak = sps::analyze(testsys::weak_pair());
  CHECK(weak.eigenvalues(0) == Approx(-1.35948752).epsilon(1e-8));
  CHECK(weak.eigenvalues(1) == Approx(-2.14051248).epsilon(1e-8));

  // Three variables go through the general eigen-solver.
  const auto three = sps::analyze(testsys::three_species());
  CHECK(three.eigenvalues(0) == Approx(-1.47503469).epsilon(1e-8));
  CHECK(three.eigenvalues(1) == Approx(-2.11134439).epsilon(1e-8));
  CHECK(three.eigenvalues(2) == Approx(-2.65672194).epsilon(1e-8));
}

TEST_CASE("assumption violations are reported with distinct codes") {
  CHECK(analyze_error(testsys::make({{-1, 2}, {-2, -1}}, {1, 3})) == ErrorCode::kComplexSpectrum);
  CHECK(analyze_error(testsys::make({{1, 0}, {0, -1}}, {-1, 1})) == ErrorCode::kNonNegativeEigenvalue);
  CHECK(analyze_error(testsys::make({{-1, 0}, {0, -1}}, {1, 1})) == ErrorCode::kRepeatedEigenvalue);
  // lambda = (-1, -2): 2 lambda_1 - lambda_2 = 0.
  CHECK(analyze_error(testsys::make({{-1, 0}, {0, -2}}, {1, 2})) == ErrorCode::kResonance);
}

TEST_CASE("resonance_check finds lattice hits in both signs") {
  const auto hits = sps::resonance_check(testsys::vector({-1.0, -2.0}), 3);
  bool found = false;
  for (const auto& z : hits) {
    if (z == std::vector<int>{2, -1}) found = true;
    CHECK(std::abs(z[0] * -1.0 + z[1] * -2.0) < 1e-9);
  }
  CHECK(found);
  CHECK(hits.size() % 2 == 0);
  CHECK(sps::resonance_check(testsys::vector({-1.0, -std::sqrt(2.0)})).empty());
}

TEST_CASE("kernel directions are unit null vectors with a fixed sign") {
  const auto data = sps::analyze(testsys::weak_pair());
  for (int k = 0; k < 2; ++k) {
    const sps::Vector v = data.kernels.col(k);
    CHECK(v.norm() == Approx(1.0));
    const sps::Vector r = data.linearization * v - data.eigenvalues(k) * v;
    CHECK(r.norm() <= 1e-12);
    Eigen::Index lead = 0;
    v.cwiseAbs().maxCoeff(&lead);
    CHECK(v(lead) > 0.0);
  }
}

TEST_CASE("first-order ratios match the hand-derived two-variable formulas") {
  // v_2 / v_1 = a21 c2 / (lambda - a22 c2) for either eigenvalue.
  for (const auto& s : {testsys::competition(), testsys::weak_pair()}) {
    const auto data = sps::analyze(s);
    const auto& c = data.equilibrium;
    for (int k = 0; k < 2; ++k) {
      const double lambda = data.eigenvalues(k);
      const double ratio = data.kernels(1, k) / data.kernels(0, k);
      CHECK(ratio == Approx(s.A(1, 0) * c(1) / (lambda - s.A(1, 1) * c(1))).epsilon(1e-10));
    }
  }
}

TEST_CASE("kernel_direction rejects non-eigenvalues") {
  const auto j = testsys::matrix({{-1, 0}, {0, -2}});
  CHECK_THROWS_AS(sps::kernel_direction(j, -1.5), sps::Error);
  const auto v = sps::kernel_direction(j, -2.0);
  CHECK(std::abs(v(1)) == Approx(1.0));
}
