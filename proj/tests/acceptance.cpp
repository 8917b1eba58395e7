// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "sps/core/bounds.hpp"
#include "sps/core/error.hpp"
#include "sps/core/fit.hpp"
#include "sps/core/logistic.hpp"
#include "sps/core/oracle.hpp"
#include "sps/core/reduce.hpp"
#include "sps/core/series.hpp"
#include "sps/core/spectral.hpp"

namespace {

using sps::Matrix;
using sps::MultiIndex;
using sps::TruncationSpec;
using sps::Vector;

// Pinned tolerances.
constexpr double kEquilibriumExactTol = 1e-12;
constexpr double kEquilibriumTol = 1e-10;
constexpr double kSpectrumExactTol = 1e-10;
constexpr double kSpectrumTol = 5e-4;
constexpr double kTableTol = 0.01;
constexpr double kMixedTol = 1e-10;
constexpr double kResidualTol = 1e-9;
constexpr double kMonomialTol = 1e-12;
constexpr double kLogisticSeriesTol = 1e-8;
constexpr double kEmbeddingTol = 1e-12;
constexpr double kCertificateK = 6.2;
constexpr double kCertificateT0Low = 1.2;
constexpr double kCertificateT0High = 1.4;
constexpr int kCertificateN2Low = 100;
constexpr int kCertificateN2High = 1000;
constexpr double kOracleTol = 1e-2;
constexpr double kFitAgreementTol = 1e-3;
constexpr double kReferenceFitTol = 0.05;
constexpr double kEquilibriumMatchTol = 1e-10;
constexpr double kSlowSpectrumTol = 1e-8;
constexpr double kDeltaTol = 0.05;
constexpr double kReferenceGammaTol = 0.07;
constexpr double kThreeSpeciesTol = 5e-2;

struct Outcome {
  bool pass = false;
  std::string details;
};

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

sps::QuadraticSystem make(Matrix a, Vector b) {
  sps::QuadraticSystem s;
  s.A = std::move(a);
  s.b = std::move(b);
  return s;
}

sps::QuadraticSystem competition() { return make(mat({{-2, -1}, {-1, -1}}), vec({4, 3})); }
sps::QuadraticSystem weak_pair() { return make(mat({{-1, -0.3}, {-0.1, -1}}), vec({2.45, 1.7})); }
sps::QuadraticSystem three_species() {
  return make(mat({{-2, -0.3, -0.1}, {-0.2, -2, -0.1}, {-0.1, -0.4, -2}}), vec({2, 2.5, 3}));
}

std::string fmt(const char* format, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

std::string vstr(const Vector& v) {
  std::string out = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += fmt("%.6g", v(i));
  }
  return out + ")";
}

// Max-norm distance between the series and the oracle over samples in [t_lo, t_hi].
double sup_error(const sps::CoefficientTensor& coeffs, const Vector& lambda, const sps::Trajectory& traj,
                 double t_lo, double t_hi) {
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t < t_lo - 1e-12 || t > t_hi + 1e-12) continue;
    worst = std::max(worst, (sps::evaluate(coeffs, lambda, t) - traj.states[i]).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

sps::FitResult tail_fit(const sps::QuadraticSystem& s, const sps::SpectralData& spectral,
                        const sps::Trajectory& traj) {
  const auto unit = sps::build_coefficients(s, spectral, sps::tail_fit_truncation(spectral.eigenvalues));
  return sps::fit_tail_limits(traj, unit, spectral.eigenvalues);
}

Outcome equilibria() {
  const Vector c4 = sps::equilibrium(competition());
  const Vector c2 = sps::equilibrium(weak_pair());
  const double e4 = (c4 - vec({1, 2})).lpNorm<Eigen::Infinity>();
  const double e2 = (c2 - vec({2, 1.5})).lpNorm<Eigen::Infinity>();
  return {e4 <= kEquilibriumExactTol && e2 <= kEquilibriumTol,
          "competition c=" + vstr(c4) + " err " + fmt("%.2g", e4) + "; weak pair c=" + vstr(c2) + " err " +
              fmt("%.2g", e2)};
}

Outcome spectra() {
  const Vector l4 = sps::analyze(competition()).eigenvalues;
  const Vector l2 = sps::analyze(weak_pair()).eigenvalues;
  const double e4 = (l4 - vec({-2 + std::sqrt(2.0), -2 - std::sqrt(2.0)})).lpNorm<Eigen::Infinity>();
  const double e2 = (l2 - vec({-1.359, -2.140})).lpNorm<Eigen::Infinity>();
  return {e4 <= kSpectrumExactTol && e2 <= kSpectrumTol,
          "competition " + vstr(l4) + " err " + fmt("%.2g", e4) + "; weak pair " + vstr(l2) + " err " +
              fmt("%.2g", e2)};
}

Outcome coefficient_table() {
  const auto s = competition();
  const auto spectral = sps::analyze(s);
  const auto coeffs = sps::build_coefficients(s, spectral, TruncationSpec::per_index(3));
  // table[n2][n1] = alpha_1^{n1,n2} at unit parameters, two decimals.
  const double table[4][4] = {{1, 1, -0.08, -0.64},
                              {1, 2, 1.28, -0.56},
                              {0.93, 2.82, 3.51, 1.33},
                              {0.85, 3.46, 6.27, 5.58}};
  double worst = 0.0;
  for (int n1 = 0; n1 <= 3; ++n1)
    for (int n2 = 0; n2 <= 3; ++n2)
      worst = std::max(worst, std::abs(coeffs.at(MultiIndex({n1, n2}))(0) - table[n2][n1]));

  // Independent 2x2 solve for n = (1, 1) by Cramer's rule.
  const Vector c = spectral.equilibrium;
  const Vector e1 = coeffs.at(MultiIndex({1, 0}));
  const Vector e2 = coeffs.at(MultiIndex({0, 1}));
  Matrix sm(2, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) sm(i, j) = e1(i) * e2(j) + e2(i) * e1(j);
  const double s1 = s.A(0, 0) * sm(0, 0) + s.A(0, 1) * sm(0, 1);
  const double s2 = s.A(1, 0) * sm(1, 0) + s.A(1, 1) * sm(1, 1);
  const double mu = spectral.eigenvalues.sum();
  const double m11 = mu - s.A(0, 0) * c(0);
  const double m12 = -s.A(0, 1) * c(0);
  const double m21 = -s.A(1, 0) * c(1);
  const double m22 = mu - s.A(1, 1) * c(1);
  const double det = m11 * m22 - m12 * m21;
  const Vector hand = vec({(s1 * m22 - m12 * s2) / det, (m11 * s2 - m21 * s1) / det});
  const Vector mixed = coeffs.at(MultiIndex({1, 1}));
  const double e_mixed = std::max((mixed - hand).lpNorm<Eigen::Infinity>(),
                                  (mixed - vec({2.0, 0.0})).lpNorm<Eigen::Infinity>());
  return {worst <= kTableTol && e_mixed <= kMixedTol,
          "max table deviation " + fmt("%.3g", worst) + "; alpha^{1,1}=" + vstr(mixed) + " err " +
              fmt("%.2g", e_mixed)};
}

Outcome residuals() {
  double worst = 0.0;
  for (const auto& s : {weak_pair(), competition()}) {
    const auto spectral = sps::analyze(s);
    for (int cap : {2, 3, 4}) {
      const auto coeffs = sps::build_coefficients(s, spectral, TruncationSpec::per_index(cap));
      worst = std::max(worst, sps::max_in_truncation_residual(sps::residual_spectrum(s, coeffs, spectral.eigenvalues)));
    }
  }
  return {worst <= kResidualTol, "max in-truncation residual " + fmt("%.3g", worst)};
}

Outcome monomials() {
  const auto s = competition();
  const auto spectral = sps::analyze(s);
  const auto t = TruncationSpec::per_index(4);
  const auto unit = sps::build_coefficients(s, spectral, t);
  const auto direct = sps::build_coefficients(s, spectral, t, vec({2.0, 3.0}));
  // Relative to the coefficient vector: entries that vanish analytically
  // carry rounding noise only.
  double worst = 0.0;
  for (const auto& n : unit.index_set().indices()) {
    const double factor = std::pow(2.0, n[0]) * std::pow(3.0, n[1]);
    const Vector expected = unit.at(n) * factor;
    const double scale = expected.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) continue;
    worst = std::max(worst, (direct.at(n) - expected).lpNorm<Eigen::Infinity>() / scale);
  }
  return {worst <= kMonomialTol, "max relative deviation " + fmt("%.3g", worst)};
}

Outcome logistic_truth() {
  const sps::logistic::Params p{1.0, 1.0, 0.75};
  const auto a = sps::logistic::series_coefficients(p, 30);
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double t = 0.01 * i;
    worst = std::max(worst, std::abs(sps::logistic::series_value(p, a, t) - sps::logistic::closed_form(p, t)));
  }
  const double t0_half = sps::logistic::t0_exact({1.0, 1.0, 0.5});

  const auto s = sps::logistic::as_system(p);
  const auto spectral = sps::analyze(s);
  const auto coeffs = sps::build_coefficients(s, spectral, TruncationSpec::per_index(30), vec({a[1]}));
  double embed = 0.0;
  for (int n = 0; n <= 30; ++n)
    embed = std::max(embed, std::abs(coeffs.at(MultiIndex({n}))(0) - a[static_cast<std::size_t>(n)]));
  return {worst <= kLogisticSeriesTol && t0_half == 0.0 && embed <= kEmbeddingTol,
          "series vs closed form " + fmt("%.3g", worst) + "; t0(x0=k/2)=" + fmt("%g", t0_half) +
              "; embedding err " + fmt("%.3g", embed)};
}

Outcome certificate() {
  auto s = weak_pair();
  const auto spectral = sps::analyze(s);
  const auto traj = sps::integrate(s, vec({3.0, 3.0}), 20.0);
  const auto fit = tail_fit(s, spectral, traj);
  const auto cert = sps::certificate(s, spectral, fit.p);
  const bool k_ok = cert.k <= kCertificateK;
  const bool t0_ok = cert.t0 >= kCertificateT0Low && cert.t0 <= kCertificateT0High;
  const bool n2_ok = cert.n2 >= kCertificateN2Low && cert.n2 <= kCertificateN2High;
  std::string d = "p=" + vstr(fit.p) + " K=" + fmt("%.6g", cert.k) + (k_ok ? "" : " (out of range)") +
                  " t0=" + fmt("%.6g", cert.t0) + (t0_ok ? "" : " (outside [1.2, 1.4])") +
                  " N2=" + std::to_string(cert.n2) + (n2_ok ? "" : " (out of range)") +
                  (cert.partial ? " partial" : "");
  return {k_ok && t0_ok && n2_ok && !cert.partial, d};
}

Outcome oracle_agreement() {
  std::string d;
  bool ok = true;
  {
    const auto s = weak_pair();
    const auto spectral = sps::analyze(s);
    const auto traj = sps::integrate(s, vec({3.0, 3.0}), 20.0);
    const auto fit = tail_fit(s, spectral, traj);
    double err[2];
    int idx = 0;
    for (int cap : {3, 5}) {
      const auto unit = sps::build_coefficients(s, spectral, TruncationSpec::per_index(cap));
      err[idx++] = sup_error(sps::scale_free_parameters(unit, fit.p), spectral.eigenvalues, traj, 1.4, 10.0);
    }
    ok = ok && err[0] <= kOracleTol && err[1] < err[0];
    d += "weak pair cap3 " + fmt("%.3g", err[0]) + " cap5 " + fmt("%.3g", err[1]);
  }
  {
    const auto s = competition();
    const auto spectral = sps::analyze(s);
    const auto unit = sps::build_coefficients(s, spectral, TruncationSpec::per_index(3));
    for (const auto& x0 : {vec({1, 1}), vec({3, 3}), vec({1, 3}), vec({3, 1})}) {
      const auto traj = sps::integrate(s, x0, 20.0);
      const auto fit = tail_fit(s, spectral, traj);
      const double e = sup_error(sps::scale_free_parameters(unit, fit.p), spectral.eigenvalues, traj, 2.5, 10.0);
      ok = ok && e <= kOracleTol;
      d += "; competition " + vstr(x0) + " " + fmt("%.3g", e);
    }
  }
  return {ok, d};
}

Outcome fit_agreement() {
  std::string d;
  bool ok = true;
  auto compare = [&](const sps::QuadraticSystem& s, const Vector& x0, const std::string& name) {
    const auto spectral = sps::analyze(s);
    const auto traj = sps::integrate(s, x0, 20.0);
    const auto tail = tail_fit(s, spectral, traj);
    const auto unit = sps::build_coefficients(s, spectral, TruncationSpec::total_degree(16));
    const std::size_t at = 2000;  // t = 2
    const auto sum = sps::fit_sum(unit, spectral.eigenvalues, traj.states[at], traj.times[at]);
    const double gap = (sum.p - tail.p).lpNorm<Eigen::Infinity>();
    ok = ok && gap <= kFitAgreementTol;
    d += (d.empty() ? "" : "; ") + name + " sum " + vstr(sum.p) + " tail " + vstr(tail.p) + " gap " +
         fmt("%.2g", gap);
    return tail.p;
  };
  const Vector p2 = compare(weak_pair(), vec({3.0, 3.0}), "weak pair");
  compare(competition(), vec({1.0, 1.0}), "competition");
  const double reference_gap = (p2 - vec({-0.45, 0.91})).lpNorm<Eigen::Infinity>();
  d += "; vs (-0.45, 0.91) gap " + fmt("%.3g", reference_gap) +
       (reference_gap <= kReferenceFitTol ? " (informational: within 0.05)" : " (informational: outside 0.05)");
  return {ok, d};
}

Outcome reduction() {
  auto a = three_species();
  auto b = three_species();
  a.x0 = vec({1, 1, 1});
  b.x0 = vec({1.5, 0.5, 2});
  const auto full = sps::analyze(a);
  const auto m = sps::reduce(a, 2);
  const auto mb = sps::reduce(b, 2);
  const double c_err = (m.c_hat - full.equilibrium.head(2)).lpNorm<Eigen::Infinity>();
  const double l_err = (m.lambda_hat - full.eigenvalues.head(2)).lpNorm<Eigen::Infinity>();
  const double d_err = (m.delta - vec({-0.14, -0.11})).lpNorm<Eigen::Infinity>();
  bool identical = true;
  for (int i = 0; i < 2; ++i) {
    identical = identical && std::memcmp(&m.delta(i), &mb.delta(i), sizeof(double)) == 0 &&
                std::memcmp(&m.gamma(i), &mb.gamma(i), sizeof(double)) == 0;
  }

  const auto traj = sps::integrate(a, *a.x0, 10.0);
  const auto corrected = sps::integrate(sps::corrected_system(a, m), a.x0->head(2), 10.0);
  const auto plain = sps::integrate(sps::partial(a, 2), a.x0->head(2), 10.0);
  double e_corr = 0.0;
  double e_plain = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    e_corr = std::max(e_corr, (corrected.states[i] - traj.states[i].head(2)).lpNorm<Eigen::Infinity>());
    e_plain = std::max(e_plain, (plain.states[i] - traj.states[i].head(2)).lpNorm<Eigen::Infinity>());
  }
  const double g_err = (m.gamma - vec({-0.01, -0.07})).lpNorm<Eigen::Infinity>();
  const bool ok = c_err <= kEquilibriumMatchTol && l_err <= kSlowSpectrumTol && d_err <= kDeltaTol && identical &&
                  e_corr < e_plain;
  return {ok, "c_hat err " + fmt("%.2g", c_err) + " lambda_hat err " + fmt("%.2g", l_err) + " delta=" +
                  vstr(m.delta) + " (gap " + fmt("%.3g", d_err) + ") gamma=" + vstr(m.gamma) +
                  (identical ? " x0-independent" : " x0-DEPENDENT") + "; trajectory err corrected " +
                  fmt("%.3g", e_corr) + " partial " + fmt("%.3g", e_plain) + "; gamma vs (-0.01, -0.07) gap " +
                  fmt("%.3g", g_err) + (g_err <= kReferenceGammaTol ? " (informational: within 0.07)" :
                                                                  " (informational: outside 0.07)")};
}

Outcome three_species_pipeline() {
  const auto s = three_species();
  const auto spectral = sps::analyze(s);
  const auto unit = sps::build_coefficients(s, spectral, TruncationSpec::per_index(3));
  double worst = 0.0;
  std::string d;
  for (const auto& x0 : {vec({1, 1, 1}), vec({1.5, 1.5, 1.5}), vec({1, 1.5, 1}), vec({1.5, 1, 1.5})}) {
    const auto fit = sps::fit_sum(unit, spectral.eigenvalues, x0, 0.0);
    const auto traj = sps::integrate(s, x0, 10.0);
    const double e = sup_error(sps::scale_free_parameters(unit, fit.p), spectral.eigenvalues, traj, 1.0, 10.0);
    worst = std::max(worst, e);
    d += (d.empty() ? "" : "; ") + vstr(x0) + " " + fmt("%.3g", e);
  }
  return {worst <= kThreeSpeciesTol, d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"equilibria", equilibria},
      {"spectra", spectra},
      {"coefficient matrix", coefficient_table},
      {"residual property", residuals},
      {"monomial structure", monomials},
      {"logistic ground truth", logistic_truth},
      {"convergence certificate", certificate},
      {"series vs oracle", oracle_agreement},
      {"fit cross-validation", fit_agreement},
      {"reduction", reduction},
      {"three-variable pipeline", three_species_pipeline},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = check();
    } catch (const sps::Error& e) {
      out = {false, std::string("error: ") + std::string(sps::error_code_name(e.code())) + ": " + e.what()};
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!out.pass) ++failures;
    std::printf("[%s] %d. %s: %s [%.2fs]\n", out.pass ? "PASS" : "FAIL", index, name, out.details.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
