#include "sps/core/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace sps::io {
namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

ordered_json certificate_object(const ConvergenceCertificate& cert) {
  ordered_json out;
  out["N0"] = cert.n0;
  out["N1"] = cert.n1;
  out["N2"] = cert.n2;
  out["K"] = number(cert.k);
  out["K_unit"] = number(cert.k_unit);
  out["t0"] = number(cert.t0);
  out["t0_unclamped"] = number(cert.t0_unclamped);
  out["delta"] = cert.delta;
  out["opnorm_A"] = number(cert.opnorm_a);
  out["opnorm_J"] = number(cert.opnorm_j);
  out["opnorm_inverse_bound"] = number(cert.opnorm_inverse_bound);
  out["partial"] = cert.partial;
  out["degree_reached"] = cert.degree_reached;
  out["free_parameters"] = vector_json(cert.free_parameters);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string coefficients_csv(const CoefficientTensor& coeffs) {
  std::ostringstream out;
  const int dim = coeffs.dim();
  for (int i = 0; i < dim; ++i) out << (i ? "," : "") << 'n' << i + 1;
  for (int i = 0; i < dim; ++i) out << ",alpha_" << i + 1;
  out << '\n';
  const IndexSet& set = coeffs.index_set();
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const std::size_t key = set.keys()[pos];
    if (!coeffs.filled(key)) continue;
    const MultiIndex& n = set.indices()[pos];
    for (int i = 0; i < dim; ++i) out << (i ? "," : "") << n[i];
    for (int i = 0; i < dim; ++i) out << ',' << format_double(coeffs.value(i, key));
    out << '\n';
  }
  return out.str();
}

std::string coefficients_json(const CoefficientTensor& coeffs) {
  ordered_json out;
  out["dim"] = coeffs.dim();
  out["free_parameters"] = vector_json(coeffs.free_parameters());
  out["coefficients"] = ordered_json::array();
  const IndexSet& set = coeffs.index_set();
  for (std::size_t pos = 0; pos < set.size(); ++pos) {
    const std::size_t key = set.keys()[pos];
    if (!coeffs.filled(key)) continue;
    ordered_json alpha = ordered_json::array();
    for (int i = 0; i < coeffs.dim(); ++i) alpha.push_back(number(coeffs.value(i, key)));
    out["coefficients"].push_back({{"n", set.indices()[pos].components()}, {"alpha", alpha}});
  }
  return out.dump(2) + "\n";
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream out;
  out << 't';
  const auto dim = trajectory.states.empty() ? 0 : trajectory.states.front().size();
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i + 1;
  out << '\n';
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    out << format_double(trajectory.times[s]);
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << format_double(trajectory.states[s](i));
    out << '\n';
  }
  return out.str();
}

std::string certificate_json(const ConvergenceCertificate& cert) {
  return certificate_object(cert).dump(2) + "\n";
}

std::string certificate_grid_json(const std::vector<ConvergenceCertificate>& grid) {
  ordered_json out;
  out["certificates"] = ordered_json::array();
  for (const auto& cert : grid) out["certificates"].push_back(certificate_object(cert));
  if (!grid.empty()) {
    const std::size_t best = grid_minimizer(grid);
    out["minimizer"] = {{"index", best}, {"delta", grid[best].delta}, {"t0", number(grid[best].t0)}};
  }
  return out.dump(2) + "\n";
}

std::string reduction_json(const ReducedModel& model) {
  ordered_json out;
  out["L"] = model.keep;
  out["delta"] = vector_json(model.delta);
  out["gamma"] = vector_json(model.gamma);
  out["gamma_star"] = vector_json(model.gamma_star);
  out["c_hat"] = vector_json(model.c_hat);
  out["lambda_hat"] = vector_json(model.lambda_hat);
  out["c"] = vector_json(model.c_full);
  out["lambda"] = vector_json(model.lambda_full);
  return out.dump(2) + "\n";
}

}  // namespace sps::io
