#pragma once

#include <string>
#include <vector>

#include "sps/core/bounds.hpp"
#include "sps/core/oracle.hpp"
#include "sps/core/reduce.hpp"
#include "sps/core/series.hpp"

namespace sps::io {

// Shortest text with 17 significant digits, so values round-trip.
std::string format_double(double value);

// Header n1..nM,alpha_1..alpha_M, one row per stored index in degree order.
std::string coefficients_csv(const CoefficientTensor& coeffs);

// {"dim": M, "free_parameters": [...], "coefficients": [{"n": [...], "alpha": [...]}, ...]}
std::string coefficients_json(const CoefficientTensor& coeffs);

// Header t,x1..xM.
std::string trajectory_csv(const Trajectory& trajectory);

std::string certificate_json(const ConvergenceCertificate& cert);

// {"certificates": [...], "minimizer": {"index": i, "delta": d, "t0": t}}
std::string certificate_grid_json(const std::vector<ConvergenceCertificate>& grid);

std::string reduction_json(const ReducedModel& model);

}  // namespace sps::io
