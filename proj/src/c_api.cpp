#include "sps/sps.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "sps/core/bounds.hpp"
#include "sps/core/error.hpp"
#include "sps/core/fit.hpp"
#include "sps/core/io.hpp"
#include "sps/core/logistic.hpp"
#include "sps/core/model.hpp"
#include "sps/core/oracle.hpp"
#include "sps/core/reduce.hpp"
#include "sps/core/series.hpp"
#include "sps/core/spectral.hpp"

struct sps_system {
  sps::QuadraticSystem value;
};

struct sps_solution {
  sps_solution(sps::QuadraticSystem s, sps::SpectralData sp, sps::CoefficientTensor u)
      : system(std::move(s)), spectral(std::move(sp)), unit(std::move(u)), current(unit) {}

  sps::QuadraticSystem system;
  sps::SpectralData spectral;
  sps::CoefficientTensor unit;
  sps::CoefficientTensor current;
  std::vector<std::string> warnings;
};

struct sps_trajectory {
  sps::Trajectory value;
};

struct sps_reduction {
  sps::QuadraticSystem system;
  sps::ReducedModel model;
};

namespace {

thread_local std::string last_error;

sps_status fail(sps_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename Fn>
sps_status guard(Fn&& fn) {
  try {
    fn();
    last_error.clear();
    return SPS_OK;
  } catch (const sps::Error& e) {
    return fail(static_cast<sps_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(SPS_E_BUDGET, "out of memory");
  } catch (const std::exception& e) {
    return fail(SPS_E_INTERNAL, e.what());
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) {
    throw sps::Error(sps::ErrorCode::kInvalidArgument, std::string(what) + " must not be NULL");
  }
}

char* duplicate(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

void copy_out(const sps::Vector& v, double* out) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
}

sps::Vector copy_in(const double* data, int dim) {
  sps::Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = data[i];
  return v;
}

sps::TruncationSpec to_spec(sps_truncation t) {
  if (t.mode != SPS_TRUNCATION_PER_INDEX && t.mode != SPS_TRUNCATION_TOTAL_DEGREE) {
    throw sps::Error(sps::ErrorCode::kInvalidArgument, "unknown truncation mode");
  }
  return t.mode == SPS_TRUNCATION_PER_INDEX ? sps::TruncationSpec::per_index(t.value)
                                            : sps::TruncationSpec::total_degree(t.value);
}

void fill_info(const sps::FitResult& fit, sps_fit_info* info) {
  if (info == nullptr) return;
  info->residual = fit.residual;
  info->t_ref = fit.t_ref;
  info->iterations = fit.iterations;
  info->warnings = static_cast<int>(fit.warnings.size());
}

sps::logistic::Params logistic_params(double r, double k, double x0) {
  sps::logistic::Params p{r, k, x0};
  sps::logistic::check(p);
  return p;
}

}  // namespace

extern "C" {

const char* sps_status_name(sps_status status) {
  if (status == SPS_OK) return "SPS_OK";
  const auto name = sps::error_code_name(static_cast<sps::ErrorCode>(status));
  return name.data();
}

const char* sps_last_error(void) { return last_error.c_str(); }

void sps_string_free(char* text) { std::free(text); }

sps_status sps_system_parse(const char* text, sps_system** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = new sps_system{sps::parse_system(text)};
  });
}

sps_status sps_system_load(const char* path, sps_system** out) {
  return guard([&] {
    require(path, "path");
    require(out, "out");
    *out = new sps_system{sps::load_system(path)};
  });
}

sps_status sps_system_create(size_t dim, const double* a, const double* b, const double* x0,
                             sps_system** out) {
  return guard([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    if (dim == 0) throw sps::Error(sps::ErrorCode::kDimension, "dimension must be positive");
    const auto m = static_cast<Eigen::Index>(dim);
    sps::QuadraticSystem s;
    s.A.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) s.A(i, j) = a[i * m + j];
    }
    s.b = copy_in(b, static_cast<int>(m));
    if (x0 != nullptr) s.x0 = copy_in(x0, static_cast<int>(m));
    *out = new sps_system{sps::validate(std::move(s))};
  });
}

void sps_system_free(sps_system* system) { delete system; }

size_t sps_system_dim(const sps_system* system) {
  return system == nullptr ? 0 : static_cast<size_t>(system->value.dim());
}

int sps_system_has_x0(const sps_system* system) {
  return system != nullptr && system->value.x0.has_value() ? 1 : 0;
}

sps_status sps_system_x0(const sps_system* system, double* out) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    if (!system->value.x0) {
      throw sps::Error(sps::ErrorCode::kMissingInitialState, "system has no initial state");
    }
    copy_out(*system->value.x0, out);
  });
}

sps_status sps_system_truncation(const sps_system* system, sps_truncation* out, int* present) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    require(present, "present");
    *present = system->value.truncation ? 1 : 0;
    if (system->value.truncation) {
      out->mode = system->value.truncation->mode == sps::TruncationSpec::Mode::kPerIndex
                      ? SPS_TRUNCATION_PER_INDEX
                      : SPS_TRUNCATION_TOTAL_DEGREE;
      out->value = system->value.truncation->value;
    }
  });
}

sps_status sps_system_to_json(const sps_system* system, char** out) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    *out = duplicate(sps::emit_system(system->value));
  });
}

sps_status sps_solution_create(const sps_system* system, sps_truncation truncation,
                               sps_solution** out) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    const auto spec = to_spec(truncation);
    auto spectral = sps::analyze(system->value);
    auto unit = sps::build_coefficients(system->value, spectral, spec);
    *out = new sps_solution(system->value, std::move(spectral), std::move(unit));
  });
}

void sps_solution_free(sps_solution* solution) { delete solution; }

size_t sps_solution_dim(const sps_solution* solution) {
  return solution == nullptr ? 0 : static_cast<size_t>(solution->system.dim());
}

sps_status sps_solution_equilibrium(const sps_solution* solution, double* out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    copy_out(solution->spectral.equilibrium, out);
  });
}

sps_status sps_solution_eigenvalues(const sps_solution* solution, double* out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    copy_out(solution->spectral.eigenvalues, out);
  });
}

size_t sps_solution_coefficient_count(const sps_solution* solution) {
  return solution == nullptr ? 0 : solution->unit.index_set().size();
}

sps_status sps_solution_coefficient(const sps_solution* solution, const int* n, double* out) {
  return guard([&] {
    require(solution, "solution");
    require(n, "n");
    require(out, "out");
    const int dim = solution->system.dim();
    copy_out(solution->current.at(sps::MultiIndex(std::vector<int>(n, n + dim))), out);
  });
}

sps_status sps_solution_set_parameters(sps_solution* solution, const double* p) {
  return guard([&] {
    require(solution, "solution");
    require(p, "p");
    const sps::Vector v = copy_in(p, solution->system.dim());
    if (!v.allFinite()) throw sps::Error(sps::ErrorCode::kNonFinite, "free parameters are not finite");
    solution->current = sps::scale_free_parameters(solution->unit, v);
  });
}

sps_status sps_solution_parameters(const sps_solution* solution, double* out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    copy_out(solution->current.free_parameters(), out);
  });
}

sps_status sps_solution_fit_sum(sps_solution* solution, const double* x_ref, double t_ref,
                                double certified_t0, sps_fit_info* info) {
  return guard([&] {
    require(solution, "solution");
    require(x_ref, "x_ref");
    sps::FitOptions options;
    if (!std::isnan(certified_t0)) options.certified_t0 = certified_t0;
    const auto fit = sps::fit_sum(solution->unit, solution->spectral.eigenvalues,
                                  copy_in(x_ref, solution->system.dim()), t_ref, options);
    solution->current = sps::scale_free_parameters(solution->unit, fit.p);
    solution->warnings = fit.warnings;
    fill_info(fit, info);
  });
}

sps_status sps_solution_fit_tail(sps_solution* solution, const sps_trajectory* trajectory,
                                 sps_fit_info* info) {
  return guard([&] {
    require(solution, "solution");
    require(trajectory, "trajectory");
    const auto& lambda = solution->spectral.eigenvalues;
    const auto tail = sps::build_coefficients(solution->system, solution->spectral,
                                              sps::tail_fit_truncation(lambda));
    const auto fit = sps::fit_tail_limits(trajectory->value, tail, lambda);
    solution->current = sps::scale_free_parameters(solution->unit, fit.p);
    solution->warnings = fit.warnings;
    fill_info(fit, info);
  });
}

const char* sps_solution_fit_warning(const sps_solution* solution, size_t index) {
  if (solution == nullptr || index >= solution->warnings.size()) return nullptr;
  return solution->warnings[index].c_str();
}

sps_status sps_solution_evaluate(const sps_solution* solution, double t, double* out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    copy_out(sps::evaluate(solution->current, solution->spectral.eigenvalues, t), out);
  });
}

sps_status sps_solution_coefficients_csv(const sps_solution* solution, char** out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    *out = duplicate(sps::io::coefficients_csv(solution->current));
  });
}

sps_status sps_solution_coefficients_json(const sps_solution* solution, char** out) {
  return guard([&] {
    require(solution, "solution");
    require(out, "out");
    *out = duplicate(sps::io::coefficients_json(solution->current));
  });
}

sps_status sps_certificate_compute(const sps_system* system, const double* p, double delta,
                                   double work_budget, sps_certificate* out) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    const int dim = system->value.dim();
    const sps::Vector params = p == nullptr ? sps::Vector::Ones(dim) : copy_in(p, dim);
    sps::CertificateOptions options;
    options.delta = delta;
    if (work_budget > 0.0) options.build.work_budget = work_budget;
    const auto spectral = sps::analyze(system->value);
    const auto cert = sps::certificate(system->value, spectral, params, options);
    *out = sps_certificate{cert.n0,
                           cert.n1,
                           cert.n2,
                           cert.k,
                           cert.k_unit,
                           cert.t0,
                           cert.t0_unclamped,
                           cert.delta,
                           cert.opnorm_a,
                           cert.opnorm_j,
                           cert.opnorm_inverse_bound,
                           cert.partial ? 1 : 0,
                           cert.degree_reached};
  });
}

sps_status sps_certificate_grid_json(const sps_system* system, const double* p,
                                     const double* deltas, size_t count, double work_budget,
                                     char** out) {
  return guard([&] {
    require(system, "system");
    require(deltas, "deltas");
    require(out, "out");
    const int dim = system->value.dim();
    const sps::Vector params = p == nullptr ? sps::Vector::Ones(dim) : copy_in(p, dim);
    const auto spectral = sps::analyze(system->value);
    sps::BuildOptions build{sps::kDefaultEntryBudget, sps::kDefaultWorkBudget, true};
    if (work_budget > 0.0) build.work_budget = work_budget;
    const auto grid = sps::certificate_grid(system->value, spectral, params,
                                            std::vector<double>(deltas, deltas + count), build);
    *out = duplicate(sps::io::certificate_grid_json(grid));
  });
}

sps_status sps_compute_n0(double opnorm_j, double lambda1, double delta, int* out) {
  return guard([&] {
    require(out, "out");
    *out = sps::compute_n0(opnorm_j, lambda1, delta);
  });
}

sps_status sps_compute_n1(double opnorm_a, double lambda1, int dim, double delta, int* out) {
  return guard([&] {
    require(out, "out");
    *out = sps::compute_n1(opnorm_a, lambda1, dim, delta);
  });
}

sps_status sps_integrate(const sps_system* system, const double* x0, double t_end, double step,
                         sps_trajectory** out) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    sps::Vector start;
    if (x0 != nullptr) {
      start = copy_in(x0, system->value.dim());
    } else if (system->value.x0) {
      start = *system->value.x0;
    } else {
      throw sps::Error(sps::ErrorCode::kMissingInitialState, "no initial state given");
    }
    sps::IntegrateOptions options;
    options.step = step;
    *out = new sps_trajectory{sps::integrate(system->value, start, t_end, options)};
  });
}

void sps_trajectory_free(sps_trajectory* trajectory) { delete trajectory; }

size_t sps_trajectory_length(const sps_trajectory* trajectory) {
  return trajectory == nullptr ? 0 : trajectory->value.times.size();
}

size_t sps_trajectory_dim(const sps_trajectory* trajectory) {
  if (trajectory == nullptr || trajectory->value.states.empty()) return 0;
  return static_cast<size_t>(trajectory->value.states.front().size());
}

double sps_trajectory_step(const sps_trajectory* trajectory) {
  return trajectory == nullptr ? 0.0 : trajectory->value.step;
}

double sps_trajectory_est_error(const sps_trajectory* trajectory) {
  return trajectory == nullptr ? 0.0 : trajectory->value.est_error;
}

sps_status sps_trajectory_sample(const sps_trajectory* trajectory, size_t index, double* t,
                                 double* x) {
  return guard([&] {
    require(trajectory, "trajectory");
    if (index >= trajectory->value.times.size()) {
      throw sps::Error(sps::ErrorCode::kInvalidArgument, "sample index out of range");
    }
    if (t != nullptr) *t = trajectory->value.times[index];
    if (x != nullptr) copy_out(trajectory->value.states[index], x);
  });
}

sps_status sps_trajectory_csv(const sps_trajectory* trajectory, char** out) {
  return guard([&] {
    require(trajectory, "trajectory");
    require(out, "out");
    *out = duplicate(sps::io::trajectory_csv(trajectory->value));
  });
}

sps_status sps_reduce(const sps_system* system, int keep, sps_reduction** out) {
  return guard([&] {
    require(system, "system");
    require(out, "out");
    *out = new sps_reduction{system->value, sps::reduce(system->value, keep)};
  });
}

void sps_reduction_free(sps_reduction* reduction) { delete reduction; }

int sps_reduction_keep(const sps_reduction* reduction) {
  return reduction == nullptr ? 0 : reduction->model.keep;
}

sps_status sps_reduction_vector(const sps_reduction* reduction, sps_reduction_field field,
                                double* out) {
  return guard([&] {
    require(reduction, "reduction");
    require(out, "out");
    const auto& m = reduction->model;
    switch (field) {
      case SPS_REDUCTION_DELTA: copy_out(m.delta, out); break;
      case SPS_REDUCTION_GAMMA: copy_out(m.gamma, out); break;
      case SPS_REDUCTION_GAMMA_STAR: copy_out(m.gamma_star, out); break;
      case SPS_REDUCTION_C_HAT: copy_out(m.c_hat, out); break;
      case SPS_REDUCTION_LAMBDA_HAT: copy_out(m.lambda_hat, out); break;
      case SPS_REDUCTION_C_FULL: copy_out(m.c_full, out); break;
      case SPS_REDUCTION_LAMBDA_FULL: copy_out(m.lambda_full, out); break;
      default: throw sps::Error(sps::ErrorCode::kInvalidArgument, "unknown reduction field");
    }
  });
}

sps_status sps_reduction_json(const sps_reduction* reduction, char** out) {
  return guard([&] {
    require(reduction, "reduction");
    require(out, "out");
    *out = duplicate(sps::io::reduction_json(reduction->model));
  });
}

sps_status sps_reduction_corrected_system(const sps_reduction* reduction, sps_system** out) {
  return guard([&] {
    require(reduction, "reduction");
    require(out, "out");
    *out = new sps_system{sps::validate(sps::corrected_system(reduction->system, reduction->model))};
  });
}

sps_status sps_reduction_partial_system(const sps_reduction* reduction, sps_system** out) {
  return guard([&] {
    require(reduction, "reduction");
    require(out, "out");
    *out = new sps_system{sps::partial(reduction->system, reduction->model.keep)};
  });
}

sps_status sps_logistic_closed_form(double r, double k, double x0, double t, double* out) {
  return guard([&] {
    require(out, "out");
    *out = sps::logistic::closed_form(logistic_params(r, k, x0), t);
  });
}

sps_status sps_logistic_coefficients(double r, double k, double x0, int degree, double* out) {
  return guard([&] {
    require(out, "out");
    const auto coeffs = sps::logistic::series_coefficients(logistic_params(r, k, x0), degree);
    std::copy(coeffs.begin(), coeffs.end(), out);
  });
}

sps_status sps_logistic_t0(double r, double k, double x0, int clamped, double* out) {
  return guard([&] {
    require(out, "out");
    const auto p = logistic_params(r, k, x0);
    *out = clamped ? sps::logistic::t0_exact(p) : sps::logistic::t0_unclamped(p);
  });
}

}  // extern "C"
