// sps: command-line front end over the C API.
//
//   sps solve   system.json [--t-end T] [--step h] [--truncation d | --total-degree N] [--fit sum|tail]
//   sps compare system.json ...           series next to RK4, with error column and footer
//   sps coeffs  system.json ...           coefficient table
//   sps bounds  system.json ...           convergence certificate over a delta grid
//   sps reduce  system.json --keep L      corrected reduced model
//   sps logistic --r R --k K --x0 X0      closed form vs series for the logistic equation
//
// Failures print "error: SPS_E_<NAME>: <message>" on stderr and exit with the
// numeric status; bad usage exits with 64.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sps/sps.h"

namespace {

constexpr int kUsageExit = 64;

struct Failure {
  sps_status status;
  std::string message;
};

struct UsageError {
  std::string message;
};

void check(sps_status status) {
  if (status != SPS_OK) throw Failure{status, sps_last_error()};
}

struct Deleter {
  void operator()(sps_system* p) const { sps_system_free(p); }
  void operator()(sps_solution* p) const { sps_solution_free(p); }
  void operator()(sps_trajectory* p) const { sps_trajectory_free(p); }
  void operator()(sps_reduction* p) const { sps_reduction_free(p); }
};
template <typename T>
using Handle = std::unique_ptr<T, Deleter>;

std::string take(char* text) {
  std::string out(text);
  sps_string_free(text);
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Config {
  std::string input;
  double t_end = 10.0;
  double step = 1e-3;
  std::optional<int> truncation;
  std::optional<int> total_degree;
  std::optional<int> keep;
  // Convolution terms for the certificate tensor; 0 means the library default.
  double work_budget = 0.0;
  // compare only uses t0 to pick the sup_error window, so a quick partial build will do.
  double compare_budget = 2e8;
  std::string fit = "sum";
  bool fit_given = false;
  std::string format;
  std::string out;
  double r = 0.0;
  double k = 0.0;
  double x0 = 0.0;
};

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw Failure{SPS_E_IO, "cannot open " + cfg.out + " for writing"};
  file << text;
  if (!file) throw Failure{SPS_E_IO, "failed writing " + cfg.out};
}

std::string format_or(const Config& cfg, const char* fallback) {
  return cfg.format.empty() ? fallback : cfg.format;
}

Handle<sps_system> load(const Config& cfg) {
  sps_system* raw = nullptr;
  check(sps_system_load(cfg.input.c_str(), &raw));
  return Handle<sps_system>(raw);
}

sps_truncation resolve_truncation(const Config& cfg, const sps_system* system) {
  if (cfg.truncation) return {SPS_TRUNCATION_PER_INDEX, *cfg.truncation};
  if (cfg.total_degree) return {SPS_TRUNCATION_TOTAL_DEGREE, *cfg.total_degree};
  sps_truncation from_file{SPS_TRUNCATION_PER_INDEX, 3};
  int present = 0;
  check(sps_system_truncation(system, &from_file, &present));
  return present ? from_file : sps_truncation{SPS_TRUNCATION_PER_INDEX, 3};
}

std::vector<double> initial_state(const sps_system* system) {
  std::vector<double> x0(sps_system_dim(system));
  check(sps_system_x0(system, x0.data()));
  return x0;
}

Handle<sps_solution> make_solution(const Config& cfg, const sps_system* system) {
  sps_solution* raw = nullptr;
  check(sps_solution_create(system, resolve_truncation(cfg, system), &raw));
  return Handle<sps_solution>(raw);
}

Handle<sps_trajectory> run_oracle(const Config& cfg, const sps_system* system) {
  sps_trajectory* raw = nullptr;
  check(sps_integrate(system, nullptr, cfg.t_end, cfg.step, &raw));
  return Handle<sps_trajectory>(raw);
}

void report_warnings(const sps_solution* solution) {
  for (size_t i = 0;; ++i) {
    const char* w = sps_solution_fit_warning(solution, i);
    if (w == nullptr) break;
    std::cerr << "warning: " << w << '\n';
  }
}

// Fits the free parameters from x0: sum constraint at t = 0, or tail limits
// of an oracle run. Returns the oracle trajectory when one was computed.
Handle<sps_trajectory> fit(const Config& cfg, const sps_system* system, sps_solution* solution) {
  if (cfg.fit == "tail") {
    auto trajectory = run_oracle(cfg, system);
    check(sps_solution_fit_tail(solution, trajectory.get(), nullptr));
    return trajectory;
  }
  const auto x0 = initial_state(system);
  check(sps_solution_fit_sum(solution, x0.data(), 0.0, NAN, nullptr));
  report_warnings(solution);
  return nullptr;
}

std::vector<double> time_grid(const Config& cfg) {
  const long steps = std::max(0L, static_cast<long>(std::ceil(cfg.t_end / cfg.step - 1e-9)));
  const double h = steps > 0 ? cfg.t_end / static_cast<double>(steps) : cfg.step;
  std::vector<double> t;
  for (long i = 0; i <= steps; ++i) t.push_back(h * static_cast<double>(i));
  if (steps > 0) t.back() = cfg.t_end;
  return t;
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string table_csv(const Table& table, const std::string& footer) {
  std::ostringstream out;
  for (size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
  out << '\n';
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << fmt(row[i]);
    out << '\n';
  }
  out << footer;
  return out.str();
}

nlohmann::ordered_json finite_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::ordered_json table_json(const Table& table) {
  nlohmann::ordered_json out;
  out["columns"] = table.columns;
  out["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    auto r = nlohmann::ordered_json::array();
    for (double v : row) r.push_back(finite_or_null(v));
    out["rows"].push_back(r);
  }
  return out;
}

std::vector<double> parameters(const sps_solution* solution) {
  std::vector<double> p(sps_solution_dim(solution));
  check(sps_solution_parameters(solution, p.data()));
  return p;
}

void require_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError{"--format must be csv or json"};
}

int cmd_solve(const Config& cfg) {
  auto system = load(cfg);
  const size_t dim = sps_system_dim(system.get());
  auto solution = make_solution(cfg, system.get());
  fit(cfg, system.get(), solution.get());

  Table table;
  table.columns.push_back("t");
  for (size_t i = 0; i < dim; ++i) table.columns.push_back("x" + std::to_string(i + 1) + "_sps");
  std::vector<double> x(dim);
  for (double t : time_grid(cfg)) {
    check(sps_solution_evaluate(solution.get(), t, x.data()));
    std::vector<double> row{t};
    row.insert(row.end(), x.begin(), x.end());
    table.rows.push_back(std::move(row));
  }
  const auto format = format_or(cfg, "csv");
  require_format(format);
  if (format == "csv") {
    emit(cfg, table_csv(table, ""));
  } else {
    auto doc = table_json(table);
    doc["parameters"] = parameters(solution.get());
    emit(cfg, doc.dump(2) + "\n");
  }
  return 0;
}

int cmd_compare(const Config& cfg) {
  auto system = load(cfg);
  const size_t dim = sps_system_dim(system.get());
  auto solution = make_solution(cfg, system.get());
  initial_state(system.get());
  auto trajectory = fit(cfg, system.get(), solution.get());
  if (!trajectory) trajectory = run_oracle(cfg, system.get());

  const auto p = parameters(solution.get());
  sps_certificate cert{};
  check(sps_certificate_compute(system.get(), p.data(), 0.5, cfg.compare_budget, &cert));
  if (cfg.fit != "tail" && cert.t0 > 0.0) {
    std::cerr << "warning: free parameters fitted at t = 0, below the certified t0 = " << cert.t0
              << '\n';
  }

  Table table;
  table.columns.push_back("t");
  for (size_t i = 0; i < dim; ++i) table.columns.push_back("x" + std::to_string(i + 1) + "_sps");
  for (size_t i = 0; i < dim; ++i) table.columns.push_back("x" + std::to_string(i + 1) + "_ode");
  table.columns.push_back("error");
  std::vector<double> series(dim);
  std::vector<double> ode(dim);
  double sup_error = 0.0;
  for (size_t s = 0; s < sps_trajectory_length(trajectory.get()); ++s) {
    double t = 0.0;
    check(sps_trajectory_sample(trajectory.get(), s, &t, ode.data()));
    check(sps_solution_evaluate(solution.get(), t, series.data()));
    double err = 0.0;
    for (size_t i = 0; i < dim; ++i) err = std::max(err, std::abs(series[i] - ode[i]));
    if (t >= cert.t0) sup_error = std::max(sup_error, err);
    std::vector<double> row{t};
    row.insert(row.end(), series.begin(), series.end());
    row.insert(row.end(), ode.begin(), ode.end());
    row.push_back(err);
    table.rows.push_back(std::move(row));
  }
  const auto format = format_or(cfg, "csv");
  require_format(format);
  if (format == "csv") {
    emit(cfg, table_csv(table, "# t0=" + fmt(cert.t0) + " sup_error=" + fmt(sup_error) + "\n"));
  } else {
    auto doc = table_json(table);
    doc["fit"] = cfg.fit == "tail" ? "tail-limit" : "sum-constraint";
    doc["parameters"] = p;
    doc["t0"] = cert.t0;
    doc["certificate_partial"] = cert.partial != 0;
    doc["sup_error"] = sup_error;
    emit(cfg, doc.dump(2) + "\n");
  }
  return 0;
}

int cmd_coeffs(const Config& cfg) {
  auto system = load(cfg);
  auto solution = make_solution(cfg, system.get());
  if (cfg.fit_given) fit(cfg, system.get(), solution.get());
  const auto format = format_or(cfg, "csv");
  require_format(format);
  char* text = nullptr;
  if (format == "csv") {
    check(sps_solution_coefficients_csv(solution.get(), &text));
  } else {
    check(sps_solution_coefficients_json(solution.get(), &text));
  }
  emit(cfg, take(text));
  return 0;
}

int cmd_bounds(const Config& cfg) {
  auto system = load(cfg);
  const size_t dim = sps_system_dim(system.get());
  std::vector<double> p(dim, 1.0);
  if (sps_system_has_x0(system.get())) {
    auto solution = make_solution(cfg, system.get());
    fit(cfg, system.get(), solution.get());
    p = parameters(solution.get());
  }
  const double deltas[] = {0.3, 0.5, 0.7, 0.9};
  char* text = nullptr;
  check(sps_certificate_grid_json(system.get(), p.data(), deltas, 4, cfg.work_budget, &text));
  const std::string json = take(text);
  const auto format = format_or(cfg, "json");
  require_format(format);
  if (format == "json") {
    emit(cfg, json);
    return 0;
  }
  const auto doc = nlohmann::json::parse(json);
  std::ostringstream out;
  out << "delta,N0,N1,N2,K,K_unit,t0,partial,degree_reached\n";
  for (const auto& c : doc["certificates"]) {
    auto num = [](const nlohmann::json& v) { return v.is_null() ? std::string("nan") : fmt(v.get<double>()); };
    out << fmt(c["delta"].get<double>()) << ',' << c["N0"].get<int>() << ',' << c["N1"].get<int>()
        << ',' << c["N2"].get<int>() << ',' << num(c["K"]) << ',' << num(c["K_unit"]) << ','
        << num(c["t0"]) << ',' << (c["partial"].get<bool>() ? 1 : 0) << ','
        << c["degree_reached"].get<int>() << '\n';
  }
  const auto& best = doc["minimizer"];
  out << "# minimizer delta=" << fmt(best["delta"].get<double>()) << '\n';
  emit(cfg, out.str());
  return 0;
}

int cmd_reduce(const Config& cfg) {
  if (!cfg.keep) throw UsageError{"reduce needs --keep"};
  auto system = load(cfg);
  sps_reduction* raw = nullptr;
  check(sps_reduce(system.get(), *cfg.keep, &raw));
  Handle<sps_reduction> reduction(raw);
  char* text = nullptr;
  check(sps_reduction_json(reduction.get(), &text));
  const std::string json = take(text);
  const auto format = format_or(cfg, "json");
  require_format(format);
  if (format == "json") {
    emit(cfg, json);
    return 0;
  }
  const auto doc = nlohmann::ordered_json::parse(json);
  std::ostringstream out;
  out << "quantity,values\n";
  for (const auto& [key, value] : doc.items()) {
    out << key;
    if (value.is_array()) {
      for (const auto& v : value) out << ',' << fmt(v.get<double>());
    } else {
      out << ',' << value.get<int>();
    }
    out << '\n';
  }
  emit(cfg, out.str());
  return 0;
}

int cmd_logistic(const Config& cfg) {
  const int degree = cfg.total_degree.value_or(cfg.truncation.value_or(30));
  std::vector<double> alpha(static_cast<size_t>(std::max(degree, 0)) + 1);
  check(sps_logistic_coefficients(cfg.r, cfg.k, cfg.x0, degree, alpha.data()));
  double t0 = 0.0;
  double t0_raw = 0.0;
  check(sps_logistic_t0(cfg.r, cfg.k, cfg.x0, 1, &t0));
  check(sps_logistic_t0(cfg.r, cfg.k, cfg.x0, 0, &t0_raw));
  const auto format = format_or(cfg, "csv");
  require_format(format);
  if (format == "json") {
    nlohmann::ordered_json doc;
    doc["r"] = cfg.r;
    doc["k"] = cfg.k;
    doc["x0"] = cfg.x0;
    doc["alpha"] = alpha;
    doc["t0"] = t0;
    doc["t0_unclamped"] = finite_or_null(t0_raw);
    emit(cfg, doc.dump(2) + "\n");
    return 0;
  }
  Table table;
  table.columns = {"t", "closed_form", "series", "error"};
  for (double t : time_grid(cfg)) {
    double exact = 0.0;
    check(sps_logistic_closed_form(cfg.r, cfg.k, cfg.x0, t, &exact));
    double series = 0.0;
    for (size_t n = 0; n < alpha.size(); ++n) {
      series += alpha[n] * std::exp(-cfg.r * static_cast<double>(n) * t);
    }
    table.rows.push_back({t, exact, series, std::abs(series - exact)});
  }
  emit(cfg, table_csv(table, "# t0=" + fmt(t0) + " t0_unclamped=" + fmt(t0_raw) + "\n"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral power series solutions of dx/dt = diag(x)(b + A x)"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub, bool with_input) {
    if (with_input) sub->add_option("input", cfg.input, "System definition (JSON)")->required();
    sub->add_option("--t-end", cfg.t_end, "End time")->check(CLI::PositiveNumber);
    sub->add_option("--step", cfg.step, "Time step")->check(CLI::PositiveNumber);
    auto* trunc = sub->add_option("--truncation", cfg.truncation, "Per-index cap d")
                      ->check(CLI::NonNegativeNumber);
    auto* total = sub->add_option("--total-degree", cfg.total_degree, "Total-degree cap N")
                      ->check(CLI::NonNegativeNumber);
    trunc->excludes(total);
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "Output file (default stdout)");
  };
  auto add_fit = [&](CLI::App* sub) {
    sub->add_option("--fit", cfg.fit, "Free-parameter fit: sum or tail")
        ->check(CLI::IsMember({"sum", "tail"}));
  };

  auto* solve = app.add_subcommand("solve", "Series solution on a time grid");
  add_common(solve, true);
  add_fit(solve);
  auto* compare = app.add_subcommand("compare", "Series solution next to the RK4 oracle");
  add_common(compare, true);
  add_fit(compare);
  compare->add_option("--work-budget", cfg.compare_budget, "Convolution terms for the t0 certificate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* coeffs = app.add_subcommand("coeffs", "Coefficient table");
  add_common(coeffs, true);
  add_fit(coeffs);
  auto* bounds = app.add_subcommand("bounds", "Convergence certificate");
  add_common(bounds, true);
  add_fit(bounds);
  bounds->add_option("--work-budget", cfg.work_budget, "Convolution terms for the certificate tensor (default 4e10)")
      ->check(CLI::PositiveNumber);
  auto* reduce = app.add_subcommand("reduce", "Corrected reduced model");
  add_common(reduce, true);
  reduce->add_option("--keep", cfg.keep, "Number of leading variables to keep")
      ->check(CLI::PositiveNumber);
  auto* logistic = app.add_subcommand("logistic", "Logistic equation: closed form vs series");
  add_common(logistic, false);
  logistic->add_option("--r", cfg.r, "Growth rate")->required();
  logistic->add_option("--k", cfg.k, "Carrying capacity")->required();
  logistic->add_option("--x0", cfg.x0, "Initial value")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }
  for (auto* sub : {solve, compare, coeffs, bounds}) {
    if (sub->parsed()) cfg.fit_given = sub->count("--fit") > 0;
  }

  try {
    if (solve->parsed()) return cmd_solve(cfg);
    if (compare->parsed()) return cmd_compare(cfg);
    if (coeffs->parsed()) return cmd_coeffs(cfg);
    if (bounds->parsed()) return cmd_bounds(cfg);
    if (reduce->parsed()) return cmd_reduce(cfg);
    if (logistic->parsed()) return cmd_logistic(cfg);
  } catch (const Failure& f) {
    std::cerr << "error: " << sps_status_name(f.status) << ": " << f.message << '\n';
    return static_cast<int>(f.status);
  } catch (const UsageError& u) {
    std::cerr << "error: " << u.message << '\n';
    return kUsageExit;
  }
  return kUsageExit;
}
