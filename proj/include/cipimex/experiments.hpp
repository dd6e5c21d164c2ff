#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cipimex/integrators.hpp"
#include "cipimex/mesh.hpp"
#include "cipimex/norms.hpp"

namespace cipimex {

enum class CaseKind { disc, tube };
enum class DataKind { smooth, rough, combined };

std::string to_string(CaseKind c);
std::string to_string(DataKind d);
CaseKind parse_case(const std::string& s);
DataKind parse_data(const std::string& s);

/// exp(-30 ((x - 0.5)^2 + y^2))
double smooth_bump(double x, double y);
/// Indicator of the disc of radius 0.2 around (-0.5, 0).
double rough_bump(double x, double y);
/// Cylinder of radius 0.2 at (0.5, 0.5) plus a Gaussian centred at (0, 0.5).
double tube_initial(double x, double y);

/// A transport problem together with its geometry and error functionals.
struct ProblemCase {
  CaseKind kind = CaseKind::disc;
  DataKind data = DataKind::smooth;
  std::function<TriMesh(std::size_t nele)> make_mesh;
  bool constrained = false;
  BcMode bc_mode = BcMode::none;
  double final_time = 1.0;
  TransportProblem problem;
  ScalarFunction final_solution;   // reference for the global error
  RegionPredicate local_region;    // empty: no local error
};

/// Unit disc, beta = (y, -x), T = 2 pi, homogeneous strong boundary values.
ProblemCase rotating_disc_case(DataKind data);
/// Unit square, beta = (1, 0), T = 1, exact data imposed weakly at the inflow.
ProblemCase tube_case();

struct RateFit {
  std::vector<double> pairwise;
  double slope = 0.0;  // least squares slope of log e against log h
};

/// Throws InvalidArgument for fewer than two points or non-positive values.
RateFit fit_convergence_rate(const std::vector<std::pair<double, double>>& h_error);

struct ExperimentSpec {
  CaseKind case_kind = CaseKind::disc;
  DataKind data = DataKind::smooth;
  SchemeConfig config;
  std::vector<std::size_t> nele;
  StartMode start = StartMode::exact;
  bool timing = true;  // false writes wall_seconds = 0 so that output is reproducible
};

/// One CSV row.
struct ExperimentRow {
  std::string case_name;
  std::string scheme;
  int degree = 0;
  std::size_t nele = 0;
  double h = 0.0;
  double tau = 0.0;
  std::size_t steps = 0;
  std::size_t dofs = 0;
  double l2_global = 0.0;
  double l2_local = 0.0;  // NaN when the case has no local region
  double material_derivative = 0.0;
  double dissipation = 0.0;
  double max_l2_over_time = 0.0;
  double initial_l2 = 0.0;  // not written to CSV
  double wall_seconds = 0.0;
};

/// Runs every mesh size in order. `on_row` (if set) is called after each
/// mesh so callers can flush partial results.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          const std::function<void(const ExperimentRow&)>& on_row = {});

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const ExperimentRow& row);
void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows);
/// Throws InvalidArgument on a missing header or malformed row.
std::vector<ExperimentRow> read_csv(std::istream& in);

/// Pairwise rates of l2_global, l2_local and material_derivative for each
/// (case, scheme, degree) group, as a printable table.
std::string rate_summary(const std::vector<ExperimentRow>& rows);

}  // namespace cipimex
