#include "cipimex/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "cipimex/errors.hpp"

namespace cipimex {

std::string to_string(CaseKind c) { return c == CaseKind::disc ? "disc" : "tube"; }

std::string to_string(DataKind d) {
  switch (d) {
    case DataKind::smooth: return "smooth";
    case DataKind::rough: return "rough";
    case DataKind::combined: return "combined";
  }
  return "?";
}

CaseKind parse_case(const std::string& s) {
  if (s == "disc") return CaseKind::disc;
  if (s == "tube") return CaseKind::tube;
  throw InvalidArgument("unknown case '" + s + "'");
}

DataKind parse_data(const std::string& s) {
  if (s == "smooth") return DataKind::smooth;
  if (s == "rough") return DataKind::rough;
  if (s == "combined") return DataKind::combined;
  throw InvalidArgument("unknown data '" + s + "'");
}

double smooth_bump(double x, double y) { return std::exp(-30.0 * ((x - 0.5) * (x - 0.5) + y * y)); }

double rough_bump(double x, double y) { return std::hypot(x + 0.5, y) < 0.2 ? 1.0 : 0.0; }

double tube_initial(double x, double y) {
  const double cylinder = std::hypot(x - 0.5, y - 0.5) < 0.2 ? 1.0 : 0.0;
  return cylinder + std::exp(-30.0 * (x * x + (y - 0.5) * (y - 0.5)));
}

ProblemCase rotating_disc_case(DataKind data) {
  ProblemCase c;
  c.kind = CaseKind::disc;
  c.data = data;
  c.make_mesh = [](std::size_t nele) { return generate_disc_mesh(nele); };
  c.constrained = true;
  c.bc_mode = BcMode::strong;
  c.final_time = 2.0 * std::numbers::pi;

  ScalarFunction u0;
  switch (data) {
    case DataKind::smooth: u0 = smooth_bump; break;
    case DataKind::rough: u0 = rough_bump; break;
    case DataKind::combined: u0 = [](double x, double y) { return smooth_bump(x, y) + rough_bump(x, y); }; break;
  }
  c.problem.beta = rotation_velocity();
  // beta = (y, -x) turns points clockwise; trace characteristics back
  c.problem.solution = [u0](double x, double y, double t) {
    const double ct = std::cos(t), st = std::sin(t);
    return u0(x * ct - y * st, x * st + y * ct);
  };
  c.final_solution = u0;
  if (data == DataKind::combined) c.local_region = [](double x, double) { return x > 0.0; };
  return c;
}

ProblemCase tube_case() {
  ProblemCase c;
  c.kind = CaseKind::tube;
  c.data = DataKind::combined;
  c.make_mesh = [](std::size_t nele) { return generate_square_mesh(nele); };
  c.constrained = false;
  c.bc_mode = BcMode::weak_inflow;
  c.final_time = 1.0;
  c.problem.beta = constant_velocity({1.0, 0.0});
  c.problem.solution = [](double x, double y, double t) { return tube_initial(x - t, y); };
  c.problem.boundary = c.problem.solution;
  c.final_solution = [](double x, double y) { return tube_initial(x - 1.0, y); };
  return c;
}

RateFit fit_convergence_rate(const std::vector<std::pair<double, double>>& h_error) {
  if (h_error.size() < 2) throw InvalidArgument("fit_convergence_rate: needs at least two points");
  for (const auto& [h, e] : h_error) {
    if (!(h > 0.0) || !(e > 0.0)) throw InvalidArgument("fit_convergence_rate: h and error must be positive");
  }
  RateFit fit;
  for (std::size_t i = 0; i + 1 < h_error.size(); ++i) {
    const auto [h0, e0] = h_error[i];
    const auto [h1, e1] = h_error[i + 1];
    fit.pairwise.push_back(std::log(e0 / e1) / std::log(h0 / h1));
  }
  double sx = 0.0, sy = 0.0;
  for (const auto& [h, e] : h_error) {
    sx += std::log(h);
    sy += std::log(e);
  }
  const double n = static_cast<double>(h_error.size());
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [h, e] : h_error) {
    sxx += (std::log(h) - mx) * (std::log(h) - mx);
    sxy += (std::log(h) - mx) * (std::log(e) - my);
  }
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return fit;
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec,
                                          const std::function<void(const ExperimentRow&)>& on_row) {
  for (std::size_t i = 0; i < spec.nele.size(); ++i) {
    if (spec.nele[i] < 8) throw InvalidArgument("run_experiment: nele must be >= 8");
    if (i > 0 && spec.nele[i] <= spec.nele[i - 1]) throw InvalidArgument("run_experiment: nele must increase");
  }
  const ProblemCase pc = spec.case_kind == CaseKind::disc ? rotating_disc_case(spec.data) : tube_case();
  SchemeConfig config = spec.config;
  config.final_time = pc.final_time;
  config.bc_mode = pc.bc_mode;
  config.validate();

  std::vector<ExperimentRow> rows;
  for (std::size_t nele : spec.nele) {
    const auto start = std::chrono::steady_clock::now();
    auto mesh = std::make_shared<const TriMesh>(pc.make_mesh(nele));
    auto space = build_space(mesh, config.degree, pc.constrained);
    const SimulationResult sim = run_simulation(config, space, pc.problem, spec.start);

    ExperimentRow row;
    row.case_name = to_string(spec.case_kind);
    row.scheme = to_string(config.scheme);
    row.degree = config.degree;
    row.nele = nele;
    row.h = mesh_statistics(*mesh).h_max;
    row.tau = sim.step.tau;
    row.steps = sim.step.steps;
    row.dofs = space->num_dofs();
    row.l2_global = l2_error(sim.final_state, pc.final_solution);
    row.l2_local = pc.local_region ? l2_error(sim.final_state, pc.final_solution, pc.local_region)
                                   : std::numeric_limits<double>::quiet_NaN();
    row.material_derivative = sim.material_derivative;
    row.dissipation = sim.dissipation;
    row.max_l2_over_time = sim.max_l2;
    row.initial_l2 = sim.initial_l2;
    if (spec.timing) {
      row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
    rows.push_back(row);
    if (on_row) on_row(row);
  }
  return rows;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw InvalidArgument("bad number '" + s + "'");
  return v;
}

constexpr const char* kHeader =
    "case,scheme,degree,nele,h,tau,N_steps,dofs,l2_global,l2_local,material_derivative,dissipation,"
    "max_l2_over_time,wall_seconds";

}  // namespace

void write_csv_header(std::ostream& out) { out << kHeader << '\n'; }

void write_csv_row(std::ostream& out, const ExperimentRow& r) {
  out << r.case_name << ',' << r.scheme << ',' << r.degree << ',' << r.nele << ',' << fmt(r.h) << ',' << fmt(r.tau)
      << ',' << r.steps << ',' << r.dofs << ',' << fmt(r.l2_global) << ',' << fmt(r.l2_local) << ','
      << fmt(r.material_derivative) << ',' << fmt(r.dissipation) << ',' << fmt(r.max_l2_over_time) << ','
      << fmt(r.wall_seconds) << '\n';
}

void write_csv(std::ostream& out, const std::vector<ExperimentRow>& rows) {
  write_csv_header(out);
  for (const auto& r : rows) write_csv_row(out, r);
}

std::vector<ExperimentRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw InvalidArgument("read_csv: missing or unexpected header");
  std::vector<ExperimentRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 14) throw InvalidArgument("read_csv: line " + std::to_string(lineno) + " has wrong field count");
    try {
      ExperimentRow r;
      r.case_name = f[0];
      r.scheme = f[1];
      r.degree = std::stoi(f[2]);
      r.nele = std::stoul(f[3]);
      r.h = parse_double(f[4]);
      r.tau = parse_double(f[5]);
      r.steps = std::stoul(f[6]);
      r.dofs = std::stoul(f[7]);
      r.l2_global = parse_double(f[8]);
      r.l2_local = parse_double(f[9]);
      r.material_derivative = parse_double(f[10]);
      r.dissipation = parse_double(f[11]);
      r.max_l2_over_time = parse_double(f[12]);
      r.wall_seconds = parse_double(f[13]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw InvalidArgument("read_csv: line " + std::to_string(lineno) + " is malformed");
    }
  }
  return rows;
}

std::string rate_summary(const std::vector<ExperimentRow>& rows) {
  std::map<std::tuple<std::string, std::string, int>, std::vector<const ExperimentRow*>> groups;
  for (const auto& r : rows) groups[{r.case_name, r.scheme, r.degree}].push_back(&r);

  std::ostringstream out;
  char buf[256];
  for (const auto& [key, g] : groups) {
    out << std::get<0>(key) << ' ' << std::get<1>(key) << " P" << std::get<2>(key) << '\n';
    std::snprintf(buf, sizeof buf, "  %6s %12s %12s %8s %12s %8s %12s %8s\n", "nele", "h", "l2_global", "rate",
                  "l2_local", "rate", "mat_deriv", "rate");
    out << buf;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto rate = [&](double ExperimentRow::*field) -> std::string {
        if (i == 0) return "-";
        const double e0 = g[i - 1]->*field, e1 = g[i]->*field;
        if (!(e0 > 0.0) || !(e1 > 0.0)) return "-";
        return fmt(std::round(100.0 * std::log(e0 / e1) / std::log(g[i - 1]->h / g[i]->h)) / 100.0);
      };
      std::snprintf(buf, sizeof buf, "  %6zu %12.4e %12.4e %8s %12.4e %8s %12.4e %8s\n", g[i]->nele, g[i]->h,
                    g[i]->l2_global, rate(&ExperimentRow::l2_global).c_str(), g[i]->l2_local,
                    rate(&ExperimentRow::l2_local).c_str(), g[i]->material_derivative,
                    rate(&ExperimentRow::material_derivative).c_str());
      out << buf;
    }
  }
  return out.str();
}

}  // namespace cipimex
