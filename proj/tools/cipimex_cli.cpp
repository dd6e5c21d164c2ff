#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cipimex/errors.hpp"
#include "cipimex/experiments.hpp"
#include "cipimex/mesh.hpp"

using namespace cipimex;

namespace {

std::vector<std::size_t> parse_nele(const std::string& list) {
  std::vector<std::size_t> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const unsigned long v = std::stoul(item, &pos);
    if (pos != item.size()) throw InvalidArgument("bad nele entry '" + item + "'");
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CIP-stabilized IMEX transport experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a convergence experiment and write CSV");
  std::string case_name = "disc", scheme = "bdf2", data = "smooth", nele = "40,80,160", out_path, start = "exact";
  int degree = 1;
  std::optional<double> co, gamma;
  double mu = 0.0, eps = 0.0;
  bool no_stab = false, no_timing = false;
  run->add_option("--case", case_name, "disc or tube")->check(CLI::IsMember({"disc", "tube"}));
  run->add_option("--scheme", scheme, "bdf2, cn, ab2 or ab3")->check(CLI::IsMember({"bdf2", "cn", "ab2", "ab3"}));
  run->add_option("--degree", degree, "polynomial degree")->check(CLI::Range(1, 3));
  run->add_option("--data", data, "smooth, rough or combined (disc only)")
      ->check(CLI::IsMember({"smooth", "rough", "combined"}));
  run->add_option("--nele", nele, "comma separated mesh sizes");
  run->add_option("--co", co, "Courant number (default from the parameter table)");
  run->add_option("--gamma", gamma, "stabilization weight (default from the parameter table)");
  run->add_option("--mu", mu, "diffusion coefficient");
  run->add_option("--eps", eps, "crosswind weight in the stabilization");
  run->add_flag("--no-stab", no_stab, "switch the stabilization off");
  run->add_option("--start", start, "startup: exact or rk2")->check(CLI::IsMember({"exact", "rk2"}));
  run->add_flag("--no-timing", no_timing, "write wall_seconds = 0 for reproducible output");
  run->add_option("--out", out_path, "CSV output path (stdout when omitted)");

  auto* rates = app.add_subcommand("rates", "print convergence rates of a CSV file");
  std::string in_path;
  rates->add_option("--in", in_path, "CSV produced by run")->required();

  auto* mesh_cmd = app.add_subcommand("mesh", "generate a mesh file");
  std::optional<std::size_t> square_n, disc_n;
  std::string mesh_out;
  auto* sq = mesh_cmd->add_option("--square", square_n, "unit square with N cells per side");
  auto* dc = mesh_cmd->add_option("--disc", disc_n, "unit disc with N boundary faces");
  sq->excludes(dc);
  mesh_cmd->add_option("--out", mesh_out, "output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentSpec spec;
      spec.case_kind = parse_case(case_name);
      spec.data = parse_data(data);
      spec.nele = parse_nele(nele);
      spec.start = start == "rk2" ? StartMode::rk2 : StartMode::exact;
      spec.timing = !no_timing;
      SchemeConfig& c = spec.config;
      c.scheme = parse_scheme(scheme);
      c.degree = degree;
      c.mu = mu;
      c.eps_cross = eps;
      c.stabilized = !no_stab;
      if (!co || !gamma) {
        const auto [d_co, d_gamma] = default_parameters(c.scheme, degree);
        c.courant = co.value_or(d_co);
        c.gamma = gamma.value_or(d_gamma);
      } else {
        c.courant = *co;
        c.gamma = *gamma;
      }
      if (mu > 0.0) std::cerr << "note: the reference solutions neglect diffusion\n";

      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw InvalidArgument("cannot open " + out_path);
        out = &file;
      }
      write_csv_header(*out);
      const auto rows = run_experiment(spec, [&](const ExperimentRow& r) {
        write_csv_row(*out, r);
        out->flush();
      });
      std::cerr << rate_summary(rows);
    } else if (rates->parsed()) {
      std::ifstream in(in_path);
      if (!in) throw InvalidArgument("cannot open " + in_path);
      std::cout << rate_summary(read_csv(in));
    } else if (mesh_cmd->parsed()) {
      if (!square_n && !disc_n) throw InvalidArgument("mesh: give --square N or --disc N");
      const TriMesh m = square_n ? generate_square_mesh(*square_n) : generate_disc_mesh(*disc_n);
      save_mesh(m, mesh_out);
      const auto st = mesh_statistics(m);
      std::cerr << m.num_nodes() << " nodes, " << m.num_triangles() << " triangles, h_max " << st.h_max << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
