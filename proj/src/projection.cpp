#include <string>

#include "cipimex/assembly.hpp"
#include "cipimex/cg.hpp"
#include "cipimex/dirichlet.hpp"
#include "cipimex/errors.hpp"
#include "cipimex/fem_space.hpp"

namespace cipimex {

FieldVector l2_project(std::shared_ptr<const FeSpace> space, const ScalarFunction& f,
                       const std::optional<ScalarFunction>& dirichlet, double tol_rel) {
  const Vector load = assemble_source(*space, [&f](double x, double y, double) { return f(x, y); }, 0.0);
  const SparseMatrix mass = assemble_mass(*space);
  CgOptions options;
  options.tol_rel = tol_rel;
  options.max_iter = 10 * space->num_dofs() + 100;
  if (!space->constrained()) {
    return FieldVector(space, cg_solve(mass, load, options).x);
  }
  Vector fixed(space->num_dofs(), 0.0);
  if (dirichlet) {
    const auto& c = space->dof_coords();
    for (std::size_t d : space->boundary_dofs()) fixed[d] = (*dirichlet)(c[d].x, c[d].y);
  }
  const DirichletSystem system(mass, space->boundary_dofs());
  const Vector rhs = system.rhs(load, fixed);
  return FieldVector(space, cg_solve(system.matrix(), rhs, options).x);
}

std::vector<double> p0_project(const FeSpace& space, std::span<const double> v) {
  if (v.size() != space.num_dofs()) throw DimensionMismatch("p0_project: vector length");
  const QuadratureRule& rule = quadrature_rule(QuadratureKind::triangle, space.degree());
  const std::size_t n = space.dofs_per_cell();
  // int_T phi_i / |T| is the same for every affine cell
  std::vector<double> mean_phi(n, 0.0), phi(n);
  std::vector<std::array<double, 3>> dl(n);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const auto& p = rule.points[q];
    space.basis().evaluate({1.0 - p[0] - p[1], p[0], p[1]}, phi, dl);
    for (std::size_t i = 0; i < n; ++i) mean_phi[i] += 2.0 * rule.weights[q] * phi[i];
  }
  std::vector<double> out(space.mesh().num_triangles(), 0.0);
  for (std::size_t t = 0; t < out.size(); ++t) {
    const auto dofs = space.cell_dofs(t);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += mean_phi[i] * v[dofs[i]];
    out[t] = s;
  }
  return out;
}

}  // namespace cipimex
