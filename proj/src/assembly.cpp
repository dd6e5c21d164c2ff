#include "cipimex/assembly.hpp"

#include <cmath>

#include "cipimex/errors.hpp"

namespace cipimex {

VelocityField constant_velocity(Point2 b) {
  VelocityField v;
  v.evaluator = [b](double, double, double) { return b; };
  v.inf_norm = norm(b);
  return v;
}

VelocityField rotation_velocity() {
  VelocityField v;
  v.evaluator = [](double x, double y, double) { return Point2{y, -x}; };
  v.inf_norm = 1.0;
  return v;
}

namespace {

// Basis values and barycentric derivatives at the points of a volume rule.
struct Tabulation {
  const QuadratureRule* rule = nullptr;
  std::size_t n = 0;
  std::vector<double> values;                // [q * n + i]
  std::vector<std::array<double, 3>> dlam;   // [q * n + i]
};

Tabulation tabulate(const FeSpace& space, int degree) {
  Tabulation tab;
  tab.rule = &quadrature_rule(QuadratureKind::triangle, degree);
  tab.n = space.dofs_per_cell();
  const std::size_t nq = tab.rule->size();
  tab.values.resize(nq * tab.n);
  tab.dlam.resize(nq * tab.n);
  for (std::size_t q = 0; q < nq; ++q) {
    const auto& p = tab.rule->points[q];
    space.basis().evaluate({1.0 - p[0] - p[1], p[0], p[1]},
                           std::span<double>(tab.values.data() + q * tab.n, tab.n),
                           std::span<std::array<double, 3>>(tab.dlam.data() + q * tab.n, tab.n));
  }
  return tab;
}

Point2 physical_gradient(const std::array<double, 3>& dl, const CellGeometry& g) {
  return dl[0] * g.grad_lambda[0] + dl[1] * g.grad_lambda[1] + dl[2] * g.grad_lambda[2];
}

// Values and physical gradients of the basis of cell t at physical point x.
void eval_at_point(const FeSpace& space, std::size_t t, Point2 x, std::span<double> values,
                   std::span<Point2> grads) {
  const auto ref = space.to_reference(t, x);
  const std::size_t n = space.dofs_per_cell();
  std::array<std::array<double, 3>, 10> dl{};
  space.basis().evaluate({1.0 - ref[0] - ref[1], ref[0], ref[1]}, values,
                         std::span<std::array<double, 3>>(dl.data(), n));
  const auto& g = space.geometry(t);
  for (std::size_t i = 0; i < n; ++i) grads[i] = physical_gradient(dl[i], g);
}

template <typename Kernel>
SparseMatrix assemble_cells(const FeSpace& space, int quad_degree, Kernel&& kernel) {
  SparseMatrix m = cell_pattern(space);
  const Tabulation tab = tabulate(space, quad_degree);
  const std::size_t n = tab.n;
  std::vector<double> local(n * n);
  std::vector<Point2> grads(n);
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const CellGeometry& g = space.geometry(t);
    std::fill(local.begin(), local.end(), 0.0);
    for (std::size_t q = 0; q < tab.rule->size(); ++q) {
      const auto& p = tab.rule->points[q];
      const double w = tab.rule->weights[q] * 2.0 * g.area;
      const Point2 x = space.to_physical(t, p);
      for (std::size_t i = 0; i < n; ++i) grads[i] = physical_gradient(tab.dlam[q * n + i], g);
      kernel(x, w, std::span<const double>(tab.values.data() + q * n, n), std::span<const Point2>(grads), local);
    }
    const auto dofs = space.cell_dofs(t);
    m.add_block(dofs, dofs, local);
  }
  return m;
}

}  // namespace

SparseMatrix cell_pattern(const FeSpace& space) {
  SparsityBuilder b(space.num_dofs(), space.num_dofs());
  for (std::size_t t = 0; t < space.mesh().num_triangles(); ++t) {
    const auto dofs = space.cell_dofs(t);
    b.add_block(dofs, dofs);
  }
  return SparseMatrix(std::move(b));
}

SparseMatrix assemble_mass(const FeSpace& space) {
  return assemble_cells(space, space.volume_quadrature_degree(),
                        [](Point2, double w, std::span<const double> phi, std::span<const Point2>,
                           std::span<double> local) {
                          const std::size_t n = phi.size();
                          for (std::size_t i = 0; i < n; ++i) {
                            for (std::size_t j = 0; j < n; ++j) local[i * n + j] += w * phi[i] * phi[j];
                          }
                        });
}

SparseMatrix assemble_diffusion(const FeSpace& space, double mu) {
  if (mu < 0.0) throw InvalidArgument("assemble_diffusion: mu must be >= 0");
  return assemble_cells(space, space.volume_quadrature_degree(),
                        [mu](Point2, double w, std::span<const double> phi, std::span<const Point2> grad,
                             std::span<double> local) {
                          const std::size_t n = phi.size();
                          for (std::size_t i = 0; i < n; ++i) {
                            for (std::size_t j = 0; j < n; ++j) local[i * n + j] += w * mu * dot(grad[i], grad[j]);
                          }
                        });
}

SparseMatrix assemble_convection(const FeSpace& space, const VelocityField& beta, double t) {
  return assemble_cells(space, space.volume_quadrature_degree(),
                        [&](Point2 x, double w, std::span<const double> phi, std::span<const Point2> grad,
                            std::span<double> local) {
                          const Point2 b = beta(x.x, x.y, t);
                          const std::size_t n = phi.size();
                          for (std::size_t i = 0; i < n; ++i) {
                            for (std::size_t j = 0; j < n; ++j) local[i * n + j] += w * dot(b, grad[j]) * phi[i];
                          }
                        });
}

SparseMatrix assemble_streamline(const FeSpace& space, const VelocityField& beta, double t) {
  return assemble_cells(space, space.volume_quadrature_degree(),
                        [&](Point2 x, double w, std::span<const double> phi, std::span<const Point2> grad,
                            std::span<double> local) {
                          const Point2 b = beta(x.x, x.y, t);
                          const std::size_t n = phi.size();
                          for (std::size_t i = 0; i < n; ++i) {
                            const double bi = dot(b, grad[i]);
                            for (std::size_t j = 0; j < n; ++j) local[i * n + j] += w * bi * dot(b, grad[j]);
                          }
                        });
}

SparseMatrix assemble_cip(const FeSpace& space, const VelocityField& beta, const StabParams& params, double t) {
  if (params.gamma < 0.0 || params.eps_cross < 0.0) throw InvalidArgument("assemble_cip: negative parameters");
  const TriMesh& mesh = space.mesh();
  const std::size_t n = space.dofs_per_cell();

  SparsityBuilder builder(space.num_dofs(), space.num_dofs());
  std::vector<std::size_t> pair_dofs(2 * n);
  auto collect = [&](const InteriorFace& f) {
    const auto dl = space.cell_dofs(f.left);
    const auto dr = space.cell_dofs(f.right);
    std::copy(dl.begin(), dl.end(), pair_dofs.begin());
    std::copy(dr.begin(), dr.end(), pair_dofs.begin() + static_cast<std::ptrdiff_t>(n));
  };
  for (const auto& f : mesh.interior_faces()) {
    collect(f);
    builder.add_block(pair_dofs, pair_dofs);
  }
  SparseMatrix s(std::move(builder));

  const QuadratureRule& rule = space.edge_quadrature();
  std::vector<double> values(n), local(4 * n * n), jump(2 * n);
  std::vector<Point2> grads(n);
  for (const auto& f : mesh.interior_faces()) {
    collect(f);
    std::fill(local.begin(), local.end(), 0.0);
    const Point2 pa = mesh.nodes()[f.a], pb = mesh.nodes()[f.b];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = pa + rule.points[q][0] * (pb - pa);
      const Point2 b = beta(x.x, x.y, t);
      const double w = rule.weights[q] * f.length * f.length * f.length *
                       (std::abs(dot(b, f.normal)) + params.eps_cross);
      eval_at_point(space, f.left, x, values, grads);
      for (std::size_t i = 0; i < n; ++i) jump[i] = dot(grads[i], f.normal);
      eval_at_point(space, f.right, x, values, grads);
      for (std::size_t i = 0; i < n; ++i) jump[n + i] = -dot(grads[i], f.normal);
      for (std::size_t i = 0; i < 2 * n; ++i) {
        for (std::size_t j = 0; j < 2 * n; ++j) local[i * 2 * n + j] += w * jump[i] * jump[j];
      }
    }
    s.add_block(pair_dofs, pair_dofs, local);
  }
  return s;
}

namespace {

// Loops over boundary faces with beta.n < 0 at each quadrature point.
template <typename Visit>
void for_each_inflow_point(const FeSpace& space, const VelocityField& beta, double t, Visit&& visit) {
  const TriMesh& mesh = space.mesh();
  const std::size_t n = space.dofs_per_cell();
  const QuadratureRule& rule = space.edge_quadrature();
  std::vector<double> values(n);
  std::vector<Point2> grads(n);
  for (const auto& f : mesh.boundary_faces()) {
    const Point2 pa = mesh.nodes()[f.a], pb = mesh.nodes()[f.b];
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = pa + rule.points[q][0] * (pb - pa);
      const double bn = dot(beta(x.x, x.y, t), f.normal);
      if (bn >= 0.0) continue;
      eval_at_point(space, f.tri, x, values, grads);
      visit(f, x, rule.weights[q] * f.length * (-bn), std::span<const double>(values));
    }
  }
}

}  // namespace

WeakInflow assemble_weak_inflow(const FeSpace& space, const VelocityField& beta, const TimeFunction& g, double t) {
  const TriMesh& mesh = space.mesh();
  SparsityBuilder builder(space.num_dofs(), space.num_dofs());
  for (const auto& f : mesh.boundary_faces()) {
    const auto dofs = space.cell_dofs(f.tri);
    builder.add_block(dofs, dofs);
  }
  WeakInflow out{SparseMatrix(std::move(builder)), Vector(space.num_dofs(), 0.0)};
  const std::size_t n = space.dofs_per_cell();
  std::vector<double> local(n * n);
  for_each_inflow_point(space, beta, t, [&](const BoundaryFace& f, Point2 x, double w, std::span<const double> phi) {
    const auto dofs = space.cell_dofs(f.tri);
    const double gv = g ? g(x.x, x.y, t) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      out.load[dofs[i]] += w * gv * phi[i];
      for (std::size_t j = 0; j < n; ++j) local[i * n + j] = w * phi[i] * phi[j];
    }
    out.matrix.add_block(dofs, dofs, local);
  });
  return out;
}

Vector assemble_inflow_load(const FeSpace& space, const VelocityField& beta, const TimeFunction& g, double t) {
  Vector load(space.num_dofs(), 0.0);
  if (!g) return load;
  for_each_inflow_point(space, beta, t, [&](const BoundaryFace& f, Point2 x, double w, std::span<const double> phi) {
    const auto dofs = space.cell_dofs(f.tri);
    const double gv = g(x.x, x.y, t);
    for (std::size_t i = 0; i < phi.size(); ++i) load[dofs[i]] += w * gv * phi[i];
  });
  return load;
}

Vector assemble_source(const FeSpace& space, const TimeFunction& f, double t) {
  Vector b(space.num_dofs(), 0.0);
  if (!f) return b;
  const Tabulation tab = tabulate(space, space.volume_quadrature_degree());
  const std::size_t n = tab.n;
  for (std::size_t c = 0; c < space.mesh().num_triangles(); ++c) {
    const CellGeometry& g = space.geometry(c);
    const auto dofs = space.cell_dofs(c);
    for (std::size_t q = 0; q < tab.rule->size(); ++q) {
      const Point2 x = space.to_physical(c, tab.rule->points[q]);
      const double w = tab.rule->weights[q] * 2.0 * g.area * f(x.x, x.y, t);
      for (std::size_t i = 0; i < n; ++i) b[dofs[i]] += w * tab.values[q * n + i];
    }
  }
  return b;
}

}  // namespace cipimex
