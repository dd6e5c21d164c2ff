#include "cipimex/fem_space.hpp"

#include <algorithm>
#include <string>

#include "cipimex/errors.hpp"

namespace cipimex {

LagrangeBasis::LagrangeBasis(int degree) : degree_(degree) {
  if (degree < 1 || degree > 3) throw InvalidArgument("unsupported degree " + std::to_string(degree));
  size_ = static_cast<std::size_t>((degree + 1) * (degree + 2) / 2);
  nodes_ = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int k = 0; k < 3; ++k) {
    const int a = k, b = (k + 1) % 3;
    for (int m = 1; m < degree; ++m) {
      std::array<double, 3> l{0, 0, 0};
      l[a] = static_cast<double>(degree - m) / degree;
      l[b] = static_cast<double>(m) / degree;
      nodes_.push_back(l);
    }
  }
  if (degree == 3) nodes_.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

void LagrangeBasis::evaluate(const std::array<double, 3>& l, std::span<double> v,
                             std::span<std::array<double, 3>> d) const {
  for (auto& g : d) g = {0, 0, 0};
  switch (degree_) {
    case 1:
      for (int k = 0; k < 3; ++k) {
        v[k] = l[k];
        d[k][k] = 1.0;
      }
      break;
    case 2:
      for (int k = 0; k < 3; ++k) {
        v[k] = l[k] * (2.0 * l[k] - 1.0);
        d[k][k] = 4.0 * l[k] - 1.0;
      }
      for (int k = 0; k < 3; ++k) {
        const int a = k, b = (k + 1) % 3;
        v[3 + k] = 4.0 * l[a] * l[b];
        d[3 + k][a] = 4.0 * l[b];
        d[3 + k][b] = 4.0 * l[a];
      }
      break;
    case 3:
      for (int k = 0; k < 3; ++k) {
        const double x = l[k];
        v[k] = 0.5 * x * (3.0 * x - 1.0) * (3.0 * x - 2.0);
        d[k][k] = 0.5 * (27.0 * x * x - 18.0 * x + 2.0);
      }
      for (int k = 0; k < 3; ++k) {
        const int a = k, b = (k + 1) % 3;
        const double la = l[a], lb = l[b];
        // node at (2/3, 1/3) along a->b, then (1/3, 2/3)
        v[3 + 2 * k] = 4.5 * la * lb * (3.0 * la - 1.0);
        d[3 + 2 * k][a] = 4.5 * lb * (6.0 * la - 1.0);
        d[3 + 2 * k][b] = 4.5 * la * (3.0 * la - 1.0);
        v[4 + 2 * k] = 4.5 * la * lb * (3.0 * lb - 1.0);
        d[4 + 2 * k][a] = 4.5 * lb * (3.0 * lb - 1.0);
        d[4 + 2 * k][b] = 4.5 * la * (6.0 * lb - 1.0);
      }
      v[9] = 27.0 * l[0] * l[1] * l[2];
      d[9] = {27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]};
      break;
    default:
      break;
  }
}

FeSpace::FeSpace(std::shared_ptr<const TriMesh> mesh, int degree, bool constrained)
    : mesh_(std::move(mesh)), basis_(degree), constrained_(constrained) {
  if (!mesh_) throw InvalidArgument("FeSpace: null mesh");
  const TriMesh& m = *mesh_;
  const std::size_t n_nodes = m.num_nodes(), n_edges = m.num_edges(), n_tris = m.num_triangles();
  const std::size_t per_edge = static_cast<std::size_t>(degree - 1);
  const std::size_t per_cell = degree == 3 ? 1 : 0;
  const std::size_t n_dofs = n_nodes + per_edge * n_edges + per_cell * n_tris;

  dof_coords_.resize(n_dofs);
  for (std::size_t i = 0; i < n_nodes; ++i) dof_coords_[i] = m.nodes()[i];
  for (std::size_t e = 0; e < n_edges; ++e) {
    const auto [a, b] = m.edge_nodes(e);
    const Point2 pa = m.nodes()[a], pb = m.nodes()[b];
    for (std::size_t k = 0; k < per_edge; ++k) {
      const double s = static_cast<double>(k + 1) / degree;
      dof_coords_[n_nodes + e * per_edge + k] = pa + s * (pb - pa);
    }
  }

  const std::size_t nloc = basis_.size();
  cell_dofs_.resize(n_tris * nloc);
  geometry_.resize(n_tris);
  for (std::size_t t = 0; t < n_tris; ++t) {
    const auto& tri = m.triangles()[t];
    std::size_t* dofs = cell_dofs_.data() + t * nloc;
    for (int k = 0; k < 3; ++k) dofs[k] = tri[k];
    for (int k = 0; k < 3; ++k) {
      const std::size_t e = m.triangle_edges(t)[k];
      const bool same = m.edge_nodes(e)[0] == tri[k];
      for (std::size_t j = 0; j < per_edge; ++j) {
        const std::size_t global_j = same ? j : per_edge - 1 - j;
        dofs[3 + k * per_edge + j] = n_nodes + e * per_edge + global_j;
      }
    }
    if (per_cell) {
      const std::size_t d = n_nodes + per_edge * n_edges + t;
      dofs[nloc - 1] = d;
      dof_coords_[d] = m.centroid(t);
    }

    CellGeometry& g = geometry_[t];
    const Point2 p0 = m.nodes()[tri[0]], p1 = m.nodes()[tri[1]], p2 = m.nodes()[tri[2]];
    const double det = cross(p1 - p0, p2 - p0);
    g.p0 = p0;
    g.area = 0.5 * det;
    // rows of J^{-1}
    g.grad_lambda[1] = {(p2.y - p0.y) / det, -(p2.x - p0.x) / det};
    g.grad_lambda[2] = {-(p1.y - p0.y) / det, (p1.x - p0.x) / det};
    g.grad_lambda[0] = {-g.grad_lambda[1].x - g.grad_lambda[2].x, -g.grad_lambda[1].y - g.grad_lambda[2].y};
  }

  on_boundary_.assign(n_dofs, 0);
  for (std::size_t f = 0; f < m.boundary_faces().size(); ++f) {
    const auto& face = m.boundary_faces()[f];
    on_boundary_[face.a] = 1;
    on_boundary_[face.b] = 1;
    const std::size_t e = m.interior_faces().size() + f;
    for (std::size_t k = 0; k < per_edge; ++k) on_boundary_[n_nodes + e * per_edge + k] = 1;
  }
  for (std::size_t d = 0; d < n_dofs; ++d) {
    if (on_boundary_[d]) boundary_dofs_.push_back(d);
  }
}

Point2 FeSpace::to_physical(std::size_t t, std::array<double, 2> ref) const {
  const auto& tri = mesh_->triangles()[t];
  const Point2 p0 = mesh_->nodes()[tri[0]], p1 = mesh_->nodes()[tri[1]], p2 = mesh_->nodes()[tri[2]];
  return p0 + ref[0] * (p1 - p0) + ref[1] * (p2 - p0);
}

std::array<double, 2> FeSpace::to_reference(std::size_t t, Point2 x) const {
  const CellGeometry& g = geometry_[t];
  const Point2 d = x - g.p0;
  return {dot(g.grad_lambda[1], d), dot(g.grad_lambda[2], d)};
}

const QuadratureRule& FeSpace::edge_quadrature() const {
  const int points = std::max(degree() + 1, 3);
  return quadrature_rule(QuadratureKind::edge, 2 * points - 1);
}

std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const TriMesh> mesh, int degree, bool constrained) {
  return std::make_shared<const FeSpace>(std::move(mesh), degree, constrained);
}

BasisValues eval_basis(const FeSpace& space, std::size_t t, std::array<double, 2> ref) {
  const std::size_t n = space.dofs_per_cell();
  BasisValues out;
  out.values.resize(n);
  out.gradients.resize(n);
  std::vector<std::array<double, 3>> dl(n);
  space.basis().evaluate({1.0 - ref[0] - ref[1], ref[0], ref[1]}, out.values, dl);
  const auto& g = space.geometry(t).grad_lambda;
  for (std::size_t i = 0; i < n; ++i) {
    out.gradients[i] = dl[i][0] * g[0] + dl[i][1] * g[1] + dl[i][2] * g[2];
  }
  return out;
}

FieldVector::FieldVector(std::shared_ptr<const FeSpace> s, Vector v) : space(std::move(s)), values(std::move(v)) {
  if (!space) throw InvalidArgument("FieldVector: null space");
  if (values.size() != space->num_dofs()) {
    throw DimensionMismatch("FieldVector: " + std::to_string(values.size()) + " values for " +
                            std::to_string(space->num_dofs()) + " DOFs");
  }
}

FieldVector::FieldVector(std::shared_ptr<const FeSpace> s) : space(std::move(s)) {
  if (!space) throw InvalidArgument("FieldVector: null space");
  values.assign(space->num_dofs(), 0.0);
}

double FieldVector::evaluate(std::size_t t, std::array<double, 2> ref) const {
  const auto bv = eval_basis(*space, t, ref);
  const auto dofs = space->cell_dofs(t);
  double s = 0.0;
  for (std::size_t i = 0; i < dofs.size(); ++i) s += bv.values[i] * values[dofs[i]];
  return s;
}

FieldVector interpolate(std::shared_ptr<const FeSpace> space, const ScalarFunction& f) {
  FieldVector v(space);
  const auto& c = space->dof_coords();
  for (std::size_t d = 0; d < c.size(); ++d) v.values[d] = f(c[d].x, c[d].y);
  return v;
}

}  // namespace cipimex
