#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "cipimex/mesh.hpp"
#include "cipimex/quadrature.hpp"
#include "cipimex/sparse.hpp"

namespace cipimex {

using ScalarFunction = std::function<double(double x, double y)>;

/// Nodal Lagrange basis of degree 1..3 on the reference triangle, written in
/// barycentric coordinates. Local order: the three vertices, then p-1 nodes
/// on each local edge k (vertex k -> vertex k+1), then the interior node.
class LagrangeBasis {
public:
  explicit LagrangeBasis(int degree);

  int degree() const { return degree_; }
  std::size_t size() const { return size_; }

  /// Values and d/d(lambda_k) at barycentric point (l0, l1, l2).
  void evaluate(const std::array<double, 3>& lambda, std::span<double> values,
                std::span<std::array<double, 3>> dlambda) const;

  /// Barycentric coordinates of the local nodes.
  const std::vector<std::array<double, 3>>& nodes() const { return nodes_; }

private:
  int degree_;
  std::size_t size_;
  std::vector<std::array<double, 3>> nodes_;
};

/// Affine cell map data: x = p0 + J (xi, eta), lambda_k(x) = grad_lambda[k].(x - p0) + (k == 0).
struct CellGeometry {
  Point2 p0;
  std::array<Point2, 3> grad_lambda;
  double area = 0.0;
};

/// Continuous degree-p Lagrange space on a TriMesh. Global numbering: vertex
/// DOFs (= node ids), then p-1 DOFs per edge ordered from the edge's first to
/// second node, then one interior DOF per cell when p = 3.
class FeSpace {
public:
  FeSpace(std::shared_ptr<const TriMesh> mesh, int degree, bool constrained);

  const TriMesh& mesh() const { return *mesh_; }
  std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
  int degree() const { return basis_.degree(); }
  bool constrained() const { return constrained_; }
  const LagrangeBasis& basis() const { return basis_; }

  std::size_t num_dofs() const { return dof_coords_.size(); }
  std::size_t dofs_per_cell() const { return basis_.size(); }
  const std::vector<Point2>& dof_coords() const { return dof_coords_; }
  std::span<const std::size_t> cell_dofs(std::size_t t) const {
    return {cell_dofs_.data() + t * basis_.size(), basis_.size()};
  }
  /// Sorted DOF ids lying on the domain boundary.
  const std::vector<std::size_t>& boundary_dofs() const { return boundary_dofs_; }
  bool is_boundary_dof(std::size_t d) const { return on_boundary_[d] != 0; }

  const CellGeometry& geometry(std::size_t t) const { return geometry_[t]; }
  Point2 to_physical(std::size_t t, std::array<double, 2> ref) const;
  std::array<double, 2> to_reference(std::size_t t, Point2 x) const;

  /// Quadrature degree used for volume forms (2p + 2).
  int volume_quadrature_degree() const { return 2 * degree() + 2; }
  /// Edge rule with max(p + 1, 3) Gauss points.
  const QuadratureRule& edge_quadrature() const;

private:
  std::shared_ptr<const TriMesh> mesh_;
  LagrangeBasis basis_;
  bool constrained_;
  std::vector<Point2> dof_coords_;
  std::vector<std::size_t> cell_dofs_;
  std::vector<std::size_t> boundary_dofs_;
  std::vector<char> on_boundary_;
  std::vector<CellGeometry> geometry_;
};

/// Throws InvalidArgument unless degree is 1, 2 or 3.
std::shared_ptr<const FeSpace> build_space(std::shared_ptr<const TriMesh> mesh, int degree, bool constrained);

struct BasisValues {
  std::vector<double> values;
  std::vector<Point2> gradients;  // physical
};

BasisValues eval_basis(const FeSpace& space, std::size_t t, std::array<double, 2> ref);

/// Coefficients of a discrete function together with its space.
struct FieldVector {
  std::shared_ptr<const FeSpace> space;
  Vector values;

  FieldVector() = default;
  FieldVector(std::shared_ptr<const FeSpace> s, Vector v);
  explicit FieldVector(std::shared_ptr<const FeSpace> s);  // zero

  /// Point evaluation inside cell t.
  double evaluate(std::size_t t, std::array<double, 2> ref) const;
};

/// Nodal interpolant (f evaluated at DOF coordinates).
FieldVector interpolate(std::shared_ptr<const FeSpace> space, const ScalarFunction& f);

/// L2 projection. On a constrained space the boundary DOFs are fixed to the
/// nodal values of `dirichlet` (zero when absent) and the projection is taken
/// over the interior DOFs, so the default is the projection onto functions
/// vanishing on the boundary.
FieldVector l2_project(std::shared_ptr<const FeSpace> space, const ScalarFunction& f,
                       const std::optional<ScalarFunction>& dirichlet = std::nullopt, double tol_rel = 1e-12);

/// Cell averages of v.
std::vector<double> p0_project(const FeSpace& space, std::span<const double> v);

}  // namespace cipimex
