#include "cipimex/norms.hpp"

#include <cmath>
#include <limits>

#include "cipimex/errors.hpp"

namespace cipimex {

double sqrt_clamped(double q) {
  if (q >= 0.0) return std::sqrt(q);
  if (q >= -1e-12) return 0.0;
  return std::numeric_limits<double>::quiet_NaN();
}

double l2_error(const FieldVector& v, const ScalarFunction& exact, const RegionPredicate& region) {
  const FeSpace& space = *v.space;
  if (v.values.size() != space.num_dofs()) throw DimensionMismatch("l2_error: vector length");
  const QuadratureRule& rule = quadrature_rule(QuadratureKind::triangle, space.volume_quadrature_degree());
  const TriMesh& mesh = space.mesh();
  double s = 0.0;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (region) {
      const Point2 c = mesh.centroid(t);
      if (!region(c.x, c.y)) continue;
    }
    const double area = space.geometry(t).area;
    double cell = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = space.to_physical(t, rule.points[q]);
      const double e = v.evaluate(t, rule.points[q]) - exact(x.x, x.y);
      cell += rule.weights[q] * e * e;
    }
    s += 2.0 * area * cell;
  }
  return std::sqrt(s);
}

double stab_seminorm(const SparseMatrix& S, std::span<const double> v) { return sqrt_clamped(S.quadratic_form(v)); }

double energy(const SparseMatrix& A, const SparseMatrix& S, double gamma, std::span<const double> v) {
  return sqrt_clamped(gamma * S.quadratic_form(v) + A.quadratic_form(v));
}

double material_derivative_error(Scheme scheme, std::span<const Vector> series, const VelocityField& beta, double tau,
                                 const FeSpace& space) {
  const std::size_t back = scheme == Scheme::ab3 ? 3 : 2;
  if (series.size() < back + 1) throw InvalidArgument("material_derivative_error: series too short");
  const std::size_t n = space.num_dofs();
  for (const auto& s : series) {
    if (s.size() != n) throw DimensionMismatch("material_derivative_error: vector length");
  }

  Extrapolation kind = Extrapolation::tilde;
  if (scheme == Scheme::cn || scheme == Scheme::ab2) kind = Extrapolation::hat;
  if (scheme == Scheme::ab3) kind = Extrapolation::ab3;
  const auto w = extrapolation_weights(kind);

  const QuadratureRule& rule = quadrature_rule(QuadratureKind::triangle, space.volume_quadrature_degree());
  const TriMesh& mesh = space.mesh();
  const std::size_t nloc = space.dofs_per_cell();
  // tabulate basis values and physical gradients once per cell and point
  std::vector<BasisValues> tab;
  tab.reserve(mesh.num_triangles() * rule.size());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    for (std::size_t q = 0; q < rule.size(); ++q) tab.push_back(eval_basis(space, t, rule.points[q]));
  }

  double total = 0.0;
  Vector r(n), v(n);
  for (std::size_t k = back; k < series.size(); ++k) {
    const Vector& u1 = series[k];
    const Vector& u0 = series[k - 1];
    const Vector& um = series[k - 2];
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = scheme == Scheme::bdf2 ? (3.0 * u1[i] - 4.0 * u0[i] + um[i]) / (2.0 * tau) : (u1[i] - u0[i]) / tau;
      v[i] = w[0] * u0[i] + w[1] * um[i] + (back == 3 ? w[2] * series[k - 3][i] : 0.0);
    }
    double s = 0.0;
    for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
      const auto dofs = space.cell_dofs(t);
      const double area = space.geometry(t).area;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const BasisValues& b = tab[t * rule.size() + q];
        const Point2 x = space.to_physical(t, rule.points[q]);
        const Point2 bx = beta(x.x, x.y, 0.0);
        double val = 0.0;
        for (std::size_t i = 0; i < nloc; ++i) {
          val += r[dofs[i]] * b.values[i] + v[dofs[i]] * dot(bx, b.gradients[i]);
        }
        s += 2.0 * area * rule.weights[q] * val * val;
      }
    }
    total += tau * s;
  }
  return std::sqrt(total);
}

}  // namespace cipimex
