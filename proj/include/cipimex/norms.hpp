#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cipimex/assembly.hpp"
#include "cipimex/fem_space.hpp"
#include "cipimex/integrators.hpp"

namespace cipimex {

using RegionPredicate = std::function<bool(double x, double y)>;

struct ErrorReport {
  double l2_global = 0.0;
  std::optional<double> l2_local;
  double material_derivative = 0.0;
  double dissipation = 0.0;
  double h = 0.0;
  double tau = 0.0;
  std::size_t dof_count = 0;
};

/// sqrt(q) with round-off negatives in [-1e-12, 0) mapped to 0; larger
/// negative values give NaN.
double sqrt_clamped(double q);

/// L2 norm of v - exact over the cells whose centroid satisfies `region`
/// (all cells when empty).
double l2_error(const FieldVector& v, const ScalarFunction& exact, const RegionPredicate& region = {});

/// |v|_s = (v' S v)^{1/2}
double stab_seminorm(const SparseMatrix& S, std::span<const double> v);

/// E(v) = (gamma v' S v + v' A v)^{1/2}, A already scaled by mu.
double energy(const SparseMatrix& A, const SparseMatrix& S, double gamma, std::span<const double> v);

/// Material-derivative error of a state series u^0, u^1, ... computed by
/// quadrature: (tau sum_n ||r^{n+1} + beta . grad w^{n+1}||^2)^{1/2}, where r is the
/// scheme's discrete time derivative and w its extrapolated state. The sum
/// runs over every step that has enough predecessors (from n + 1 = 2, or 3
/// for AB3). Throws InvalidArgument for short series.
double material_derivative_error(Scheme scheme, std::span<const Vector> series, const VelocityField& beta, double tau,
                                 const FeSpace& space);

}  // namespace cipimex
