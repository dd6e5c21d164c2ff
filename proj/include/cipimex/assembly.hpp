#pragma once

#include <functional>

#include "cipimex/fem_space.hpp"
#include "cipimex/sparse.hpp"

namespace cipimex {

using TimeFunction = std::function<double(double x, double y, double t)>;

struct VelocityField {
  std::function<Point2(double x, double y, double t)> evaluator;
  double inf_norm = 0.0;  // sup norm over the closed domain
  bool divergence_free = true;
  bool time_dependent = false;

  Point2 operator()(double x, double y, double t) const { return evaluator(x, y, t); }
};

VelocityField constant_velocity(Point2 b);
/// beta = (y, -x): rigid rotation, |beta| <= 1 on the unit disc.
VelocityField rotation_velocity();

struct StabParams {
  double gamma = 0.0;      // applied by the time stepper, not by assemble_cip
  double eps_cross = 0.0;  // crosswind weight added to |beta.n|
};

/// All matrices are assembled on the full DOF set; Dirichlet constraints of a
/// constrained space are applied by the solvers.

/// (phi_j, phi_i)
SparseMatrix assemble_mass(const FeSpace& space);

/// mu (grad phi_j, grad phi_i)
SparseMatrix assemble_diffusion(const FeSpace& space, double mu);

/// C_ij = int (beta . grad phi_j) phi_i
SparseMatrix assemble_convection(const FeSpace& space, const VelocityField& beta, double t);

/// Gradient-jump penalty over interior faces:
/// S_ij = sum_F int_F h_F^2 (|beta.n| + eps) [grad phi_j].[grad phi_i].
/// The stencil couples all DOFs of the two cells sharing a face.
SparseMatrix assemble_cip(const FeSpace& space, const VelocityField& beta, const StabParams& params, double t);

struct WeakInflow {
  SparseMatrix matrix;  // int_{beta.n < 0} |beta.n| phi_j phi_i
  Vector load;          // int_{beta.n < 0} |beta.n| g phi_i
};

WeakInflow assemble_weak_inflow(const FeSpace& space, const VelocityField& beta, const TimeFunction& g, double t);

/// Only the inflow load vector (the matrix part is time independent for static beta).
Vector assemble_inflow_load(const FeSpace& space, const VelocityField& beta, const TimeFunction& g, double t);

/// b_i = int f phi_i
Vector assemble_source(const FeSpace& space, const TimeFunction& f, double t);

/// G_ij = int (beta . grad phi_i)(beta . grad phi_j); gives ||beta . grad w||^2 = w'Gw.
SparseMatrix assemble_streamline(const FeSpace& space, const VelocityField& beta, double t);

/// Zero-valued matrix with the cell-local coupling pattern of the space.
SparseMatrix cell_pattern(const FeSpace& space);

}  // namespace cipimex
