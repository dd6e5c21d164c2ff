#pragma once

#include <array>
#include <vector>

namespace cipimex {

enum class QuadratureKind { triangle, edge };

/// Points are (xi, eta) on the reference triangle {(0,0),(1,0),(0,1)} or
/// (t, 0) on the reference edge [0,1]. Weights sum to 1/2 or 1 respectively.
struct QuadratureRule {
  QuadratureKind kind = QuadratureKind::triangle;
  int exact_degree = 0;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Smallest tabulated rule integrating polynomials of total degree
/// `exact_degree` exactly. Triangle rules go up to degree 8 (symmetric,
/// positive weights), edge rules (Gauss-Legendre) up to degree 11.
/// Throws Unsupported above the tables.
const QuadratureRule& quadrature_rule(QuadratureKind kind, int exact_degree);

/// n-point Gauss-Legendre rule on [0,1].
QuadratureRule gauss_legendre(int n);

}  // namespace cipimex
