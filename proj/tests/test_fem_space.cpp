#include <cmath>
#include <random>

#include "cipimex/errors.hpp"
#include "cipimex/fem_space.hpp"
#include "doctest.h"

using namespace cipimex;

namespace {

std::shared_ptr<const TriMesh> square(std::size_t n) { return std::make_shared<const TriMesh>(generate_square_mesh(n)); }
std::shared_ptr<const TriMesh> disc(std::size_t n) { return std::make_shared<const TriMesh>(generate_disc_mesh(n)); }

// ||v - f|| with a degree-8 rule; independent of the library's own error routines.
double l2_diff(const FieldVector& v, const ScalarFunction& f) {
  const QuadratureRule& rule = quadrature_rule(QuadratureKind::triangle, 8);
  double s = 0.0;
  for (std::size_t t = 0; t < v.space->mesh().num_triangles(); ++t) {
    const double area = v.space->geometry(t).area;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point2 x = v.space->to_physical(t, rule.points[q]);
      const double e = v.evaluate(t, rule.points[q]) - f(x.x, x.y);
      s += 2.0 * area * rule.weights[q] * e * e;
    }
  }
  return std::sqrt(s);
}

std::array<double, 2> random_ref(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng);
  if (a + b > 1.0) {
    a = 1.0 - a;
    b = 1.0 - b;
  }
  return {a, b};
}

double smooth(double x, double y) { return std::exp(-30.0 * ((x - 0.5) * (x - 0.5) + y * y)); }

}  // namespace

TEST_CASE("dof counts") {
  const auto m = square(1);
  CHECK(build_space(m, 1, false)->num_dofs() == 4);
  CHECK(build_space(m, 2, false)->num_dofs() == 9);
  CHECK(build_space(m, 3, false)->num_dofs() == 16);
  for (int p = 1; p <= 3; ++p) {
    const auto s = build_space(square(3), p, true);
    CHECK(s->dofs_per_cell() == static_cast<std::size_t>((p + 1) * (p + 2) / 2));
    // boundary dofs of the square: 4 n p
    CHECK(s->boundary_dofs().size() == static_cast<std::size_t>(4 * 3 * p));
    for (std::size_t d : s->boundary_dofs()) {
      const Point2 c = s->dof_coords()[d];
      CHECK((c.x == 0.0 || c.x == 1.0 || c.y == 0.0 || c.y == 1.0));
    }
  }
  CHECK_THROWS_AS(build_space(m, 0, false), InvalidArgument);
  CHECK_THROWS_AS(build_space(m, 4, false), InvalidArgument);
}

TEST_CASE("basis partition of unity and nodality") {
  std::mt19937_64 rng(11);
  const auto m = disc(20);
  for (int p = 1; p <= 3; ++p) {
    const auto s = build_space(m, p, false);
    const BasisValues c = eval_basis(*s, 0, {1.0 / 3.0, 1.0 / 3.0});
    if (p == 1) {
      for (double v : c.values) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    }
    for (int k = 0; k < 50; ++k) {
      const std::size_t t = rng() % m->num_triangles();
      const BasisValues b = eval_basis(*s, t, random_ref(rng));
      double sum = 0.0;
      Point2 g{0.0, 0.0};
      for (std::size_t i = 0; i < b.values.size(); ++i) {
        sum += b.values[i];
        g = g + b.gradients[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-13);
      CHECK(std::abs(g.x) < 1e-10);
      CHECK(std::abs(g.y) < 1e-10);
    }
    // phi_i(x_j) = delta_ij at the local nodes
    const auto& nodes = s->basis().nodes();
    std::vector<double> phi(nodes.size());
    std::vector<std::array<double, 3>> dl(nodes.size());
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      s->basis().evaluate(nodes[j], phi, dl);
      for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(std::abs(phi[i] - (i == j ? 1.0 : 0.0)) < 1e-14);
    }
  }
}

TEST_CASE("physical gradients match finite differences") {
  const auto s = build_space(disc(16), 3, false);
  std::mt19937_64 rng(5);
  const FieldVector v = interpolate(s, [](double x, double y) { return std::sin(2 * x) * std::cos(3 * y); });
  for (int k = 0; k < 10; ++k) {
    const std::size_t t = rng() % s->mesh().num_triangles();
    auto ref = random_ref(rng);
    ref = {0.1 + 0.8 * ref[0] * 0.9, 0.1 + 0.8 * ref[1] * 0.9};
    const BasisValues b = eval_basis(*s, t, ref);
    const auto dofs = s->cell_dofs(t);
    Point2 g{0.0, 0.0};
    for (std::size_t i = 0; i < dofs.size(); ++i) g = g + v.values[dofs[i]] * b.gradients[i];
    const Point2 x = s->to_physical(t, ref);
    const double h = 1e-6;
    const auto val = [&](Point2 p) { return v.evaluate(t, s->to_reference(t, p)); };
    CHECK(g.x == doctest::Approx((val({x.x + h, x.y}) - val({x.x - h, x.y})) / (2 * h)).epsilon(1e-6));
    CHECK(g.y == doctest::Approx((val({x.x, x.y + h}) - val({x.x, x.y - h})) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("continuity across interior faces") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int p = 2; p <= 3; ++p) {
    const auto s = build_space(disc(24), p, false);
    Vector vals(s->num_dofs());
    for (double& x : vals) x = u(rng);
    const FieldVector v(s, vals);
    const auto& nodes = s->mesh().nodes();
    for (const auto& f : s->mesh().interior_faces()) {
      for (int k = 0; k < 5; ++k) {
        const double r = 0.5 * (u(rng) + 1.0);
        const Point2 x = (1.0 - r) * nodes[f.a] + r * nodes[f.b];
        const double vl = v.evaluate(f.left, s->to_reference(f.left, x));
        const double vr = v.evaluate(f.right, s->to_reference(f.right, x));
        CHECK(std::abs(vl - vr) < 1e-12);
      }
    }
  }
}

TEST_CASE("l2 projection") {
  for (int p = 1; p <= 3; ++p) {
    const auto s = build_space(square(4), p, false);
    // total degree p polynomial is reproduced
    const auto poly = [p](double x, double y) { return 1.0 + x - 2.0 * y + (p >= 2 ? x * y : 0.0) + (p >= 3 ? y * y * y : 0.0); };
    const FieldVector pf = l2_project(s, poly);
    for (std::size_t d = 0; d < s->num_dofs(); ++d) {
      const Point2 c = s->dof_coords()[d];
      CHECK(std::abs(pf.values[d] - poly(c.x, c.y)) < 1e-10);
    }
    // idempotence
    const FieldVector again = l2_project(s, [&pf, &s](double x, double y) {
      for (std::size_t t = 0; t < s->mesh().num_triangles(); ++t) {
        const auto r = s->to_reference(t, {x, y});
        if (r[0] >= -1e-12 && r[1] >= -1e-12 && r[0] + r[1] <= 1.0 + 1e-12) return pf.evaluate(t, r);
      }
      return 0.0;
    });
    for (std::size_t d = 0; d < s->num_dofs(); ++d) CHECK(std::abs(again.values[d] - pf.values[d]) < 1e-9);

    // stability
    const auto rough = [](double x, double y) { return (x - 0.3) * (x - 0.3) + (y - 0.6) * (y - 0.6) < 0.04 ? 1.0 : 0.0; };
    const FieldVector pr = l2_project(s, rough);
    const auto zero = [](double, double) { return 0.0; };
    CHECK(l2_diff(pr, zero) <= l2_diff(FieldVector(s), rough) + 1e-8);

    const FieldVector z = l2_project(s, zero);
    for (double v : z.values) CHECK(v == 0.0);
  }
}

TEST_CASE("l2 projection converges at order p+1") {
  // the Gaussian is barely resolved on coarse meshes, so only fine pairs are compared
  const double d80 = l2_diff(l2_project(build_space(disc(80), 1, false), smooth), smooth);
  const double d160 = l2_diff(l2_project(build_space(disc(160), 1, false), smooth), smooth);
  CHECK(d80 / d160 == doctest::Approx(4.0).epsilon(0.15));
  for (int p = 2; p <= 3; ++p) {
    const double e20 = l2_diff(l2_project(build_space(square(20), p, false), smooth), smooth);
    const double e40 = l2_diff(l2_project(build_space(square(40), p, false), smooth), smooth);
    CHECK(e20 / e40 == doctest::Approx(std::pow(2.0, p + 1)).epsilon(0.15));
  }
}

TEST_CASE("constrained projection fixes boundary values") {
  const auto s = build_space(disc(32), 2, true);
  const FieldVector v = l2_project(s, smooth);
  for (std::size_t d : s->boundary_dofs()) CHECK(v.values[d] == 0.0);
  const ScalarFunction one = [](double, double) { return 1.0; };
  const FieldVector w = l2_project(s, one, one, 1e-14);
  for (double x : w.values) CHECK(std::abs(x - 1.0) < 1e-10);
}

TEST_CASE("p0 projection") {
  const auto m = disc(20);
  for (int p = 1; p <= 3; ++p) {
    const auto s = build_space(m, p, false);
    const FieldVector c = interpolate(s, [](double, double) { return 2.5; });
    for (double a : p0_project(*s, c.values)) CHECK(a == doctest::Approx(2.5).epsilon(1e-14));

    std::mt19937_64 rng(p);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector vals(s->num_dofs());
    for (double& x : vals) x = u(rng);
    const auto avg = p0_project(*s, vals);
    const FieldVector v(s, vals);
    // integral of v - P0 v vanishes on every cell
    const QuadratureRule& rule = quadrature_rule(QuadratureKind::triangle, 6);
    for (std::size_t t = 0; t < m->num_triangles(); ++t) {
      double integral = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) integral += 2.0 * rule.weights[q] * v.evaluate(t, rule.points[q]);
      CHECK(std::abs(integral - avg[t]) < 1e-12);
      if (p == 1) {
        const auto dofs = s->cell_dofs(t);
        CHECK(std::abs(avg[t] - (vals[dofs[0]] + vals[dofs[1]] + vals[dofs[2]]) / 3.0) < 1e-14);
      }
    }
  }
}
