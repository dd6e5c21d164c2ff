#include "cipimex/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cipimex/errors.hpp"

namespace cipimex {

namespace {

// Symmetric orbits in barycentric coordinates; weights normalised to sum 1.
struct RuleBuilder {
  QuadratureRule rule;

  explicit RuleBuilder(int degree) {
    rule.kind = QuadratureKind::triangle;
    rule.exact_degree = degree;
  }

  void add(double l1, double l2, double w) {
    rule.points.push_back({l1, l2});
    rule.weights.push_back(0.5 * w);
  }
  void s3(double w) { add(1.0 / 3.0, 1.0 / 3.0, w); }
  void s21(double a, double w) {
    const double b = 1.0 - 2.0 * a;
    add(a, a, w);
    add(b, a, w);
    add(a, b, w);
  }
  void s111(double a, double b, double w) {
    const double c = 1.0 - a - b;
    add(a, b, w);
    add(b, a, w);
    add(b, c, w);
    add(c, b, w);
    add(c, a, w);
    add(a, c, w);
  }
};

// Dunavant rules of degree 1, 2, 4, 5, 6, 8 (all weights positive).
std::vector<QuadratureRule> make_triangle_rules() {
  std::vector<QuadratureRule> rules(9);
  {
    RuleBuilder r(1);
    r.s3(1.0);
    rules[1] = r.rule;
  }
  {
    RuleBuilder r(2);
    r.s21(1.0 / 6.0, 1.0 / 3.0);
    rules[2] = r.rule;
  }
  {
    RuleBuilder r(4);
    r.s21(0.445948490915965, 0.223381589678011);
    r.s21(0.091576213509771, 0.109951743655322);
    rules[4] = r.rule;
  }
  {
    RuleBuilder r(5);
    r.s3(0.225);
    r.s21(0.470142064105115, 0.132394152788506);
    r.s21(0.101286507323456, 0.125939180544827);
    rules[5] = r.rule;
  }
  {
    RuleBuilder r(6);
    r.s21(0.249286745170910, 0.116786275726379);
    r.s21(0.063089014491502, 0.050844906370207);
    r.s111(0.053145049844817, 0.310352451033784, 0.082851075618374);
    rules[6] = r.rule;
  }
  {
    RuleBuilder r(8);
    r.s3(0.144315607677787);
    r.s21(0.459292588292723, 0.095091634267285);
    r.s21(0.170569307751760, 0.103217370534718);
    r.s21(0.050547228317031, 0.032458497623198);
    r.s111(0.008394777409958, 0.263112829634638, 0.027230314174435);
    rules[8] = r.rule;
  }
  // degrees without a dedicated table use the next richer rule
  rules[0] = rules[1];
  rules[3] = rules[4];
  rules[7] = rules[8];
  return rules;
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.kind = QuadratureKind::edge;
  rule.exact_degree = 2 * n - 1;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Newton on P_n starting from the Chebyshev-like guess
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      const double pn = (n == 1) ? x : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1], ascending order
    rule.points[n - 1 - i] = {0.5 * (x + 1.0), 0.0};
    rule.weights[n - 1 - i] = 0.5 * w;
  }
  return rule;
}

const QuadratureRule& quadrature_rule(QuadratureKind kind, int exact_degree) {
  static const std::vector<QuadratureRule> triangle_rules = make_triangle_rules();
  static const std::vector<QuadratureRule> edge_rules = [] {
    std::vector<QuadratureRule> r;
    for (int n = 1; n <= 6; ++n) r.push_back(gauss_legendre(n));
    return r;
  }();

  if (exact_degree < 0) throw InvalidArgument("quadrature_rule: negative degree");
  if (kind == QuadratureKind::triangle) {
    if (exact_degree > 8) {
      throw Unsupported("triangle quadrature of degree " + std::to_string(exact_degree) + " (max 8)");
    }
    return triangle_rules[exact_degree];
  }
  if (exact_degree > 11) {
    throw Unsupported("edge quadrature of degree " + std::to_string(exact_degree) + " (max 11)");
  }
  const int n = std::max(1, (exact_degree + 2) / 2);
  return edge_rules[n - 1];
}

}  // namespace cipimex
