#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sfol/errors.hpp"
#include "sfol/manifold.hpp"
#include "sfol/sampling.hpp"
#include "sfol/vector_field.hpp"

using namespace sfol;

namespace {

ChartManifold plane() { return ChartManifold("R2", {{"x"}, {"y"}}); }
ChartManifold cylinder() {
  return ChartManifold("cyl", {{"theta", CoordKind::Circle, 2 * std::numbers::pi}, {"y"}});
}
ChartManifold line() { return ChartManifold("R", {{"y"}}); }
ChartManifold circle() { return ChartManifold("S1", {{"theta", CoordKind::Circle, 2 * std::numbers::pi}}); }

VectorField field(const ChartManifold& m, const char* text) { return VectorField(m, parse_expr_list(text)); }

// Evaluates both fields at sample points and returns the max abs deviation.
double field_gap(const VectorField& a, const VectorField& b, int n = 20) {
  double worst = 0.0;
  const auto pts = region_samples(a.manifold(), SampleBox::cube(a.dim()), n);
  for (const auto& p : pts) {
    auto va = a(p);
    auto vb = b(p);
    for (std::size_t i = 0; i < va.size(); ++i) worst = std::max(worst, std::abs(va[i] - vb[i]));
  }
  return worst;
}

}  // namespace

TEST_CASE("diff examples") {
  auto m = plane();
  CHECK(numerically_equal(diff(parse_expr("x*y"), "x"), parse_expr("y"), m));
  CHECK(numerically_equal(diff(parse_expr("exp(x)"), "x"), parse_expr("exp(x)"), m));
  auto c = cylinder();
  CHECK(numerically_equal(diff(parse_expr("sin(theta)+y^2"), "y"), parse_expr("2*y"), c));
  CHECK_THROWS_AS(m.diff(parse_expr("x"), "z"), UnknownSymbol);
  // parameters are accepted by the name-checked variant
  CHECK(numerically_equal(m.diff(parse_expr("lambda*x"), "lambda", {{"lambda", 1.0}}), parse_expr("x"), m));
}

TEST_CASE("eval examples") {
  auto m = plane();
  CHECK(m.eval(parse_expr("y*exp(x)"), {0.0, 2.0}) == doctest::Approx(2.0).epsilon(1e-15));
  ChartManifold half("H", {{"x"}, {"y"}}, {{parse_expr("x")}});
  CHECK_THROWS_AS(half.eval(parse_expr("x"), {0.0, 1.0}), OutOfDomain);
  auto c = cylinder();
  CHECK(std::abs(c.eval(parse_expr("sin(theta)"), {std::numbers::pi / 2, 0.0}) - 1.0) < 1e-12);
  CHECK_THROWS_AS(m.eval(parse_expr("log(x)"), {-1.0, 0.0}), EvalError);
  CHECK_THROWS_AS(m.eval(parse_expr("z"), {0.0, 0.0}), UnknownSymbol);
}

TEST_CASE("parser") {
  auto m = plane();
  CHECK(numerically_equal(parse_expr("x^-1*x"), Expr(1.0), m));
  CHECK(numerically_equal(parse_expr("2^3 - 8 + x*(y - y)"), Expr(0.0), m));
  CHECK(numerically_equal(parse_expr("-x^2"), -(parse_expr("x") * parse_expr("x")), m));
  CHECK(numerically_equal(parse_expr("cos(pi)"), Expr(-1.0), m));
  CHECK_THROWS_AS(parse_expr("x +"), ParseError);
  CHECK_THROWS_AS(parse_expr("x^1.5"), ParseError);
  CHECK(parse_expr_list("1, y").size() == 2);
}

TEST_CASE("circle coordinates are normalized") {
  auto c = cylinder();
  auto p = c.normalize({-0.5, 1.0});
  CHECK(p[0] == doctest::Approx(2 * std::numbers::pi - 0.5));
  CHECK(c.distance({0.1, 0.0}, {2 * std::numbers::pi - 0.1, 0.0}) == doctest::Approx(0.2));
  // a non-periodic component is rejected
  CHECK_THROWS_AS(field(c, "theta, 0"), PreconditionFailed);
}

TEST_CASE("lie bracket examples") {
  auto m = plane();
  auto x = field(m, "1, 0");
  auto xx = field(m, "x, 0");
  CHECK(lie_bracket(x, x).is_symbolically_zero());
  CHECK(field_gap(lie_bracket(x, xx), x) < 1e-12);
  auto c = cylinder();
  auto z = lie_bracket(field(c, "1, y"), field(c, "0, y"));
  CHECK(field_gap(z, VectorField::zero(c)) < 1e-12);
  CHECK_THROWS_AS(lie_bracket(x, field(c, "1, 0")), ManifoldMismatch);
}

TEST_CASE("bracket properties on random fields") {
  auto m = plane();
  const char* pool[] = {"x*y, 1",        "sin(x), y^2",  "exp(y), x",     "1, cos(x*y)",
                        "x^2 - y, x*y", "y, -x",        "x^3, sin(y)",   "cos(y), exp(x)"};
  for (int i = 0; i < 8; ++i) {
    auto a = field(m, pool[i]);
    auto b = field(m, pool[(i + 1) % 8]);
    auto c = field(m, pool[(i + 3) % 8]);
    CHECK(field_gap(lie_bracket(a, b), Expr(-1.0) * lie_bracket(b, a)) < 1e-9);
    CHECK(field_gap(lie_bracket(a + c, b), lie_bracket(a, b) + lie_bracket(c, b)) < 1e-9);
    auto jac = lie_bracket(a, lie_bracket(b, c)) + lie_bracket(b, lie_bracket(c, a)) + lie_bracket(c, lie_bracket(a, b));
    CHECK(field_gap(jac, VectorField::zero(m)) < 1e-8);
  }
}

TEST_CASE("diff matches central differences") {
  auto m = plane();
  const char* exprs[] = {"x*y*exp(x)", "sin(x*y) + y^3", "log(x^2 + 1)*cos(y)", "x^-1 + y"};
  for (const char* text : exprs) {
    Expr e = parse_expr(text);
    Expr dx = diff(e, "x");
    for (const auto& p : region_samples(m, SampleBox{{0.2, -2.0}, {2.0, 2.0}}, 20)) {
      const double h = 1e-5;
      double fd = (m.eval(e, {p[0] + h, p[1]}) - m.eval(e, {p[0] - h, p[1]})) / (2 * h);
      double ex = m.eval(dx, p);
      CHECK(std::abs(fd - ex) <= 1e-6 * std::max(1.0, std::abs(ex)));
    }
  }
}

TEST_CASE("pushforward along projections") {
  auto c = cylinder();
  auto r = line();
  auto s1 = circle();
  SmoothMap to_y{c, r, {Expr::symbol("y")}};
  SmoothMap to_theta{c, s1, {Expr::symbol("theta")}};

  auto pf = pushforward_field(field(c, "1, y"), to_y);
  REQUIRE(std::holds_alternative<VectorField>(pf));
  CHECK(field_gap(std::get<VectorField>(pf), field(r, "y")) < 1e-12);

  auto bad = pushforward_field(field(c, "y, 0"), to_theta);
  REQUIRE(std::holds_alternative<NotProjectable>(bad));
  CHECK(std::get<NotProjectable>(bad).witness.has_value());

  auto vert = pushforward_field(field(c, "0, 1"), to_theta);
  REQUIRE(std::holds_alternative<VectorField>(vert));
  CHECK(std::get<VectorField>(vert).is_symbolically_zero());

  // spiral field projects to the full foliation on the circle
  auto spiral = pushforward_field(field(c, "1, 1"), to_theta);
  REQUIRE(std::holds_alternative<VectorField>(spiral));
  CHECK(field_gap(std::get<VectorField>(spiral), field(s1, "1")) < 1e-12);

  CHECK_THROWS_AS(pushforward_field(field(r, "y"), to_y), ManifoldMismatch);
}

TEST_CASE("pushforward by diffeomorphism") {
  auto m = plane();
  // rotation by a quarter turn maps d/dx to d/dy
  auto rot = parse_expr_list("-y, x");
  auto inv = parse_expr_list("y, -x");
  auto out = pushforward_by_diffeo(field(m, "1, 0"), rot, inv);
  CHECK(field_gap(out, field(m, "0, 1")) < 1e-12);
}
