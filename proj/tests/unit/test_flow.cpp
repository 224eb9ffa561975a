#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sfol/errors.hpp"
#include "sfol/flow.hpp"

using namespace sfol;

namespace {

const double kTwoPi = 2 * std::numbers::pi;

ChartManifold plane() { return ChartManifold("R2", {{"x"}, {"y"}}); }
ChartManifold cylinder() { return ChartManifold("cyl", {{"theta", CoordKind::Circle, kTwoPi}, {"y"}}); }
ChartManifold punctured() {
  // the plane minus the closed upper half of the y axis
  return ChartManifold("P", {{"x"}, {"y"}}, {{parse_expr("x"), parse_expr("-x"), parse_expr("-y")}});
}

VectorField field(const ChartManifold& m, const char* text) { return VectorField(m, parse_expr_list(text)); }

double wrapped_gap(const ChartManifold& m, const Point& a, const Point& b) { return m.distance(a, b); }

}  // namespace

TEST_CASE("flow examples") {
  auto c = cylinder();
  auto x = field(c, "1, y");
  auto r = flow(x, {0.0, 1.0}, std::log(2.0));
  CHECK(r.ok());
  CHECK(std::abs(r.endpoint[0] - std::log(2.0)) < 1e-6);
  CHECK(std::abs(r.endpoint[1] - 2.0) < 1e-6);

  auto z = flow(x, {0.3, -0.7}, 0.0);
  CHECK(z.endpoint == Point{0.3, -0.7});

  auto p = punctured();
  auto exit = flow(field(p, "1, 0"), {1.0, 1.0}, -2.0);
  CHECK(exit.status == FlowStatus::LeftDomain);
  CHECK(std::abs(exit.tau + 1.0) < 1e-8);
  CHECK(exit.tau > -1.0);
  CHECK(p.contains(exit.endpoint));
  // below the removed half-line the horizontal flow passes
  auto below = flow(field(p, "1, 0"), {1.0, -1.0}, -2.0);
  CHECK(below.ok());
  CHECK(std::abs(below.endpoint[0] + 1.0) < 1e-9);
}

TEST_CASE("closed-form cylinder flow on t in [-2,2]") {
  auto c = cylinder();
  auto x = field(c, "1, y");
  for (double t = -2.0; t <= 2.0; t += 0.25) {
    Point p{1.0, 0.5};
    auto r = flow(x, p, t);
    REQUIRE(r.ok());
    Point expect = c.normalize({p[0] + t, std::exp(t) * p[1]});
    CHECK(wrapped_gap(c, r.endpoint, expect) < 1e-6);
  }
}

TEST_CASE("step failure on blow-up") {
  ChartManifold r("R", {{"x"}});
  auto res = flow(VectorField(r, {parse_expr("x^2")}), {1.0}, 2.0);
  CHECK(res.status == FlowStatus::StepFailure);
  CHECK(res.tau < 1.0);
}

TEST_CASE("exp_combination examples") {
  auto c = cylinder();
  std::vector<VectorField> one{field(c, "1, y")};
  std::vector<double> zero{0.0};
  CHECK(exp_combination(zero, one, {0.5, 1.0}).endpoint == Point{0.5, 1.0});
  std::vector<double> t{0.7};
  auto a = exp_combination(t, one, {0.0, 1.0});
  auto b = flow(one[0], {0.0, 1.0}, 0.7);
  CHECK(c.distance(a.endpoint, b.endpoint) < 1e-9);

  auto p = plane();
  std::vector<VectorField> xy{field(p, "1, 0"), field(p, "0, 1")};
  std::vector<double> v{1.0, 1.0};
  auto r = exp_combination(v, xy, {0.0, 0.0});
  CHECK(std::abs(r.endpoint[0] - 1.0) < 1e-9);
  CHECK(std::abs(r.endpoint[1] - 1.0) < 1e-9);
  std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(exp_combination(wrong, xy, {0.0, 0.0}), DimensionMismatch);
}

TEST_CASE("flow composition and inversion") {
  auto p = plane();
  const char* pool[] = {"y, -x", "1, x*y", "sin(y), cos(x)", "x - y, x + y", "exp(-x^2), 1"};
  for (const char* text : pool) {
    auto x = field(p, text);
    auto minus = VectorField(p, {-x.components()[0], -x.components()[1]});
    for (double s : {0.3, -0.4}) {
      Point q{0.4, -0.2};
      auto a = flow(x, flow(x, q, s).endpoint, 0.5);
      auto b = flow(x, q, s + 0.5);
      CHECK(p.distance(a.endpoint, b.endpoint) < 1e-6);
      auto back = flow(minus, flow(x, q, s).endpoint, s);
      CHECK(p.distance(back.endpoint, q) < 1e-6);
    }
  }
}

TEST_CASE("trajectory recording") {
  auto c = cylinder();
  FlowOptions o;
  o.record = true;
  auto r = flow(field(c, "1, y"), {0.0, 1.0}, 1.0, o);
  CHECK(r.trajectory.size() > 2);
  CHECK(r.trajectory.front() == Point{0.0, 1.0});
}

TEST_CASE("leaf_sample examples") {
  auto p = punctured();
  FoliationModule dx("F", {field(p, "1, 0")});
  auto above = leaf_sample(dx, {1.0, 1.0}, 10000);
  CHECK_FALSE(above.reached({-1.0, 1.0}, 0.05));
  for (const auto& q : above.points()) CHECK(q[0] > 0.0);
  auto below = leaf_sample(dx, {1.0, -1.0}, 10000);
  CHECK(below.reached({-1.0, -1.0}, 0.05));

  auto c = cylinder();
  FoliationModule f("F", {field(c, "1, y")});
  auto mid = leaf_sample(f, {0.0, 0.0}, 2000);
  CHECK(mid.points().size() > 10);
  for (const auto& q : mid.points()) CHECK(std::abs(q[1]) < 1e-6);
  // regular leaves keep tangent dimension 1
  auto upper = leaf_sample(f, {0.0, 1.0}, 300);
  for (const auto& q : upper.points()) CHECK(tangent_dim(f, q) == 1);
  // deterministic
  auto again = leaf_sample(f, {0.0, 1.0}, 300);
  CHECK(again.points() == upper.points());
}
