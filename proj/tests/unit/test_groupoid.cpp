#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfol/errors.hpp"
#include "sfol/groupoid.hpp"

using namespace sfol;
using namespace fixtures;

namespace {

GroupAction scaling_flow() {
  return GroupAction("scale", LieGroupModel::vector({"t"}, "R"), line(), parse_expr_list("y*exp(t)"));
}

SubmersionQuotient cylinder_to_line() {
  SmoothMap pi{cylinder(), line(), parse_expr_list("y")};
  return SubmersionQuotient("cyl->R", pi, parse_expr_list("0, y"), {field(cylinder(), "1, 0")}, rotation_action());
}

}  // namespace

TEST_CASE("transformation groupoid") {
  auto h = transformation_groupoid(scaling_flow());
  CHECK(structure_check(h).passed());
  auto a1 = Arrow{0.3, 2.0};
  auto a2 = Arrow{-1.1, h.t(a1)[0]};
  auto c = h.compose(a2, a1);
  CHECK(c[0] == doctest::Approx(-0.8));
  CHECK(c[1] == 2.0);
  CHECK(h.t(c)[0] == doctest::Approx(2.0 * std::exp(-0.8)));
  CHECK_THROWS_AS(h.compose(Arrow{1.0, 5.0}, a1), PreconditionFailed);

  auto trivial = LieGroupModel::vector({}, "1");
  auto u = transformation_groupoid(GroupAction("id", trivial, line(), parse_expr_list("y")));
  CHECK(structure_check(u).passed());
  CHECK(u.t(Arrow{1.5})[0] == 1.5);

  CHECK(structure_check(transformation_groupoid(*rotation_action())).passed());
  CHECK(structure_check(transformation_groupoid(
                            GroupAction("aff", affine_group(), line("u"), parse_expr_list("a*u + b"))))
            .passed());
}

TEST_CASE("pair and unit groupoids") {
  CHECK(structure_check(pair_groupoid(cylinder())).passed());
  CHECK(structure_check(unit_groupoid(plane())).passed());
}

TEST_CASE("pullback groupoid") {
  auto q = cylinder_to_line();
  auto pu = pullback_groupoid(unit_groupoid(line()), q);
  CHECK(structure_check(pu).passed());
  SplitMix64 rng(4);
  for (int i = 0; i < 10; ++i) {
    auto a = pu.sample_from({0.5, 1.5}, rng);
    CHECK(q.project(pu.t(a)) == q.project(pu.s(a)));
  }

  auto pp = pullback_groupoid(pair_groupoid(line()), q);
  CHECK(structure_check(pp).passed());
  // (p, (m2, m1), q) <-> (p, q)
  auto pair = pair_groupoid(cylinder());
  ArrowMap to_pair = [](const Arrow& a) { return Arrow{a[0], a[1], a[4], a[5]}; };
  CHECK(groupoid_morphism_check(to_pair, pp, pair, [](const Point& p) { return p; }).passed());

  auto ph = pullback_groupoid(transformation_groupoid(scaling_flow()), q);
  CHECK(structure_check(ph).passed());
  CHECK(ph.arrows.dim() == 2 * q.P().dim() + 2);
  CHECK_THROWS_AS(check_pullback_arrow(ph, transformation_groupoid(scaling_flow()), q, {0.0, 1.0, 0.5, 1.0, 0.0, 1.0}),
                  PreconditionFailed);
  check_pullback_arrow(ph, transformation_groupoid(scaling_flow()), q, {0.0, std::exp(0.5), 0.5, 1.0, 2.0, 1.0});
}

TEST_CASE("semidirect groupoid") {
  auto units = unit_groupoid(cylinder());
  GroupoidAutomorphismAction a{*translation_action(), [](const Point& g, const Arrow& x) {
                                 return translation_action()->act(g, x);
                               }};
  auto sd = semidirect_groupoid(units, a);
  CHECK(structure_check(sd).passed());
  // collapses to the transformation groupoid: (p, g) has source g^-1 p and target p
  auto arrow = Arrow{0.5, 1.0, 2.0};
  CHECK(sd.s(arrow) == Point{0.5, -1.0});
  CHECK(sd.t(arrow) == Point{0.5, 1.0});

  auto trivial = LieGroupModel::vector({}, "1");
  auto flow = transformation_groupoid(scaling_flow());
  GroupoidAutomorphismAction none{GroupAction("id", trivial, line(), parse_expr_list("y")),
                                  [](const Point&, const Arrow& x) { return x; }};
  auto same = semidirect_groupoid(flow, none);
  CHECK(structure_check(same).passed());
  CHECK(same.t(Arrow{0.4, 1.0})[0] == doctest::Approx(std::exp(0.4)));

  GroupoidAutomorphismAction broken{*translation_action(),
                                    [](const Point& g, const Arrow& x) { return Arrow{x[0] + g[0], x[1]}; }};
  CHECK_THROWS_AS(semidirect_groupoid(units, broken), PreconditionFailed);
}

TEST_CASE("morphism check") {
  auto q = cylinder_to_line();
  auto up = transformation_groupoid(GroupAction("flow", LieGroupModel::vector({"t"}, "R"), cylinder(),
                                                parse_expr_list("theta + t, y*exp(t)")));
  auto down = transformation_groupoid(scaling_flow());
  ObjectMap pi = [q](const Point& p) { return q.project(p); };
  ArrowMap xi_model = [](const Arrow& a) { return Arrow{a[0], a[2]}; };
  CHECK(groupoid_morphism_check(xi_model, up, down, pi).passed());
  CHECK(groupoid_morphism_check([](const Arrow& a) { return a; }, up, up, [](const Point& p) { return p; }).passed());

  ArrowMap shifted = [](const Arrow& a) { return Arrow{a[0] + 1.0, a[2]}; };
  auto rep = groupoid_morphism_check(shifted, up, down, pi);
  CHECK_FALSE(rep.passed());
  for (const auto& a : rep.assertions()) {
    if (a.name == "units") CHECK_FALSE(a.pass);
  }
}

TEST_CASE("normal subgroupoid systems") {
  auto n = spiral_system(1.0);
  CHECK(nss_check(n).passed());

  NormalSubgroupoidSystem all = n;
  all.in_k = [](const Arrow&) { return true; };
  all.related = [](const Point&, const Point&) { return true; };
  all.related_point = [](const Point&, SplitMix64& rng) { return Point{rng.uniform(0.0, 6.0), rng.uniform(-2.0, 2.0)}; };
  all.theta = [h = n.h](const Point& p, const Point&, const Arrow&) { return h.identity(p); };
  CHECK(nss_check(all).passed());

  NormalSubgroupoidSystem bent = n;
  bent.in_k = [h = n.h](const Arrow& a) { return h.gap(a, h.identity(h.s(a))) <= 1e-9; };
  bent.theta = [](const Point& p, const Point&, const Arrow& xi) {
    return Arrow{xi[0] + (xi[0] > 1.0 ? kTwoPi : 0.0), p[0], p[1]};
  };
  NssWitness w{{0.3, 1.0}, {0.3, -0.5}, {0.8, 0.0, 0.0}, {0.8, 0.3, -0.5}};
  w.xi1 = Arrow{0.8, 1.1, 0.3};
  auto rep = nss_check(bent, 20, 17, {w});
  CHECK_FALSE(rep.passed());
  for (const auto& a : rep.assertions()) {
    if (a.name.starts_with("condition 3")) {
      CHECK_FALSE(a.pass);
      CHECK(a.witness["xi1"][0].get<double>() == 0.8);
    } else {
      CHECK(a.pass);
    }
  }
}

TEST_CASE("spiral quotient model") {
  auto m = spiral_quotient_model();
  CHECK(m.report.passed());
  auto c = m.cls({7.0, 1.0, 3.0});
  CHECK(c[0] == doctest::Approx(7.0 - kTwoPi));
  CHECK(c[1] == 1.0);
  CHECK(m.quotient.same(m.cls(Arrow{0.0, 2.0, -1.0}), m.quotient.identity({2.0})));
  CHECK(m.quotient.same(m.cls(Arrow{kTwoPi, 2.0, -1.0}), m.quotient.identity({2.0})));
}
