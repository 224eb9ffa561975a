#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfol/errors.hpp"
#include "sfol/lifted.hpp"
#include "sfol/quotient.hpp"

using namespace sfol;
using namespace fixtures;

namespace {

double max_gap(const ChartManifold& m, const Point& a, const Point& b) {
  double w = 0.0;
  for (double v : m.difference(a, b)) w = std::max(w, std::abs(v));
  return w;
}

// pi(theta, y) = y, orbits of the rotation action.
SubmersionQuotient cylinder_to_line() {
  SmoothMap pi{cylinder(), line(), parse_expr_list("y")};
  return SubmersionQuotient("cyl->R", pi, parse_expr_list("0, y"), {field(cylinder(), "1, 0")}, rotation_action());
}

// pi(theta, y) = theta, orbits of the vertical translation.
SubmersionQuotient cylinder_to_circle() {
  SmoothMap pi{cylinder(), circle(), parse_expr_list("theta")};
  return SubmersionQuotient("cyl->S1", pi, parse_expr_list("theta, 0"), {field(cylinder(), "0, 1")},
                            translation_action());
}

}  // namespace

TEST_CASE("submersion validation") {
  CHECK(cylinder_to_line().validate().passed());
  CHECK(cylinder_to_circle().validate().passed());
  auto q = cylinder_to_line();
  CHECK(q.project({7.0, 2.5}) == Point{2.5});
  CHECK(max_gap(cylinder(), q.lift({1.5}), {0.0, 1.5}) == 0.0);

  SmoothMap pi{cylinder(), line(), parse_expr_list("y")};
  SubmersionQuotient bad("bad", pi, std::nullopt, {field(cylinder(), "0, 1")});
  CHECK_FALSE(bad.validate().passed());
}

TEST_CASE("invariance check examples") {
  CHECK(invariance_check(module(cylinder(), {"1, y"}), cylinder_to_line()).passed());
  CHECK(invariance_check(module(cylinder(), {"1, 1"}), cylinder_to_circle()).passed());

  SmoothMap pi{plane(), line("x"), parse_expr_list("x")};
  SubmersionQuotient q("R2->R", pi, parse_expr_list("x, 0"), {field(plane(), "0, 1")});
  auto rep = invariance_check(module(plane(), {"sin(y), 0"}), q);
  REQUIRE_FALSE(rep.passed());
  const auto& a = rep.assertions().front();
  REQUIRE(a.witness.is_array());
  CHECK(std::abs(std::sin(a.witness[1].get<double>())) < 1e-9);
}

TEST_CASE("pushforward foliation examples") {
  auto q = cylinder_to_line();
  auto fm = pushforward_foliation(module(cylinder(), {"1, y"}), q);
  REQUIRE(fm.module.size() == 1);
  CHECK(numerically_equal(fm.module.generators()[0].components()[0], parse_expr("y"), line()));
  CHECK(tangent_dim(fm.module, {0.0}) == 0);
  CHECK(tangent_dim(fm.module, {1.0}) == 1);

  auto fs = pushforward_foliation(module(cylinder(), {"1, 1"}), cylinder_to_circle());
  CHECK(numerically_equal(fs.module.generators()[0].components()[0], Expr(1.0), circle()));

  auto fz = pushforward_foliation(module(cylinder(), {"1, 0"}), q);
  CHECK(fz.module.is_zero());

  SmoothMap pi{plane(), line("x"), parse_expr_list("x")};
  SubmersionQuotient qp("R2->R", pi, parse_expr_list("x, 0"), {field(plane(), "0, 1")});
  CHECK_THROWS_AS(pushforward_foliation(module(plane(), {"y, 0"}), qp), PreconditionFailed);
}

TEST_CASE("pullback foliation examples") {
  auto q = cylinder_to_line();
  auto fm = module(line(), {"y"});
  auto pb = pullback_foliation(fm, q);
  CHECK(pb.size() == 2);
  CHECK(hull_membership(field(cylinder(), "1, 0"), pb).pass);
  CHECK(hull_membership(field(cylinder(), "0, y"), pb).pass);
  CHECK(tangent_dim(pb, {0.3, 0.0}) == 1);
  CHECK(tangent_dim(pb, {0.3, 1.0}) == 2);
  // round trip
  auto back = pushforward_foliation(pb, q);
  for (double y : {-2.0, 0.0, 0.5}) CHECK(tangent_dim(back.module, {y}) == tangent_dim(fm, {y}));

  auto zero = pullback_foliation(module(line(), {"0"}), q);
  CHECK(tangent_dim(zero, {1.0, 1.0}) == 1);
  auto full = pullback_foliation(module(line(), {"1"}), q);
  for (double y : {-1.0, 0.0, 2.0}) CHECK(tangent_dim(full, {0.5, y}) == 2);

  SmoothMap pi{cylinder(), line(), parse_expr_list("y")};
  SubmersionQuotient nosec("nosec", pi, std::nullopt, {field(cylinder(), "1, 0")});
  auto lifted = pullback_foliation(fm, nosec);
  CHECK(hull_membership(field(cylinder(), "0, y"), lifted).pass);
  CHECK(tangent_dim(lifted, {0.3, 0.0}) == 1);

  SmoothMap sum{plane(), line(), parse_expr_list("x + y")};
  SubmersionQuotient skew("skew", sum, std::nullopt, {field(plane(), "1, -1")});
  CHECK_THROWS_AS(pullback_foliation(fm, skew), PreconditionFailed);
}

TEST_CASE("xi on words") {
  auto q = cylinder_to_line();
  auto f = module(cylinder(), {"1, y"});
  auto w = path_word(f.generator_set(), {0.4, 1.0}, {0.7});
  auto d = xi(w, q);
  CHECK(d.source() == Point{1.0});
  CHECK(std::get<PathStep>(d.steps()[0]).coeffs[0] == 0.7);
  CHECK(std::abs(d.target()[0] - q.project(w.target())[0]) < 1e-6);
  CHECK(std::abs(d.target()[0] - std::exp(0.7)) < 1e-7);

  auto e = xi(identity_word(cylinder(), {0.4, 1.0}), q);
  CHECK(e.empty());
  CHECK(e.source() == Point{1.0});

  auto w2 = path_word(f.generator_set(), w.target(), {-0.3});
  CHECK(equivalent(xi(compose(w2, w), q), compose(xi(w2, q), xi(w, q))));
  CHECK(equivalent(xi(invert(w), q), invert(xi(w, q))));
}

TEST_CASE("kernel test on the spiral") {
  auto q = cylinder_to_circle();
  auto f = module(cylinder(), {"1, 1"});
  const double pi = std::numbers::pi;
  const bool expected[] = {true, false, true, false, true};
  for (int i = 0; i < 5; ++i) {
    auto w = path_word(f.generator_set(), {0.5, 0.2}, {i * pi});
    CHECK(kernel_test(w, q).in_kernel == expected[i]);
  }
  CHECK(kernel_test(identity_word(cylinder(), {0.5, 0.2}), q).in_kernel);
  auto k = path_word(f.generator_set(), {0.5, 0.2}, {2 * pi});
  CHECK(equivalent(xi(k, q), identity_word(circle(), {0.5})));
  CHECK_FALSE(equivalent(k, identity_word(cylinder(), {0.5, 0.2})));
}

TEST_CASE("xi fiber test") {
  auto q = cylinder_to_circle();
  auto f = module(cylinder(), {"1, 1"});
  const double pi = std::numbers::pi;
  auto w1 = path_word(f.generator_set(), {0.5, 0.2}, {1.0});
  auto w2 = path_word(f.generator_set(), {0.5, -1.3}, {1.0 + 2 * pi});
  auto r = xi_fiber_test(w1, w2, q);
  CHECK(r.agree());
  CHECK(r.value());
  REQUIRE(r.g);
  CHECK((*r.g)[0] == doctest::Approx(-1.5).epsilon(1e-9));

  auto w3 = path_word(f.generator_set(), {0.5, -1.3}, {1.0 + pi});
  auto r3 = xi_fiber_test(w1, w3, q);
  CHECK(r3.agree());
  CHECK_FALSE(r3.value());

  auto lifted = lifted_action({0.8}, w1, *q.action());
  auto r4 = xi_fiber_test(w1, lifted, q);
  CHECK(r4.agree());
  CHECK(r4.value());

  auto other = path_word(f.generator_set(), {1.5, 0.2}, {1.0});
  CHECK_FALSE(xi_fiber_test(w1, other, q).value());

  auto qr = cylinder_to_line();
  auto fr = module(cylinder(), {"1, y"});
  auto a = path_word(fr.generator_set(), {0.5, 0.7}, {0.4});
  auto b = lifted_action({2.0}, a, *qr.action());
  auto rr = xi_fiber_test(a, b, qr);
  CHECK(rr.agree());
  CHECK(rr.value());
}

TEST_CASE("varphi examples") {
  auto q = cylinder_to_line();
  auto f = module(cylinder(), {"1, 0", "0, y"});
  auto e = varphi(identity_word(cylinder(), {0.3, 1.0}), q, f);
  CHECK(e.down.empty());
  CHECK(e.target == e.source);

  auto v = varphi(path_word(f.generator_set(), {0.3, 1.0}, {1.2, 0.0}), q, f);
  CHECK(max_gap(cylinder(), v.target, {1.5, 1.0}) < 1e-8);
  CHECK(equivalent(v.down, identity_word(line(), {1.0})));

  auto h = varphi(path_word(f.generator_set(), {0.3, 1.0}, {0.0, 0.6}), q, f);
  CHECK(max_gap(cylinder(), h.target, {0.3, std::exp(0.6)}) < 1e-7);
  CHECK(h.down.source() == Point{1.0});
  CHECK(std::abs(h.down.target()[0] - std::exp(0.6)) < 1e-7);

  auto g = module(cylinder(), {"1, y"});
  CHECK_THROWS_AS(varphi(identity_word(cylinder(), {0.3, 1.0}), q, g), PreconditionFailed);
}

TEST_CASE("fibration check examples") {
  SmoothMap pi{punctured(), line("x"), parse_expr_list("x")};
  SubmersionQuotient qp("punct->R", pi, std::nullopt, {field(punctured(), "0, 1")});
  auto f = module(punctured(), {"1, 0"});
  auto push = pushforward_foliation(f, qp);
  auto zeta = path_word(push.module.generator_set(), {1.0}, {-2.0});
  auto rep = fibration_check(qp, f, {{zeta, {1.0, 1.0}}});
  CHECK_FALSE(rep.passed());
  bool witness_failed = false;
  for (const auto& a : rep.assertions()) {
    if (a.name == "witness pair realizable") witness_failed = !a.pass;
  }
  CHECK(witness_failed);

  auto qs = cylinder_to_circle();
  CHECK(fibration_check(qs, module(cylinder(), {"1, 1"})).passed());

  auto ql = cylinder_to_line();
  CHECK(fibration_check(ql, module(cylinder(), {"1, 0", "0, y"})).passed());
}

TEST_CASE("product foliation assumption") {
  CHECK(product_foliation_assumption_check(cylinder_to_line(), module(cylinder(), {"1, y"})).passed());
  CHECK(product_foliation_assumption_check(cylinder_to_circle(), module(cylinder(), {"1, 1"})).passed());

  auto so2 = LieGroupModel::circle("alpha", kTwoPi, "SO(2)");
  auto rot = std::make_shared<GroupAction>("rot", so2, plane(),
                                           parse_expr_list("cos(alpha)*x - sin(alpha)*y, sin(alpha)*x + cos(alpha)*y"));
  SmoothMap pi{plane(), line("x"), parse_expr_list("x")};
  SubmersionQuotient q("R2->R", pi, parse_expr_list("x, 0"), {field(plane(), "0, 1")}, rot);
  auto rep = product_foliation_assumption_check(q, module(plane(), {"1, 0"}));
  REQUIRE_FALSE(rep.passed());
  bool has_g = false;
  for (const auto& a : rep.assertions()) {
    if (!a.pass && a.witness.contains("g")) has_g = true;
  }
  CHECK(has_g);
}
