#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfol/errors.hpp"
#include "sfol/lie2.hpp"
#include "sfol/lifted.hpp"

using namespace sfol;
using namespace fixtures;

namespace {

SubmersionQuotient cylinder_to_line() {
  SmoothMap pi{cylinder(), line(), parse_expr_list("y")};
  return SubmersionQuotient("cyl->R", pi, parse_expr_list("0, y"), {field(cylinder(), "1, 0")}, rotation_action());
}

double max_gap(const ChartManifold& m, const Point& a, const Point& b) {
  double w = 0.0;
  for (double v : m.difference(a, b)) w = std::max(w, std::abs(v));
  return w;
}

}  // namespace

TEST_CASE("crossed modules and semidirect products") {
  auto r = LieGroupModel::vector({"s"}, "R");
  auto r2 = LieGroupModel::vector({"u"}, "R'");
  auto direct = semidirect_product(CrossedModule::trivial(r, r2));
  CHECK(direct.axiom_check().passed());
  CHECK(direct.multiply({1.0, 2.0}, {3.0, -1.0}) == Point{4.0, 1.0});

  auto aff = affine_group();
  auto conj = semidirect_product(CrossedModule::conjugation(aff));
  CHECK(crossed_module_check(conj.crossed_module()).passed());
  CHECK(conj.axiom_check().passed());

  CrossedModule bad = CrossedModule::conjugation(aff);
  bad.act = [](const Point&, const Point& h) { return h; };
  CHECK_THROWS_AS(semidirect_product(bad), PreconditionFailed);

  auto u1 = LieGroupModel::circle("alpha", kTwoPi);
  auto l = semidirect_product(CrossedModule::conjugation(u1));
  CHECK(l.axiom_check().passed());
  // groupoid over G: (h2, h1 g) o (h1, g) = (h2 h1, g)
  auto c = l.groupoid().compose({0.5, 1.0 + 0.3}, {0.3, 1.0});
  CHECK(c[0] == doctest::Approx(0.8));
  CHECK(c[1] == doctest::Approx(1.0));
}

TEST_CASE("compute ideal examples") {
  auto spiral = module(cylinder(), {"1, 1"});
  CHECK(compute_ideal(spiral, *translation_action()).dim() == 0);
  auto cyl = module(cylinder(), {"1, y"});
  CHECK(compute_ideal(cyl, *rotation_action()).dim() == 0);
  auto pb = module(cylinder(), {"1, 0", "0, y"});
  auto ideal = compute_ideal(pb, *rotation_action());
  CHECK(ideal.dim() == 1);
  CHECK(ideal.closed);
  CHECK(ideal.residual < 1e-9);

  auto aff = affine_group();
  GroupAction on_line("aff", aff, line("u"), parse_expr_list("a*u + b"));
  auto translations = compute_ideal(module(line("u"), {"1"}), on_line);
  CHECK(translations.dim() == 2);
  auto none = compute_ideal(module(line("u"), {"0"}), on_line);
  CHECK(none.dim() == 0);
}

TEST_CASE("phi and the left action") {
  auto pb = module(cylinder(), {"1, 0", "0, y"});
  auto act = rotation_action();
  auto ideal = compute_ideal(pb, *act);
  auto e = phi({0.0}, {0.5, 1.0}, *act, pb, ideal);
  CHECK(e.empty());

  auto w = phi({0.7}, {0.5, 1.0}, *act, pb, ideal);
  REQUIRE(w.length() == 1);
  const auto& c = std::get<PathStep>(w.steps()[0]).coeffs;
  CHECK(c[0] == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(std::abs(c[1]) < 1e-12);
  CHECK(max_gap(cylinder(), w.target(), {1.2, 1.0}) < 1e-9);

  // morphism law
  auto lhs = phi({1.1}, {0.5, 1.0}, *act, pb, ideal);
  auto rhs = compose(phi({0.4}, act->act({0.7}, {0.5, 1.0}), *act, pb, ideal), phi({0.7}, {0.5, 1.0}, *act, pb, ideal));
  CHECK(equivalent(lhs, rhs));

  auto zero = compute_ideal(module(cylinder(), {"1, y"}), *act);
  CHECK_THROWS_AS(phi({0.7}, {0.5, 1.0}, *act, module(cylinder(), {"1, y"}), zero), PreconditionFailed);

  auto base = path_word(pb.generator_set(), {0.5, 1.0}, {0.0, 0.4});
  auto moved = left_action({0.3}, base, *act, pb, ideal);
  CHECK(moved.source() == base.source());
  CHECK(max_gap(cylinder(), moved.target(), act->act({0.3}, base.target())) < 1e-9);
  CHECK(equivalent(left_action({0.0}, base, *act, pb, ideal), base));
}

TEST_CASE("equivariance facts on the pullback case") {
  auto pb = module(cylinder(), {"1, 0", "0, y"});
  auto act = rotation_action();
  auto ideal = compute_ideal(pb, *act);
  const Point p{0.5, 1.0};
  for (double g : {0.4, -1.3}) {
    for (double h : {0.2, 2.5}) {
      auto lhs = lifted_action({g}, phi({h}, p, *act, pb, ideal), *act);
      auto rhs = phi(act->group().conj({g}, {h}), act->act({g}, p), *act, pb, ideal);
      CHECK(equivalent(lhs, rhs));
    }
  }
  auto w = path_word(pb.generator_set(), p, {0.3, -0.6});
  for (double h : {0.2, -0.9}) {
    auto lhs = lifted_action({h}, w, *act);
    auto rhs = compose(phi({h}, w.target(), *act, pb, ideal),
                       compose(w, phi({-h}, act->act({h}, w.source()), *act, pb, ideal)));
    CHECK(equivalent(lhs, rhs));
  }
}

TEST_CASE("two group action and star pullback") {
  auto q = cylinder_to_line();
  auto pb = module(cylinder(), {"1, 0", "0, y"});
  auto act = rotation_action();
  auto ideal = compute_ideal(pb, *act);
  auto l = semidirect_product(ideal_crossed_module(act->group(), ideal));
  WordAction star = [&](const Point& hg, const HolonomyWord& w) {
    return two_group_action(l, hg, w, *act, pb, ideal);
  };
  auto w = path_word(pb.generator_set(), {0.5, 1.0}, {0.3, 0.6});
  CHECK(equivalent(star(l.unit(), w), w));
  auto moved = star({0.4, 1.0}, w);
  CHECK(equivalent(xi(moved, q), xi(w, q)));

  // varphi((h,g) w) = (h,g) * varphi(w)
  for (const Point& hg : {Point{0.4, 1.0}, Point{-2.0, 0.3}}) {
    auto a = varphi(star(hg, w), q, pb);
    auto b = star_pullback(l, *act, hg, varphi(w, q, pb), q);
    CHECK(max_gap(cylinder(), a.target, b.target) < 1e-7);
    CHECK(max_gap(cylinder(), a.source, b.source) < 1e-7);
    CHECK(equivalent(a.down, b.down));
  }

  auto rep = word_action_axiom_check(star, l, *act, pb, 10);
  CHECK(rep.passed());

  SplitMix64 rng(3);
  auto flow = transformation_groupoid(
      GroupAction("scale", LieGroupModel::vector({"t"}, "R"), line(), parse_expr_list("y*exp(t)")));
  auto pg = pullback_groupoid(flow, q);
  FlatAction flat = [&](const Point& hg, const Arrow& a) { return star_pullback(l, *act, hg, a); };
  CHECK(action_axiom_check(flat, l, pg, *act).passed());
  auto arrow = pg.sample_from({0.5, 1.0}, rng);
  CHECK(pg.same(flat(l.unit(), arrow), arrow));

  FlatAction broken = [&](const Point& hg, const Arrow& a) { return star_pullback(l, *act, l.make({0.0}, l.g_part(hg)), a); };
  auto bad = action_axiom_check(broken, l, pg, *act);
  CHECK_FALSE(bad.passed());
  for (const auto& a : bad.assertions()) {
    if (a.name.starts_with("target")) CHECK_FALSE(a.pass);
    if (a.name.starts_with("group action")) CHECK(a.pass);
  }
  CHECK_THROWS_AS(star_pullback(l, *act, l.unit(), VarphiTriple{{0.0, 1.0}, identity_word(line(), {2.0}), {0.0, 2.0}}, q),
                  PreconditionFailed);
}

TEST_CASE("two group action with trivial ideal") {
  auto spiral = module(cylinder(), {"1, 1"});
  auto act = translation_action();
  auto ideal = compute_ideal(spiral, *act);
  auto l = semidirect_product(ideal_crossed_module(act->group(), ideal));
  CHECK(l.h_dim() == 0);
  WordAction star = [&](const Point& hg, const HolonomyWord& w) {
    return two_group_action(l, hg, w, *act, spiral, ideal);
  };
  CHECK(word_action_axiom_check(star, l, *act, spiral, 10).passed());
  auto w = path_word(spiral.generator_set(), {0.5, 1.0}, {0.8});
  CHECK(equivalent(star({0.7}, w), lifted_action({0.7}, w, *act)));
}
