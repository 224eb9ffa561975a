#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfol/errors.hpp"
#include "sfol/group.hpp"

using namespace sfol;
using namespace fixtures;

TEST_CASE("group models satisfy the axioms") {
  CHECK(LieGroupModel::vector({"s", "u"}).axiom_defect() < 1e-9);
  CHECK(LieGroupModel::circle("alpha", kTwoPi).axiom_defect() < 1e-9);
  CHECK(affine_group().axiom_defect() < 1e-9);
}

TEST_CASE("circle group wraps") {
  auto g = LieGroupModel::circle("alpha", kTwoPi);
  auto p = g.multiply({4.0}, {3.0});
  CHECK(p[0] == doctest::Approx(7.0 - kTwoPi));
  CHECK(g.inverse({1.0})[0] == doctest::Approx(kTwoPi - 1.0));
}

TEST_CASE("affine group exponential and bracket") {
  auto g = affine_group();
  // exp(u, v) = (e^u, v (e^u - 1)/u)
  auto e = g.exp({0.5, 2.0});
  CHECK(e[0] == doctest::Approx(std::exp(0.5)).epsilon(1e-8));
  CHECK(e[1] == doctest::Approx(2.0 * (std::exp(0.5) - 1.0) / 0.5).epsilon(1e-8));
  // [x_a, x_b] = x_b in the basis (d/da, d/db)
  auto br = g.bracket({1.0, 0.0}, {0.0, 1.0});
  CHECK(br[0] == doctest::Approx(0.0));
  CHECK(br[1] == doctest::Approx(1.0));
  auto c = g.conj({2.0, 1.0}, {3.0, 0.0});
  // g h g^-1 = (3, 1 - 3)
  CHECK(c[0] == doctest::Approx(3.0));
  CHECK(c[1] == doctest::Approx(-2.0));
}

TEST_CASE("actions and their generators") {
  auto rot = rotation_action();
  auto d = rot->axiom_defects();
  CHECK(d.unit < 1e-12);
  CHECK(d.compatibility < 1e-9);
  CHECK(d.generator < 1e-4);
  CHECK(d.freeness > 0.1);
  auto v = rot->generator({1.0});
  auto val = v({0.3, 2.0});
  CHECK(val[0] == doctest::Approx(1.0));
  CHECK(val[1] == doctest::Approx(0.0));
  auto moved = rot->act({1.0}, {kTwoPi - 0.5, 2.0});
  CHECK(moved[0] == doctest::Approx(0.5));

  auto sh = translation_action();
  CHECK(sh->axiom_defects().compatibility < 1e-12);
  CHECK(sh->basis_generators()[0]({0.0, 0.0})[1] == doctest::Approx(1.0));

  // pushforward under a group element leaves invariant fields alone
  auto x = field(cylinder(), "1, y");
  auto pushed = rot->push({0.7}, x);
  for (const auto& p : region_samples(cylinder(), SampleBox::cube(2), 20)) {
    CHECK(pushed(p)[0] == doctest::Approx(x(p)[0]));
    CHECK(pushed(p)[1] == doctest::Approx(x(p)[1]));
  }
  CHECK_THROWS_AS(GroupAction("bad", LieGroupModel::vector({"y"}), cylinder(), parse_expr_list("theta, y")),
                  PreconditionFailed);
}

TEST_CASE("affine group acting on the line") {
  auto g = affine_group();
  GroupAction act("aff", g, line("u"), parse_expr_list("a*u + b"));
  auto d = act.axiom_defects();
  CHECK(d.compatibility < 1e-9);
  CHECK(d.generator < 1e-4);
}
