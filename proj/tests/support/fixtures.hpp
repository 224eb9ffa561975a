#pragma once

// Small builders shared by the unit tests.

#include <numbers>

#include "sfol/foliation.hpp"
#include "sfol/group.hpp"
#include "sfol/vector_field.hpp"

namespace fixtures {

inline const double kTwoPi = 2 * std::numbers::pi;

inline sfol::ChartManifold line(const char* coord = "y") { return sfol::ChartManifold("R", {{coord}}); }
inline sfol::ChartManifold plane() { return sfol::ChartManifold("R2", {{"x"}, {"y"}}); }
inline sfol::ChartManifold cylinder() {
  return sfol::ChartManifold("cyl", {{"theta", sfol::CoordKind::Circle, kTwoPi}, {"y"}});
}
inline sfol::ChartManifold circle() {
  return sfol::ChartManifold("S1", {{"theta", sfol::CoordKind::Circle, kTwoPi}});
}
inline sfol::ChartManifold punctured() {
  return sfol::ChartManifold("P", {{"x"}, {"y"}},
                             {{sfol::parse_expr("x"), sfol::parse_expr("-x"), sfol::parse_expr("-y")}});
}

inline sfol::VectorField field(const sfol::ChartManifold& m, const char* text) {
  return sfol::VectorField(m, sfol::parse_expr_list(text));
}

inline sfol::FoliationModule module(const sfol::ChartManifold& m, std::initializer_list<const char*> gens,
                                    const char* name = "F") {
  std::vector<sfol::VectorField> v;
  for (const char* g : gens) v.push_back(field(m, g));
  return sfol::FoliationModule(name, v);
}

// Left action of U(1) on the cylinder by rotation of theta.
inline sfol::GroupActionPtr rotation_action() {
  auto g = sfol::LieGroupModel::circle("alpha", kTwoPi);
  return std::make_shared<sfol::GroupAction>("rot", g, cylinder(), sfol::parse_expr_list("theta + alpha, y"));
}

// Left action of (R,+) on the cylinder by vertical translation.
inline sfol::GroupActionPtr translation_action() {
  auto g = sfol::LieGroupModel::vector({"s"}, "R");
  return std::make_shared<sfol::GroupAction>("shift", g, cylinder(), sfol::parse_expr_list("theta, y + s"));
}

// The group of affine maps u -> a u + b, a > 0.
inline sfol::LieGroupModel affine_group() {
  sfol::ChartManifold chart("Aff", {{"a"}, {"b"}}, {{sfol::parse_expr("a")}});
  return sfol::LieGroupModel::generic("Aff", chart, sfol::parse_expr_list("a_l*a_r, a_l*b_r + b_l"),
                                      sfol::parse_expr_list("a^-1, -b*a^-1"), {1.0, 0.0});
}

}  // namespace fixtures
