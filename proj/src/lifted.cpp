#include "sfol/lifted.hpp"

#include <cstdio>

#include "sfol/errors.hpp"

namespace sfol {

namespace {

std::string label(const Point& g) {
  std::string s = "[";
  char buf[32];
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? "," : "", g[i]);
    s += buf;
  }
  return s + "]";
}

}  // namespace

HolonomyWord lifted_action(const Point& g, const HolonomyWord& w, const GroupAction& action) {
  if (!action.space().same_as(w.manifold())) throw ManifoldMismatch("lifted_action: action and word live on different manifolds");
  const auto& G = action.group();
  if (G.distance(g, G.unit()) == 0.0) return w;
  std::vector<Step> steps;
  std::map<const GeneratorSet*, GeneratorSetPtr> pushed;
  for (const auto& s : w.steps()) {
    if (const auto* ps = std::get_if<PathStep>(&s)) {
      auto& slot = pushed[ps->set.get()];
      if (!slot) {
        std::vector<VectorField> fields;
        for (const auto& x : ps->set->fields) fields.push_back(action.push(g, x));
        slot = make_generator_set(ps->set->name + "@" + label(g), std::move(fields));
      }
      steps.emplace_back(PathStep{slot, ps->coeffs});
    } else {
      const auto& ts = std::get<TwistStep>(s);
      steps.emplace_back(TwistStep{ts.action, ts.action->group().conj(g, ts.g)});
    }
  }
  return HolonomyWord(w.manifold(), action.act(g, w.source()), std::move(steps));
}

}  // namespace sfol
