#include "sfol/group.hpp"

#include <cmath>
#include <limits>

#include "sfol/errors.hpp"
#include "sfol/flow.hpp"

namespace sfol {

struct LieGroupModel::Impl {
  std::string name;
  Kind kind = Kind::Vector;
  ChartManifold chart;
  std::vector<std::string> names;
  std::vector<Expr> mul;
  std::vector<Expr> inv;
  Point unit;
  std::optional<std::vector<Expr>> exp;
  std::vector<Program> mul_prog;
  std::vector<Program> inv_prog;
  std::vector<Program> exp_prog;
  std::vector<VectorField> left_invariant;  // L_j = d/db_j (g b) at b = e
};

namespace {

std::vector<std::string> suffixed(const std::vector<std::string>& names, const std::string& suffix) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(n + suffix);
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

std::vector<VectorField> left_invariant_fields(const ChartManifold& chart, const std::vector<std::string>& names,
                                               const std::vector<Expr>& mul, const Point& unit) {
  std::map<std::string, Expr> at;
  for (std::size_t i = 0; i < names.size(); ++i) {
    at.emplace(names[i] + "_r", Expr(unit[i]));
    at.emplace(names[i] + "_l", Expr::symbol(names[i]));
  }
  std::vector<VectorField> out;
  for (std::size_t j = 0; j < names.size(); ++j) {
    std::vector<Expr> comps;
    for (const auto& m : mul) comps.push_back(substitute(diff(m, names[j] + "_r"), at));
    out.emplace_back(chart, comps);
  }
  return out;
}

}  // namespace

LieGroupModel LieGroupModel::vector(std::vector<std::string> coords, std::string name) {
  std::vector<Coordinate> cs;
  std::vector<Expr> mul, inv;
  for (const auto& c : coords) {
    cs.push_back({c});
    mul.push_back(Expr::symbol(c + "_l") + Expr::symbol(c + "_r"));
    inv.push_back(-Expr::symbol(c));
  }
  auto g = generic(std::move(name), ChartManifold("G", cs), mul, inv, Point(coords.size(), 0.0), std::vector<Expr>{});
  auto impl = std::make_shared<Impl>(*g.impl_);
  impl->kind = Kind::Vector;
  impl->exp.reset();
  g.impl_ = impl;
  return g;
}

LieGroupModel LieGroupModel::circle(std::string coord, double period, std::string name) {
  ChartManifold chart("G", {{coord, CoordKind::Circle, period}});
  auto g = generic(std::move(name), chart, {Expr::symbol(coord + "_l") + Expr::symbol(coord + "_r")},
                   {-Expr::symbol(coord)}, {0.0}, std::vector<Expr>{});
  auto impl = std::make_shared<Impl>(*g.impl_);
  impl->kind = Kind::Circle;
  impl->exp.reset();
  g.impl_ = impl;
  return g;
}

LieGroupModel LieGroupModel::generic(std::string name, ChartManifold chart, std::vector<Expr> mul, std::vector<Expr> inv,
                                     Point unit, std::optional<std::vector<Expr>> exp) {
  const std::size_t n = chart.dim();
  if (mul.size() != n || inv.size() != n || unit.size() != n)
    throw DimensionMismatch("group '" + name + "': mul/inv/unit must have " + std::to_string(n) + " components");
  if (exp && !exp->empty() && exp->size() != n) throw DimensionMismatch("group '" + name + "': exp components");
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->kind = Kind::Generic;
  impl->chart = chart;
  impl->names = chart.names();
  impl->mul = std::move(mul);
  impl->inv = std::move(inv);
  impl->unit = std::move(unit);
  if (exp && !exp->empty()) impl->exp = std::move(exp);
  const auto slots = concat(suffixed(impl->names, "_l"), suffixed(impl->names, "_r"));
  for (const auto& e : impl->mul) impl->mul_prog.emplace_back(e, slots);
  for (const auto& e : impl->inv) impl->inv_prog.emplace_back(e, impl->names);
  if (impl->exp) {
    for (const auto& e : *impl->exp) impl->exp_prog.emplace_back(e, impl->names);
  }
  if (!chart.contains(impl->unit)) throw PreconditionFailed("group '" + impl->name + "': unit outside the chart domain");
  impl->left_invariant = left_invariant_fields(chart, impl->names, impl->mul, impl->unit);
  LieGroupModel g;
  g.impl_ = std::move(impl);
  return g;
}

const std::string& LieGroupModel::name() const { return impl_->name; }
LieGroupModel::Kind LieGroupModel::kind() const { return impl_->kind; }
std::size_t LieGroupModel::dim() const { return impl_ ? impl_->names.size() : 0; }
const ChartManifold& LieGroupModel::chart() const { return impl_->chart; }
const std::vector<std::string>& LieGroupModel::coord_names() const { return impl_->names; }
Point LieGroupModel::unit() const { return impl_->unit; }
std::vector<Expr> LieGroupModel::mul_exprs() const { return impl_->mul; }
std::vector<Expr> LieGroupModel::inv_exprs() const { return impl_->inv; }

Point LieGroupModel::normalize(const Point& g) const { return impl_->chart.normalize(g); }
double LieGroupModel::distance(const Point& a, const Point& b) const { return impl_->chart.distance(a, b); }
bool LieGroupModel::contains(const Point& g) const { return impl_->chart.contains(g); }

Point LieGroupModel::multiply(const Point& a, const Point& b) const {
  if (a.size() != dim() || b.size() != dim()) throw DimensionMismatch("group '" + name() + "': element dimension");
  Point slots = normalize(a);
  const Point nb = normalize(b);
  slots.insert(slots.end(), nb.begin(), nb.end());
  Point out;
  for (const auto& p : impl_->mul_prog) out.push_back(p(slots));
  return normalize(out);
}

Point LieGroupModel::inverse(const Point& a) const {
  if (a.size() != dim()) throw DimensionMismatch("group '" + name() + "': element dimension");
  const Point na = normalize(a);
  Point out;
  for (const auto& p : impl_->inv_prog) out.push_back(p(na));
  return normalize(out);
}

Point LieGroupModel::conj(const Point& g, const Point& h) const { return multiply(multiply(g, h), inverse(g)); }

Point LieGroupModel::exp(const std::vector<double>& x) const {
  if (x.size() != dim()) throw DimensionMismatch("group '" + name() + "': algebra element dimension");
  if (impl_->kind != Kind::Generic) return normalize(x);
  if (impl_->exp) {
    Point out;
    for (const auto& p : impl_->exp_prog) out.push_back(p(x));
    return normalize(out);
  }
  auto r = exp_combination(x, impl_->left_invariant, impl_->unit);
  if (!r.ok()) throw PreconditionFailed("group '" + name() + "': exponential leaves the chart");
  return r.endpoint;
}

std::vector<double> LieGroupModel::bracket(const std::vector<double>& x, const std::vector<double>& y) const {
  if (impl_->kind != Kind::Generic) return std::vector<double>(dim(), 0.0);
  auto combo = [&](const std::vector<double>& c) {
    VectorField out = VectorField::zero(impl_->chart);
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (c[j] != 0.0) out = out + Expr(c[j]) * impl_->left_invariant[j];
    }
    return out;
  };
  return lie_bracket(combo(x), combo(y))(impl_->unit);
}

Point LieGroupModel::random(SplitMix64& rng, double scale) const {
  std::vector<double> x(dim());
  for (auto& v : x) v = rng.uniform(-scale, scale);
  return exp(x);
}

double LieGroupModel::axiom_defect(int samples, std::uint64_t seed) const {
  SplitMix64 rng(seed);
  double worst = distance(exp(std::vector<double>(dim(), 0.0)), unit());
  for (int i = 0; i < samples; ++i) {
    const Point a = random(rng), b = random(rng), c = random(rng);
    worst = std::max(worst, distance(multiply(multiply(a, b), c), multiply(a, multiply(b, c))));
    worst = std::max(worst, distance(multiply(a, unit()), a));
    worst = std::max(worst, distance(multiply(unit(), a), a));
    worst = std::max(worst, distance(multiply(a, inverse(a)), unit()));
    worst = std::max(worst, distance(multiply(inverse(a), a), unit()));
  }
  return worst;
}

struct GroupAction::Impl {
  std::string name;
  LieGroupModel group;
  ChartManifold space;
  std::vector<Expr> map;
  std::vector<Program> prog;
  std::vector<VectorField> basis;
};

GroupAction::GroupAction(std::string name, LieGroupModel group, ChartManifold space, std::vector<Expr> map,
                         const Params& params) {
  if (map.size() != space.dim())
    throw DimensionMismatch("action '" + name + "': map has " + std::to_string(map.size()) + " components");
  for (const auto& g : group.coord_names()) {
    if (space.index_of(g)) throw PreconditionFailed("action '" + name + "': group coordinate '" + g + "' clashes");
  }
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->group = group;
  impl->space = space;
  const auto slots = concat(group.coord_names(), space.names());
  for (auto& e : map) {
    impl->map.push_back(sfol::bind(e, params));
    impl->prog.emplace_back(impl->map.back(), slots);
  }
  std::map<std::string, Expr> at_unit;
  const Point e = group.unit();
  for (std::size_t i = 0; i < e.size(); ++i) at_unit.emplace(group.coord_names()[i], Expr(e[i]));
  for (const auto& gname : group.coord_names()) {
    std::vector<Expr> comps;
    for (const auto& m : impl->map) comps.push_back(substitute(diff(m, gname), at_unit));
    impl->basis.emplace_back(space, comps);
  }
  impl_ = std::move(impl);
}

const std::string& GroupAction::name() const { return impl_->name; }
const LieGroupModel& GroupAction::group() const { return impl_->group; }
const ChartManifold& GroupAction::space() const { return impl_->space; }
const std::vector<Expr>& GroupAction::map() const { return impl_->map; }
const std::vector<VectorField>& GroupAction::basis_generators() const { return impl_->basis; }

Point GroupAction::act(const Point& g, const Point& p) const {
  Point slots = impl_->group.normalize(g);
  const Point q = impl_->space.normalize(p);
  slots.insert(slots.end(), q.begin(), q.end());
  Point out;
  for (const auto& pr : impl_->prog) out.push_back(pr(slots));
  return impl_->space.normalize(out);
}

std::vector<Expr> GroupAction::map_at(const Point& g) const {
  const Point ng = impl_->group.normalize(g);
  std::map<std::string, Expr> at;
  for (std::size_t i = 0; i < ng.size(); ++i) at.emplace(impl_->group.coord_names()[i], Expr(ng[i]));
  std::vector<Expr> out;
  for (const auto& m : impl_->map) out.push_back(substitute(m, at));
  return out;
}

VectorField GroupAction::generator(const std::vector<double>& x) const {
  if (x.size() != impl_->group.dim()) throw DimensionMismatch("action '" + name() + "': algebra element dimension");
  VectorField out = VectorField::zero(impl_->space);
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] != 0.0) out = out + Expr(x[j]) * impl_->basis[j];
  }
  return out;
}

VectorField GroupAction::push(const Point& g, const VectorField& x) const {
  return pushforward_by_diffeo(x, map_at(g), map_at(impl_->group.inverse(g)));
}

GroupAction::Defects GroupAction::axiom_defects(int samples, std::uint64_t seed) const {
  Defects d;
  d.freeness = std::numeric_limits<double>::infinity();
  SplitMix64 rng(seed);
  const auto& G = impl_->group;
  const auto pts = region_samples(impl_->space, SampleBox::cube(impl_->space.dim()), samples);
  const double h = 1e-5;
  for (std::size_t i = 0; i < pts.size() && static_cast<int>(i) < samples; ++i) {
    const Point& p = pts[i];
    d.unit = std::max(d.unit, impl_->space.distance(act(G.unit(), p), p));
    const Point g1 = G.random(rng), g2 = G.random(rng);
    d.compatibility =
        std::max(d.compatibility, impl_->space.distance(act(g1, act(g2, p)), act(G.multiply(g1, g2), p)));
    std::vector<double> x(G.dim());
    for (auto& v : x) v = rng.uniform(-1.0, 1.0);
    std::vector<double> hx(x), mhx(x);
    for (std::size_t k = 0; k < x.size(); ++k) {
      hx[k] *= h;
      mhx[k] *= -h;
    }
    const Point fwd = act(G.exp(hx), p), bwd = act(G.exp(mhx), p);
    const Point diffq = impl_->space.difference(bwd, fwd);
    const Point v = generator(x)(p);
    for (std::size_t k = 0; k < v.size(); ++k) {
      d.generator = std::max(d.generator, std::abs(diffq[k] / (2 * h) - v[k]) / (1.0 + std::abs(v[k])));
    }
    if (G.distance(g1, G.unit()) > 0.1) {
      d.freeness = std::min(d.freeness, impl_->space.distance(act(g1, p), p) / G.distance(g1, G.unit()));
    }
  }
  return d;
}

}  // namespace sfol
