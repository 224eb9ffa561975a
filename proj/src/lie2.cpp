#include "sfol/lie2.hpp"

#include <algorithm>
#include <cmath>

#include "sfol/errors.hpp"
#include "sfol/lifted.hpp"

namespace sfol {

namespace {

double scaled_gap(const ChartManifold& m, const Point& a, const Point& b) {
  if (a.empty()) return 0.0;
  const Point d = m.difference(m.normalize(a), m.normalize(b));
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(d[i]) / std::max(1.0, std::abs(a[i])));
  return worst;
}

Point join(const Point& a, const Point& b) {
  Point out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

ChartManifold prefixed(const std::string& name, const ChartManifold& a, const std::string& pa, const ChartManifold& b,
                       const std::string& pb) {
  std::vector<Coordinate> coords;
  for (auto c : a.coords()) {
    c.name = pa + c.name;
    coords.push_back(std::move(c));
  }
  for (auto c : b.coords()) {
    c.name = pb + c.name;
    coords.push_back(std::move(c));
  }
  return ChartManifold(name, std::move(coords));
}

struct Worst {
  double value = 0.0;
  nlohmann::json witness = nullptr;
  void see(double v, const nlohmann::json& w) {
    if (v > value) {
      value = v;
      witness = w;
    }
  }
  void add_to(Report& rep, const std::string& name, double tol, int samples) const {
    rep.add(name, value <= tol, std::to_string(samples) + " samples", value <= tol ? nullptr : witness, value);
  }
};

Eigen::VectorXd to_vec(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

CrossedModule CrossedModule::trivial(const LieGroupModel& h, const LieGroupModel& g) {
  return {h, g, [g](const Point&) { return g.unit(); }, [](const Point&, const Point& x) { return x; }};
}

CrossedModule CrossedModule::conjugation(const LieGroupModel& g) {
  return {g, g, [](const Point& x) { return x; }, [g](const Point& a, const Point& x) { return g.conj(a, x); }};
}

Report crossed_module_check(const CrossedModule& cm, int samples, std::uint64_t seed) {
  Report rep("crossed-module");
  SplitMix64 rng(seed);
  const auto& H = cm.h;
  const auto& G = cm.g;
  Worst equivariant, peiffer, automorphism, action, boundary_hom;
  for (int i = 0; i < samples; ++i) {
    const Point g1 = G.random(rng), g2 = G.random(rng);
    const Point h1 = H.random(rng), h2 = H.random(rng);
    const nlohmann::json w = {{"g1", g1}, {"g2", g2}, {"h1", h1}, {"h2", h2}};
    equivariant.see(scaled_gap(G.chart(), cm.boundary(cm.act(g1, h1)), G.conj(g1, cm.boundary(h1))), w);
    peiffer.see(scaled_gap(H.chart(), cm.act(cm.boundary(h1), h2), H.conj(h1, h2)), w);
    automorphism.see(
        scaled_gap(H.chart(), cm.act(g1, H.multiply(h1, h2)), H.multiply(cm.act(g1, h1), cm.act(g1, h2))), w);
    action.see(scaled_gap(H.chart(), cm.act(G.multiply(g1, g2), h1), cm.act(g1, cm.act(g2, h1))), w);
    boundary_hom.see(
        scaled_gap(G.chart(), cm.boundary(H.multiply(h1, h2)), G.multiply(cm.boundary(h1), cm.boundary(h2))), w);
  }
  const double tol = 1e-9;
  boundary_hom.add_to(rep, "boundary is a homomorphism", tol, samples);
  equivariant.add_to(rep, "d(C_g h) = g d(h) g^-1", tol, samples);
  peiffer.add_to(rep, "C_{d h}(j) = h j h^-1", tol, samples);
  automorphism.add_to(rep, "C_g is an automorphism", tol, samples);
  action.add_to(rep, "C is an action", tol, samples);
  return rep;
}

Lie2Group::Lie2Group(CrossedModule cm) : cm_(std::move(cm)) {
  const auto H = cm_.h;
  const auto G = cm_.g;
  const auto boundary = cm_.boundary;
  const std::size_t dh = H.dim(), dg = G.dim();
  auto hp = [dh](const Point& a) { return Point(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(dh)); };
  auto gp = [dh](const Point& a) { return Point(a.begin() + static_cast<std::ptrdiff_t>(dh), a.end()); };
  GroupoidModel& k = groupoid_;
  k.name = H.name() + " x| " + G.name();
  k.objects = G.chart();
  k.arrows = prefixed(k.name, H.chart(), "h_", G.chart(), "g_");
  k.s = gp;
  k.t = [=](const Point& a) { return G.multiply(boundary(hp(a)), gp(a)); };
  k.compose_raw = [=](const Point& a2, const Point& a1) { return join(H.multiply(hp(a2), hp(a1)), gp(a1)); };
  k.invert = [=](const Point& a) { return join(H.inverse(hp(a)), G.multiply(boundary(hp(a)), gp(a))); };
  k.identity = [=](const Point& g) { return join(H.unit(), g); };
  k.sample_from = [=](const Point& g, SplitMix64& rng) { return join(H.random(rng), g); };
  (void)dg;
}

Point Lie2Group::h_part(const Point& hg) const {
  return Point(hg.begin(), hg.begin() + static_cast<std::ptrdiff_t>(h_dim()));
}
Point Lie2Group::g_part(const Point& hg) const {
  return Point(hg.begin() + static_cast<std::ptrdiff_t>(h_dim()), hg.end());
}
Point Lie2Group::make(const Point& h, const Point& g) const { return join(h, g); }

Point Lie2Group::multiply(const Point& a, const Point& b) const {
  const Point g1 = g_part(a);
  return join(cm_.h.multiply(h_part(a), cm_.act(g1, h_part(b))), cm_.g.multiply(g1, g_part(b)));
}

Point Lie2Group::inverse(const Point& a) const {
  const Point gi = cm_.g.inverse(g_part(a));
  return join(cm_.act(gi, cm_.h.inverse(h_part(a))), gi);
}

Point Lie2Group::unit() const { return join(cm_.h.unit(), cm_.g.unit()); }

Point Lie2Group::random(SplitMix64& rng, double scale) const {
  const Point h = cm_.h.random(rng, scale);
  return join(h, cm_.g.random(rng, scale));
}

double Lie2Group::gap(const Point& a, const Point& b) const { return groupoid_.gap(a, b); }

Report Lie2Group::axiom_check(int samples, std::uint64_t seed) const {
  Report rep("lie2-group");
  SplitMix64 rng(seed);
  Worst assoc, units, inverses, interchange;
  const auto& k = groupoid_;
  const auto objs = region_samples(cm_.g.chart(), SampleBox::cube(cm_.g.dim(), 1.0), 20);
  for (int i = 0; i < samples; ++i) {
    const Point a = random(rng), b = random(rng), c = random(rng);
    const nlohmann::json w = {{"a", a}, {"b", b}, {"c", c}};
    assoc.see(gap(multiply(multiply(a, b), c), multiply(a, multiply(b, c))), w);
    units.see(std::max(gap(multiply(unit(), a), a), gap(multiply(a, unit()), a)), w);
    inverses.see(std::max(gap(multiply(inverse(a), a), unit()), gap(multiply(a, inverse(a)), unit())), w);
    // (a2 o a1)(b2 o b1) = (a2 b2) o (a1 b1)
    const Point a1 = k.sample_from(cm_.g.random(rng), rng);
    const Point a2 = k.sample_from(k.t(a1), rng);
    const Point b1 = k.sample_from(cm_.g.random(rng), rng);
    const Point b2 = k.sample_from(k.t(b1), rng);
    const nlohmann::json w2 = {{"a1", a1}, {"a2", a2}, {"b1", b1}, {"b2", b2}};
    const Point p1 = multiply(a1, b1), p2 = multiply(a2, b2);
    if (k.object_gap(k.s(p2), k.t(p1)) > 1e-9) {
      interchange.see(1.0, w2);
      continue;
    }
    interchange.see(gap(multiply(k.compose(a2, a1), k.compose(b2, b1)), k.compose_raw(p2, p1)), w2);
  }
  (void)objs;
  const double tol = 1e-9;
  assoc.add_to(rep, "associativity", tol, samples);
  units.add_to(rep, "unit", tol, samples);
  inverses.add_to(rep, "inverse", tol, samples);
  rep.merge(structure_check(groupoid_, samples));
  interchange.add_to(rep, "multiplication is a groupoid morphism", tol, samples);
  return rep;
}

Lie2Group semidirect_product(const CrossedModule& cm) {
  auto rep = crossed_module_check(cm);
  if (!rep.passed()) throw PreconditionFailed("semidirect_product: crossed module axioms fail: " + rep.to_json().dump());
  return Lie2Group(cm);
}

Ideal compute_ideal(const FoliationModule& f, const GroupAction& a, const std::optional<SampleBox>& region) {
  if (!a.space().same_as(f.manifold())) throw ManifoldMismatch("compute_ideal: action and foliation manifolds differ");
  const std::size_t n = f.manifold().dim();
  const std::size_t d = a.group().dim();
  Ideal out;
  out.basis = Eigen::MatrixXd(static_cast<Eigen::Index>(d), 0);
  if (d == 0) return out;
  const auto samples = region_samples(f.manifold(), region.value_or(SampleBox::cube(n)));
  const auto& gens = a.basis_generators();
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::Index rows = 0;
  Point buf(n);
  for (const auto& p : samples) {
    const Eigen::MatrixXd fa = f.generator_set()->values_at(p);
    Eigen::MatrixXd v(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) {
      gens[j].eval_into(p, buf);
      v.col(static_cast<Eigen::Index>(j)) = to_vec(buf);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(fa, Eigen::ComputeFullU);
    const int r = numeric_rank(fa);
    const Eigen::Index rest = static_cast<Eigen::Index>(n) - r;
    if (rest == 0) continue;
    const Eigen::MatrixXd q = svd.matrixU().rightCols(rest);
    blocks.push_back(q.transpose() * v);
    rows += rest;
  }
  Eigen::MatrixXd m(std::max<Eigen::Index>(rows, 1), static_cast<Eigen::Index>(d));
  m.setZero();
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    m.middleRows(at, b.rows()) = b;
    at += b.rows();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double tol = 1e-7 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) ++rank;
  }
  out.basis = svd.matrixV().rightCols(static_cast<Eigen::Index>(d) - rank);

  for (Eigen::Index c = 0; c < out.basis.cols(); ++c) {
    auto m2 = hull_membership(a.generator(to_std(out.basis.col(c))), f, region);
    out.residual = std::max(out.residual, m2.worst_residual);
  }
  // ideal property: [b, e_j] stays in the span of the basis
  for (Eigen::Index c = 0; c < out.basis.cols(); ++c) {
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<double> e(d, 0.0);
      e[j] = 1.0;
      const Eigen::VectorXd br = to_vec(a.group().bracket(to_std(out.basis.col(c)), e));
      const Eigen::VectorXd off = br - out.basis * (out.basis.transpose() * br);
      if (off.norm() > 1e-7 * std::max(1.0, br.norm())) out.closed = false;
    }
  }
  return out;
}

LieGroupModel ideal_subgroup(const LieGroupModel& g, const Ideal& ideal) {
  if (ideal.dim() == 0) return LieGroupModel::vector({}, "1");
  if (ideal.dim() == static_cast<int>(g.dim())) return g;
  throw PreconditionFailed("ideal_subgroup: ideals of intermediate dimension are not supported");
}

CrossedModule ideal_crossed_module(const LieGroupModel& g, const Ideal& ideal) {
  if (ideal.dim() == 0) return CrossedModule::trivial(ideal_subgroup(g, ideal), g);
  if (ideal.dim() == static_cast<int>(g.dim())) return CrossedModule::conjugation(g);
  throw PreconditionFailed("ideal_crossed_module: ideals of intermediate dimension are not supported");
}

std::optional<std::vector<double>> group_log(const LieGroupModel& g, const Point& h) {
  const std::size_t d = g.dim();
  if (d == 0) return std::vector<double>{};
  if (g.kind() == LieGroupModel::Kind::Vector) return h;
  if (g.kind() == LieGroupModel::Kind::Circle) {
    const double period = g.chart().coords()[0].period;
    return std::vector<double>{h[0] - period * std::round(h[0] / period)};
  }
  std::vector<double> x(d, 0.0);
  const auto& chart = g.chart();
  auto residual = [&](const std::vector<double>& y) { return to_vec(chart.difference(h, g.exp(y))); };
  for (int it = 0; it < 60; ++it) {
    const Eigen::VectorXd r = residual(x);
    if (r.norm() < 1e-12) return x;
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t k = 0; k < d; ++k) {
      auto xp = x, xm = x;
      xp[k] += 1e-7;
      xm[k] -= 1e-7;
      jac.col(static_cast<Eigen::Index>(k)) = (residual(xp) - residual(xm)) / 2e-7;
    }
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-r);
    for (std::size_t k = 0; k < d; ++k) x[k] += step(static_cast<Eigen::Index>(k));
  }
  if (residual(x).norm() < 1e-9) return x;
  return std::nullopt;
}

HolonomyWord phi(const Point& h, const Point& p, const GroupAction& a, const FoliationModule& f, const Ideal& ideal,
                 const PhiOptions& opt) {
  const auto& G = a.group();
  auto x = group_log(G, h);
  if (!x) throw PreconditionFailed("phi: h is not reachable by the exponential map");
  const Eigen::VectorXd xv = to_vec(*x);
  if (xv.norm() < 1e-15) return identity_word(f.manifold(), p);
  const Eigen::VectorXd off = xv - ideal.basis * (ideal.basis.transpose() * xv);
  if (off.norm() > 1e-9 * std::max(1.0, xv.norm())) throw PreconditionFailed("phi: log h is not in the ideal");

  const VectorField v = a.generator(*x);
  const double dt = 1.0 / opt.pieces;
  std::vector<Step> steps;
  std::optional<Eigen::VectorXd> last;
  Point buf(f.manifold().dim());
  for (int k = 0; k < opt.pieces; ++k) {
    std::vector<double> sx(*x);
    for (auto& c : sx) c *= (k + 0.5) * dt;
    const Point q = a.act(G.exp(sx), p);
    v.eval_into(q, buf);
    const Eigen::VectorXd vq = to_vec(buf);
    auto [c, res] = span_solve(f.generator_set()->values_at(q), vq);
    if (res > opt.ls_tol * std::max(1.0, vq.norm()))
      throw PreconditionFailed("phi: v_x is not in F along the orbit (least-squares residual " + std::to_string(res) +
                               ")");
    if (last && (c - *last).lpNorm<Eigen::Infinity>() < 1e-12) {
      auto& prev = std::get<PathStep>(steps.back());
      for (std::size_t i = 0; i < prev.coeffs.size(); ++i) prev.coeffs[i] += dt * c(static_cast<Eigen::Index>(i));
    } else {
      steps.emplace_back(PathStep{f.generator_set(), to_std(dt * c)});
      last = c;
    }
  }
  return HolonomyWord(f.manifold(), p, std::move(steps));
}

HolonomyWord left_action(const Point& h, const HolonomyWord& w, const GroupAction& a, const FoliationModule& f,
                         const Ideal& ideal) {
  return compose(phi(h, w.target(), a, f, ideal), w);
}

HolonomyWord two_group_action(const Lie2Group& l, const Point& hg, const HolonomyWord& w, const GroupAction& a,
                              const FoliationModule& f, const Ideal& ideal) {
  const Point h = l.crossed_module().boundary(l.h_part(hg));
  return left_action(h, lifted_action(l.g_part(hg), w, a), a, f, ideal);
}

Arrow star_pullback(const Lie2Group& l, const GroupAction& a, const Point& hg, const Arrow& arrow) {
  const std::size_t n = a.space().dim();
  if (arrow.size() < 2 * n) throw DimensionMismatch("star_pullback: arrow too short");
  const Point g = l.g_part(hg);
  const Point hgp = a.group().multiply(l.crossed_module().boundary(l.h_part(hg)), g);
  const Point p(arrow.begin(), arrow.begin() + static_cast<std::ptrdiff_t>(n));
  const Point q(arrow.end() - static_cast<std::ptrdiff_t>(n), arrow.end());
  Arrow out = a.act(hgp, p);
  out.insert(out.end(), arrow.begin() + static_cast<std::ptrdiff_t>(n), arrow.end() - static_cast<std::ptrdiff_t>(n));
  const Point gq = a.act(g, q);
  out.insert(out.end(), gq.begin(), gq.end());
  return out;
}

VarphiTriple star_pullback(const Lie2Group& l, const GroupAction& a, const Point& hg, const VarphiTriple& arrow,
                           const SubmersionQuotient& q) {
  if (q.M().distance(q.project(arrow.target), arrow.down.target()) > 1e-6 ||
      q.M().distance(q.project(arrow.source), arrow.down.source()) > 1e-6)
    throw PreconditionFailed("star_pullback: (p, zeta, q) is not an arrow of the pullback groupoid");
  const Point g = l.g_part(hg);
  const Point hgp = a.group().multiply(l.crossed_module().boundary(l.h_part(hg)), g);
  return {a.act(hgp, arrow.target), arrow.down, a.act(g, arrow.source)};
}

Report action_axiom_check(const FlatAction& act, const Lie2Group& l, const GroupoidModel& k, const GroupAction& a,
                          int samples, std::uint64_t seed) {
  Report rep("lie2-action");
  SplitMix64 rng(seed);
  const auto& cm = l.crossed_module();
  const auto objs = region_samples(k.objects, SampleBox::cube(k.objects.dim(), 2.0), 40);
  if (objs.empty()) throw PreconditionFailed("action_axiom_check: no sample objects");
  Worst unit, group_law, source, target, comp;
  bool composable = true;
  for (int i = 0; i < samples; ++i) {
    const Point& p = objs[static_cast<std::size_t>(i) % objs.size()];
    const Arrow x1 = k.sample_from(p, rng);
    const Arrow x2 = k.sample_from(k.t(x1), rng);
    const Point u = l.random(rng), v = l.random(rng);
    const nlohmann::json w = {{"hg1", u}, {"hg2", v}, {"xi1", x1}, {"xi2", x2}};
    unit.see(k.gap(act(l.unit(), x1), x1), w);
    group_law.see(k.gap(act(l.multiply(u, v), x1), act(u, act(v, x1))), w);
    const Point g = l.g_part(u);
    const Point hg = a.group().multiply(cm.boundary(l.h_part(u)), g);
    const Arrow ux = act(u, x1);
    source.see(k.object_gap(k.s(ux), a.act(g, k.s(x1))), w);
    target.see(k.object_gap(k.t(ux), a.act(hg, k.t(x1))), w);
    // k1 = u, k2 = (h2, d(h1) g) composable in the 2-group groupoid
    const Point k2 = l.make(l.h_part(v), hg);
    const Arrow a1 = act(u, x1), a2 = act(k2, x2);
    if (k.object_gap(k.s(a2), k.t(a1)) > k.object_tol) {
      composable = false;
      comp.see(1.0, w);
      continue;
    }
    comp.see(k.gap(act(l.groupoid().compose(k2, u), k.compose(x2, x1)), k.compose_raw(a2, a1)), w);
  }
  const double tol = 1e-9;
  unit.add_to(rep, "unit acts trivially", tol, samples);
  group_law.add_to(rep, "group action law", tol, samples);
  source.add_to(rep, "source law s(k*xi) = s(k) s(xi)", tol, samples);
  target.add_to(rep, "target law t(k*xi) = t(k) t(xi)", tol, samples);
  rep.add("groupoid morphism law", comp.value <= tol,
          composable ? std::to_string(samples) + " samples" : "images of composable pairs are not composable",
          comp.value <= tol ? nullptr : comp.witness, comp.value);
  return rep;
}

Report word_action_axiom_check(const WordAction& act, const Lie2Group& l, const GroupAction& a,
                               const FoliationModule& f, int samples, std::uint64_t seed) {
  Report rep("lie2-word-action");
  SplitMix64 rng(seed);
  const auto& cm = l.crossed_module();
  const auto& m = f.manifold();
  const auto objs = region_samples(m, SampleBox::cube(m.dim(), 2.0), 40);
  RandomWordOptions wo;
  wo.max_steps = 2;
  const double tol = 1e-6;
  Worst unit, group_law, source, target, comp;
  auto flag = [](bool eq) { return eq ? 0.0 : 1.0; };
  for (int i = 0; i < samples; ++i) {
    const Point& p = objs[static_cast<std::size_t>(i) % objs.size()];
    const HolonomyWord w1 = random_word({f.generator_set()}, p, rng, wo);
    const HolonomyWord w2 = random_word({f.generator_set()}, w1.target(), rng, wo);
    const Point u = l.random(rng), v = l.random(rng);
    const nlohmann::json wj = {{"hg1", u}, {"hg2", v}, {"w1", word_to_json(w1)}, {"w2", word_to_json(w2)}};
    unit.see(flag(equivalent(act(l.unit(), w1), w1)), wj);
    group_law.see(flag(equivalent(act(l.multiply(u, v), w1), act(u, act(v, w1)))), wj);
    const Point g = l.g_part(u);
    const Point hg = a.group().multiply(cm.boundary(l.h_part(u)), g);
    const HolonomyWord uw = act(u, w1);
    source.see(m.distance(uw.source(), a.act(g, w1.source())), wj);
    target.see(m.distance(uw.target(), a.act(hg, w1.target())), wj);
    const Point k2 = l.make(l.h_part(v), hg);
    const HolonomyWord a1 = uw, a2 = act(k2, w2);
    if (m.distance(a2.source(), a1.target()) > 1e-6) {
      comp.see(1.0, wj);
      continue;
    }
    comp.see(flag(equivalent(act(l.groupoid().compose(k2, u), compose(w2, w1)), compose(a2, a1))), wj);
  }
  unit.add_to(rep, "unit acts trivially", tol, samples);
  group_law.add_to(rep, "group action law", tol, samples);
  source.add_to(rep, "source law", tol, samples);
  target.add_to(rep, "target law", tol, samples);
  comp.add_to(rep, "groupoid morphism law", tol, samples);
  return rep;
}

}  // namespace sfol
