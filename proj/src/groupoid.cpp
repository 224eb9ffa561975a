#include "sfol/groupoid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfol/errors.hpp"

namespace sfol {

namespace {

ChartManifold concat_chart(const std::string& name,
                           const std::vector<std::pair<std::string, const ChartManifold*>>& parts) {
  std::vector<Coordinate> coords;
  for (const auto& [prefix, m] : parts) {
    for (auto c : m->coords()) {
      c.name = prefix + c.name;
      coords.push_back(std::move(c));
    }
  }
  return ChartManifold(name, std::move(coords));
}

Point slice(const Point& a, std::size_t from, std::size_t n) {
  return Point(a.begin() + static_cast<std::ptrdiff_t>(from), a.begin() + static_cast<std::ptrdiff_t>(from + n));
}

Point join(std::initializer_list<const Point*> parts) {
  Point out;
  for (const Point* p : parts) out.insert(out.end(), p->begin(), p->end());
  return out;
}

double scaled_gap(const ChartManifold& m, const Point& a, const Point& b) {
  const Point d = m.difference(m.normalize(a), m.normalize(b));
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(d[i]) / std::max(1.0, std::abs(a[i])));
  return worst;
}

std::vector<Point> object_samples(const ChartManifold& m) {
  auto pts = region_samples(m, SampleBox::cube(m.dim(), 2.0), 40);
  if (pts.empty()) throw PreconditionFailed("no sample objects in the domain of '" + m.name() + "'");
  return pts;
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
};

}  // namespace

Arrow GroupoidModel::compose(const Arrow& a2, const Arrow& a1) const {
  if (object_gap(s(a2), t(a1)) > object_tol)
    throw PreconditionFailed("groupoid '" + name + "': arrows are not composable");
  return compose_raw(a2, a1);
}

double GroupoidModel::gap(const Arrow& a, const Arrow& b) const { return scaled_gap(arrows, a, b); }

double GroupoidModel::object_gap(const Point& p, const Point& q) const { return scaled_gap(objects, p, q); }

Report structure_check(const GroupoidModel& h, int samples, std::uint64_t seed) {
  Report rep("groupoid:" + h.name);
  SplitMix64 rng(seed);
  const auto objs = object_samples(h.objects);
  Worst unit_st, comp_st, units, inverse, assoc;
  for (int i = 0; i < samples; ++i) {
    const Point& p = objs[static_cast<std::size_t>(i) % objs.size()];
    const Arrow e = h.identity(p);
    unit_st.see(std::max(h.object_gap(h.s(e), p), h.object_gap(h.t(e), p)), p);
    const Arrow a1 = h.sample_from(p, rng);
    const Arrow a2 = h.sample_from(h.t(a1), rng);
    const Arrow a3 = h.sample_from(h.t(a2), rng);
    const nlohmann::json w = {{"a1", a1}, {"a2", a2}, {"a3", a3}};
    const Arrow c = h.compose(a2, a1);
    comp_st.see(std::max(h.object_gap(h.s(c), h.s(a1)), h.object_gap(h.t(c), h.t(a2))), w);
    units.see(std::max(h.gap(h.compose(h.identity(h.t(a1)), a1), a1), h.gap(h.compose(a1, h.identity(h.s(a1))), a1)),
              w);
    inverse.see(std::max(h.gap(h.compose(h.invert(a1), a1), h.identity(h.s(a1))),
                         h.gap(h.compose(a1, h.invert(a1)), h.identity(h.t(a1)))),
                w);
    assoc.see(h.gap(h.compose(a3, h.compose(a2, a1)), h.compose(h.compose(a3, a2), a1)), w);
  }
  const double tol = 1e-9;
  auto add = [&](const char* name, const Worst& x) {
    rep.add(name, x.value <= tol, std::to_string(samples) + " samples", x.value <= tol ? nullptr : x.witness, x.value);
  };
  add("s, t of identities", unit_st);
  add("s, t of composites", comp_st);
  add("unit laws", units);
  add("inverse laws", inverse);
  add("associativity", assoc);
  return rep;
}

GroupoidModel pair_groupoid(const ChartManifold& m) {
  GroupoidModel h;
  h.name = "pair(" + m.name() + ")";
  h.objects = m;
  h.arrows = concat_chart(h.name, {{"t_", &m}, {"s_", &m}});
  const std::size_t n = m.dim();
  h.s = [n](const Arrow& a) { return slice(a, n, n); };
  h.t = [n](const Arrow& a) { return slice(a, 0, n); };
  h.compose_raw = [n](const Arrow& a2, const Arrow& a1) {
    const Point t = slice(a2, 0, n), s = slice(a1, n, n);
    return join({&t, &s});
  };
  h.invert = [n](const Arrow& a) {
    const Point t = slice(a, 0, n), s = slice(a, n, n);
    return join({&s, &t});
  };
  h.identity = [](const Point& p) { return join({&p, &p}); };
  h.sample_from = [m](const Point& p, SplitMix64& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      Point q(m.dim());
      for (auto& v : q) v = rng.uniform(-2.0, 2.0);
      if (m.contains(q)) {
        q = m.normalize(q);
        return join({&q, &p});
      }
    }
    return join({&p, &p});
  };
  return h;
}

GroupoidModel unit_groupoid(const ChartManifold& m) {
  GroupoidModel h;
  h.name = "unit(" + m.name() + ")";
  h.objects = m;
  h.arrows = m;
  h.s = [](const Arrow& a) { return a; };
  h.t = [](const Arrow& a) { return a; };
  h.compose_raw = [](const Arrow&, const Arrow& a1) { return a1; };
  h.invert = [](const Arrow& a) { return a; };
  h.identity = [](const Point& p) { return p; };
  h.sample_from = [](const Point& p, SplitMix64&) { return p; };
  return h;
}

GroupoidModel transformation_groupoid(const GroupAction& action) {
  GroupoidModel h;
  const auto& G = action.group();
  const auto& P = action.space();
  h.name = G.name() + " x " + P.name();
  h.objects = P;
  h.arrows = concat_chart(h.name, {{"g_", &G.chart()}, {"p_", &P}});
  const std::size_t d = G.dim(), n = P.dim();
  h.s = [d, n](const Arrow& a) { return slice(a, d, n); };
  h.t = [action, d, n](const Arrow& a) { return action.act(slice(a, 0, d), slice(a, d, n)); };
  h.compose_raw = [G, d, n](const Arrow& a2, const Arrow& a1) {
    const Point g = G.multiply(slice(a2, 0, d), slice(a1, 0, d));
    const Point p = slice(a1, d, n);
    return join({&g, &p});
  };
  h.invert = [G, action, d, n](const Arrow& a) {
    const Point g = slice(a, 0, d);
    const Point gi = G.inverse(g);
    const Point q = action.act(g, slice(a, d, n));
    return join({&gi, &q});
  };
  h.identity = [G](const Point& p) {
    const Point e = G.unit();
    return join({&e, &p});
  };
  h.sample_from = [G](const Point& p, SplitMix64& rng) {
    const Point g = G.random(rng);
    return join({&g, &p});
  };
  return h;
}

void check_pullback_arrow(const GroupoidModel& pb, const GroupoidModel& h, const SubmersionQuotient& q,
                          const Arrow& a) {
  const std::size_t n = q.P().dim(), k = h.arrows.dim();
  if (a.size() != 2 * n + k) throw DimensionMismatch("pullback arrow has the wrong size");
  const Point p = slice(a, 0, n), x = slice(a, n, k), r = slice(a, n + k, n);
  if (h.object_gap(q.project(p), h.t(x)) > 1e-9 || h.object_gap(q.project(r), h.s(x)) > 1e-9)
    throw PreconditionFailed("'" + pb.name + "': incompatible triple (p, h, q)");
}

GroupoidModel pullback_groupoid(const GroupoidModel& h, const SubmersionQuotient& q) {
  if (!h.objects.same_as(q.M())) throw ManifoldMismatch("pullback_groupoid: groupoid is not over the base");
  GroupoidModel pb;
  pb.name = "pullback(" + h.name + ")";
  pb.objects = q.P();
  pb.arrows = concat_chart(pb.name, {{"p_", &q.P()}, {"h_", &h.arrows}, {"q_", &q.P()}});
  const std::size_t n = q.P().dim(), k = h.arrows.dim();
  pb.s = [n, k](const Arrow& a) { return slice(a, n + k, n); };
  pb.t = [n](const Arrow& a) { return slice(a, 0, n); };
  pb.compose_raw = [h, n, k](const Arrow& a2, const Arrow& a1) {
    const Point p = slice(a2, 0, n), r = slice(a1, n + k, n);
    const Point x = h.compose_raw(slice(a2, n, k), slice(a1, n, k));
    return join({&p, &x, &r});
  };
  pb.invert = [h, n, k](const Arrow& a) {
    const Point p = slice(a, 0, n), r = slice(a, n + k, n);
    const Point x = h.invert(slice(a, n, k));
    return join({&r, &x, &p});
  };
  pb.identity = [h, q](const Point& p) {
    const Point x = h.identity(q.project(p));
    return join({&p, &x, &p});
  };
  pb.sample_from = [h, q](const Point& r, SplitMix64& rng) {
    const Point x = h.sample_from(q.project(r), rng);
    auto p = q.fiber_point(h.t(x), rng);
    if (!p) throw PreconditionFailed("pullback_groupoid: no point found over the target");
    return join({&*p, &x, &r});
  };
  return pb;
}

Report automorphism_check(const GroupoidModel& k, const GroupoidAutomorphismAction& a, int samples,
                          std::uint64_t seed) {
  Report rep("automorphism");
  SplitMix64 rng(seed);
  const auto& G = a.on_objects.group();
  const auto objs = object_samples(k.objects);
  Worst st, comp, units;
  for (int i = 0; i < samples; ++i) {
    const Point g = G.random(rng);
    const Point& p = objs[static_cast<std::size_t>(i) % objs.size()];
    const Arrow x1 = k.sample_from(p, rng);
    const Arrow x2 = k.sample_from(k.t(x1), rng);
    const nlohmann::json w = {{"g", g}, {"xi1", x1}, {"xi2", x2}};
    const Arrow gx1 = a.on_arrows(g, x1);
    st.see(std::max(k.object_gap(k.s(gx1), a.on_objects.act(g, k.s(x1))),
                    k.object_gap(k.t(gx1), a.on_objects.act(g, k.t(x1)))),
           w);
    comp.see(k.gap(a.on_arrows(g, k.compose(x2, x1)), k.compose(a.on_arrows(g, x2), gx1)), w);
    units.see(k.gap(a.on_arrows(g, k.identity(p)), k.identity(a.on_objects.act(g, p))), w);
  }
  const double tol = 1e-9;
  rep.add("s, t covariance", st.value <= tol, "", st.value <= tol ? nullptr : st.witness, st.value);
  rep.add("compatible with composition", comp.value <= tol, "", comp.value <= tol ? nullptr : comp.witness, comp.value);
  rep.add("maps units to units", units.value <= tol, "", units.value <= tol ? nullptr : units.witness, units.value);
  return rep;
}

GroupoidModel semidirect_groupoid(const GroupoidModel& k, const GroupoidAutomorphismAction& a) {
  if (!a.on_objects.space().same_as(k.objects))
    throw ManifoldMismatch("semidirect_groupoid: action is not on the objects of '" + k.name + "'");
  auto check = automorphism_check(k, a);
  if (!check.passed())
    throw PreconditionFailed("semidirect_groupoid: the action is not by groupoid automorphisms: " +
                             check.to_json().dump());
  const auto& G = a.on_objects.group();
  GroupoidModel h;
  h.name = k.name + " x| " + G.name();
  h.objects = k.objects;
  h.arrows = concat_chart(h.name, {{"k_", &k.arrows}, {"g_", &G.chart()}});
  const std::size_t n = k.arrows.dim(), d = G.dim();
  const GroupAction obj = a.on_objects;
  const auto on_arrows = a.on_arrows;
  h.s = [k, G, obj, n, d](const Arrow& x) { return obj.act(G.inverse(slice(x, n, d)), k.s(slice(x, 0, n))); };
  h.t = [k, n](const Arrow& x) { return k.t(slice(x, 0, n)); };
  h.compose_raw = [k, G, on_arrows, n, d](const Arrow& a2, const Arrow& a1) {
    const Point g2 = slice(a2, n, d), g1 = slice(a1, n, d);
    const Point xi = k.compose_raw(slice(a2, 0, n), on_arrows(g2, slice(a1, 0, n)));
    const Point g = G.multiply(g2, g1);
    return join({&xi, &g});
  };
  h.invert = [k, G, on_arrows, n, d](const Arrow& x) {
    const Point gi = G.inverse(slice(x, n, d));
    const Point xi = on_arrows(gi, k.invert(slice(x, 0, n)));
    return join({&xi, &gi});
  };
  h.identity = [k, G](const Point& p) {
    const Point xi = k.identity(p), e = G.unit();
    return join({&xi, &e});
  };
  h.sample_from = [k, G, obj](const Point& p, SplitMix64& rng) {
    const Point g = G.random(rng);
    const Point xi = k.sample_from(obj.act(g, p), rng);
    return join({&xi, &g});
  };
  return h;
}

Report groupoid_morphism_check(const ArrowMap& phi, const GroupoidModel& h1, const GroupoidModel& h2,
                               const ObjectMap& base, int samples, std::uint64_t seed) {
  Report rep("morphism");
  SplitMix64 rng(seed);
  const auto objs = object_samples(h1.objects);
  Worst comp, units, src, tgt;
  bool composable = true;
  for (int i = 0; i < samples; ++i) {
    const Point& p = objs[static_cast<std::size_t>(i) % objs.size()];
    const Arrow a1 = h1.sample_from(p, rng);
    const Arrow a2 = h1.sample_from(h1.t(a1), rng);
    const nlohmann::json w = {{"a1", a1}, {"a2", a2}};
    const Arrow f1 = phi(a1), f2 = phi(a2);
    src.see(h2.object_gap(h2.s(f1), base(h1.s(a1))), w);
    tgt.see(h2.object_gap(h2.t(f1), base(h1.t(a1))), w);
    units.see(h2.gap(phi(h1.identity(p)), h2.identity(base(p))), {{"p", p}});
    if (h2.object_gap(h2.s(f2), h2.t(f1)) > 1e-9) {
      composable = false;
      comp.see(1.0, w);
      continue;
    }
    comp.see(h2.gap(phi(h1.compose(a2, a1)), h2.compose_raw(f2, f1)), w);
  }
  const double tol = 1e-9;
  auto add = [&](const char* name, const Worst& x, const std::string& detail = "") {
    rep.add(name, x.value <= tol, detail, x.value <= tol ? nullptr : x.witness, x.value);
  };
  add("composition", comp, composable ? "" : "images of composable arrows are not composable");
  add("units", units);
  add("source", src);
  add("target", tgt);
  return rep;
}

bool same_coset(const NormalSubgroupoidSystem& n, const Arrow& xi1, const Arrow& xi2) {
  if (n.h.object_gap(n.h.s(xi1), n.h.s(xi2)) > n.h.object_tol) return false;
  return n.in_k(n.h.compose(xi2, n.h.invert(xi1)));
}

Report nss_check(const NormalSubgroupoidSystem& n, int samples, std::uint64_t seed,
                 const std::vector<NssWitness>& witnesses) {
  Report rep("nss");
  const auto& h = n.h;
  SplitMix64 rng(seed);
  const auto objs = object_samples(h.objects);
  std::vector<NssWitness> cases = witnesses;
  for (int i = 0; i < samples; ++i) {
    const Point& q = objs[static_cast<std::size_t>(i) % objs.size()];
    NssWitness c;
    c.q = q;
    c.p = n.related_point(q, rng);
    c.xi2 = h.sample_from(q, rng);
    c.xi1 = h.sample_from(h.t(c.xi2), rng);
    cases.push_back(std::move(c));
  }
  int fail_src = 0, fail1 = 0, fail2 = 0, fail3 = 0;
  nlohmann::json w_src = nullptr, w1 = nullptr, w2 = nullptr, w3 = nullptr;
  for (const auto& c : cases) {
    const nlohmann::json w = {{"p", c.p}, {"q", c.q}, {"xi1", c.xi1}, {"xi2", c.xi2}};
    if (!n.related(c.p, c.q)) throw PreconditionFailed("nss_check: sampled pair is not in R");
    const Arrow xi2p = n.theta(c.p, c.q, c.xi2);
    if (h.object_gap(h.s(xi2p), c.p) > h.object_tol) {
      ++fail_src;
      if (w_src.is_null()) w_src = w;
      continue;
    }
    if (!n.related(h.t(xi2p), h.t(c.xi2))) {
      ++fail1;
      if (w1.is_null()) w1 = w;
    }
    if (!same_coset(n, n.theta(c.p, c.q, h.identity(c.q)), h.identity(c.p))) {
      ++fail2;
      if (w2.is_null()) w2 = w;
    }
    const Arrow xi1p = n.theta(h.t(xi2p), h.t(c.xi2), c.xi1);
    const Arrow lhs = n.theta(c.p, c.q, h.compose(c.xi1, c.xi2));
    bool ok3 = h.object_gap(h.s(xi1p), h.t(xi2p)) <= h.object_tol && same_coset(n, lhs, h.compose(xi1p, xi2p));
    if (!ok3) {
      ++fail3;
      if (w3.is_null()) w3 = w;
    }
  }
  const std::string detail = std::to_string(cases.size()) + " samples";
  rep.add("theta lands over p", fail_src == 0, detail, w_src);
  rep.add("condition 1: targets stay related", fail1 == 0, detail, w1);
  rep.add("condition 2: identity cosets", fail2 == 0, detail, w2);
  rep.add("condition 3: compatibility with composition", fail3 == 0, detail, w3);
  return rep;
}

namespace {

const double kTwoPi = 2 * std::numbers::pi;

double wrap_signed(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

ChartManifold spiral_cylinder() {
  return ChartManifold("cylinder", {{"theta", CoordKind::Circle, kTwoPi}, {"y"}});
}

}  // namespace

NormalSubgroupoidSystem spiral_system(double lambda) {
  const auto P = spiral_cylinder();
  auto flow_group = LieGroupModel::vector({"t"}, "R");
  GroupAction flow("flow", flow_group, P, parse_expr_list("theta + t, y + lambda*t"), {{"lambda", lambda}});
  NormalSubgroupoidSystem n;
  n.h = transformation_groupoid(flow);
  n.h.name = "H(F)";
  n.in_k = [](const Arrow& a) { return std::abs(wrap_signed(a[0])) <= 1e-9 * std::max(1.0, std::abs(a[0])); };
  n.related = [](const Point& p, const Point& q) { return std::abs(wrap_signed(p[0] - q[0])) <= 1e-9; };
  n.related_point = [](const Point& q, SplitMix64& rng) { return Point{q[0], rng.uniform(-2.0, 2.0)}; };
  // g = p_y - q_y translates q to p and acts on (t, x) by translating x
  n.theta = [](const Point& p, const Point& q, const Arrow& xi) {
    const double g = p[1] - q[1];
    return Arrow{xi[0], xi[1], xi[2] + g};
  };
  return n;
}

QuotientModel spiral_quotient_model(double lambda, int samples) {
  auto n = spiral_system(lambda);
  const ChartManifold S1("S1", {{"theta", CoordKind::Circle, kTwoPi}});
  auto u1 = LieGroupModel::circle("alpha", kTwoPi);
  GroupAction rot("rotation", u1, S1, parse_expr_list("theta + alpha"));
  QuotientModel out{transformation_groupoid(rot), nullptr, pair_groupoid(S1), nullptr, Report("spiral-quotient")};
  out.quotient.name = "U(1) x S1";
  out.cls = [S1](const Arrow& a) {
    const Point angle = S1.normalize({a[0]});
    const Point th = S1.normalize({a[1]});
    return Arrow{angle[0], th[0]};
  };
  out.to_pair = [S1](const Arrow& a) {
    const Point t = S1.normalize({a[1] + a[0]});
    return Arrow{t[0], a[1]};
  };
  const ArrowMap from_pair = [S1](const Arrow& a) {
    const Point angle = S1.normalize({a[0] - a[1]});
    return Arrow{angle[0], a[1]};
  };
  const ObjectMap pi = [S1](const Point& p) { return S1.normalize({p[0]}); };
  const ObjectMap id = [](const Point& p) { return p; };

  out.report.merge(structure_check(n.h, samples));
  out.report.merge(structure_check(out.quotient, samples));
  out.report.merge(groupoid_morphism_check(out.cls, n.h, out.quotient, pi, samples));

  SplitMix64 rng(23);
  double kgap = 0.0, tgap = 0.0;
  const auto objs = region_samples(n.h.objects, SampleBox::cube(2, 2.0), 40);
  for (int i = 0; i < samples; ++i) {
    const Point& q = objs[static_cast<std::size_t>(i) % objs.size()];
    const Arrow xi = n.h.sample_from(q, rng);
    const double m = static_cast<double>(static_cast<int>(rng.below(7)) - 3);
    const Arrow k{kTwoPi * m, n.h.t(xi)[0], n.h.t(xi)[1]};
    kgap = std::max(kgap, out.quotient.gap(out.cls(n.h.compose(k, xi)), out.cls(xi)));
    const Point p = n.related_point(q, rng);
    tgap = std::max(tgap, out.quotient.gap(out.cls(n.theta(p, q, xi)), out.cls(xi)));
  }
  out.report.add("class constant on K-cosets", kgap <= 1e-9, "", nullptr, kgap);
  out.report.add("class constant on theta-orbits", tgap <= 1e-9, "", nullptr, tgap);

  out.report.merge(groupoid_morphism_check(out.to_pair, out.quotient, out.pair, id, samples));
  double round = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Point& q = objs[static_cast<std::size_t>(i) % objs.size()];
    const Arrow a = out.quotient.sample_from(pi(q), rng);
    round = std::max(round, out.quotient.gap(from_pair(out.to_pair(a)), a));
    const Arrow b = out.pair.sample_from(pi(q), rng);
    round = std::max(round, out.pair.gap(out.to_pair(from_pair(b)), b));
  }
  out.report.add("pair groupoid isomorphism round trip", round <= 1e-9, "", nullptr, round);
  return out;
}

}  // namespace sfol
