#include "sfol/checks.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <map>
#include <numbers>
#include <sstream>

#include "sfol/errors.hpp"
#include "sfol/lie2.hpp"
#include "sfol/lifted.hpp"

namespace sfol {

namespace {

using CheckFn = std::function<Report(const Scenario&, const RunOptions&)>;

const SubmersionQuotient& need_quotient(const Scenario& s, const std::string& check) {
  if (!s.quotient) throw PreconditionFailed("check '" + check + "' needs a [submersion] section");
  return *s.quotient;
}

const GroupAction& need_action(const Scenario& s, const std::string& check) {
  if (!s.action) throw PreconditionFailed("check '" + check + "' needs [group] and [action] sections");
  return *s.action;
}

std::vector<Point> source_samples(const ChartManifold& m) {
  auto pts = region_samples(m, SampleBox::cube(m.dim(), 2.0), 60);
  if (pts.empty()) throw PreconditionFailed("no sample points in the domain of '" + m.name() + "'");
  return pts;
}

const Point& pick(const std::vector<Point>& pts, SplitMix64& rng) { return pts[rng.below(pts.size())]; }

// Counts failures of one sampled property and keeps the first witness.
struct Tally {
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
  nlohmann::json witness = nullptr;

  void see(bool ok, const nlohmann::json& w, double residual = 0.0) {
    ++cases;
    worst = std::max(worst, residual);
    if (ok) return;
    ++failures;
    if (witness.is_null()) witness = w;
  }
  void add_to(Report& rep, const std::string& name, const std::string& extra = "") const {
    std::string detail = std::to_string(cases) + " cases";
    if (!extra.empty()) detail += ", " + extra;
    if (failures > 0) detail += ", " + std::to_string(failures) + " failed";
    rep.add(name, failures == 0 && cases > 0, detail, witness, worst);
  }
};

EquivalenceOptions equivalence_options(const RunOptions& opt) {
  EquivalenceOptions eo;
  eo.tol = opt.tol;
  return eo;
}

// Evaluates a word property; geometry errors count as failures with the message as witness.
template <class F>
void guarded(Tally& t, const nlohmann::json& w, F&& property) {
  try {
    t.see(property(), w);
  } catch (const DomainTooSmall& e) {
    t.see(false, {{"case", w}, {"error", e.what()}});
  } catch (const OutOfDomain& e) {
    t.see(false, {{"case", w}, {"error", e.what()}});
  }
}

std::optional<HolonomyWord> try_random_word(const GeneratorSetPtr& set, const Point& p, SplitMix64& rng) {
  try {
    return random_word({set}, p, rng);
  } catch (const PreconditionFailed&) {
    return std::nullopt;
  }
}

double scaled_gap(const ChartManifold& m, const Point& a, const Point& b) {
  const Point d = m.difference(a, b);
  double w = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) w = std::max(w, std::abs(d[i]) / std::max(1.0, std::abs(a[i])));
  return w;
}

bool verticals_in(const FoliationModule& f, const SubmersionQuotient& q) {
  for (const auto& v : q.verticals()) {
    if (!hull_membership(v, f).pass) return false;
  }
  return true;
}

Report check_validate(const Scenario& s, const RunOptions&) {
  Report rep("validate");
  const auto inv = involutivity_check(s.F);
  nlohmann::json w = nullptr;
  if (!inv.failures.empty()) {
    const auto& f = inv.failures.front();
    w = {{"i", f.i}, {"j", f.j}, {"residual", f.residual}};
    if (f.witness) w["point"] = *f.witness;
  }
  rep.add("F is involutive", inv.pass, std::to_string(s.F.size()) + " generators", w);
  if (s.quotient) rep.merge(s.quotient->validate());
  if (s.action) {
    const auto d = s.action->axiom_defects();
    rep.add("action: unit acts trivially", d.unit <= 1e-9, "", nullptr, d.unit);
    rep.add("action: compatibility", d.compatibility <= 1e-8, "", nullptr, d.compatibility);
    rep.add("action: infinitesimal generators", d.generator <= 1e-5, "", nullptr, d.generator);
    rep.add("action: free at samples", d.freeness > 1e-3, "smallest relative displacement", nullptr, d.freeness);
  }
  return rep;
}

Report check_invariance(const Scenario& s, const RunOptions&) {
  return invariance_check(s.F, need_quotient(s, "invariance"));
}

Report check_pushforward(const Scenario& s, const RunOptions&) {
  Report rep("pushforward");
  const auto& q = need_quotient(s, "pushforward");
  std::optional<PushforwardFoliation> push;
  try {
    push = pushforward_foliation(s.F, q);
  } catch (const PreconditionFailed& e) {
    rep.add("generators are projectable", false, e.what());
    return rep;
  }
  std::string fields;
  for (const auto& x : push->module.generators()) fields += (fields.empty() ? "" : "; ") + x.to_string();
  rep.add("generators are projectable", true, "F_M = <" + fields + ">");
  const auto pb = pullback_foliation(push->module, q);
  Tally t;
  for (std::size_t i = 0; i < s.F.size(); ++i) {
    const auto m = pointwise_membership(s.F.generators()[i], pb);
    t.see(m.pass, m.witness ? nlohmann::json{{"generator", i}, {"point", *m.witness}} : nlohmann::json(nullptr),
          m.worst_residual);
  }
  t.add_to(rep, "F lies in the pullback of F_M");
  return rep;
}

Report check_pullback(const Scenario& s, const RunOptions&) {
  Report rep("pullback");
  const auto& q = need_quotient(s, "pullback");
  const auto push = pushforward_foliation(s.F, q);
  const auto pb = pullback_foliation(push.module, q);
  rep.add("pullback is involutive", involutivity_check(pb).pass, std::to_string(pb.size()) + " generators");
  Tally vert;
  for (const auto& v : q.verticals()) {
    const auto m = pointwise_membership(v, pb);
    vert.see(m.pass, m.witness ? nlohmann::json(*m.witness) : nlohmann::json(nullptr), m.worst_residual);
  }
  vert.add_to(rep, "verticals lie in the pullback");
  Tally gens;
  for (const auto& x : s.F.generators()) {
    const auto m = pointwise_membership(x, pb);
    gens.see(m.pass, m.witness ? nlohmann::json(*m.witness) : nlohmann::json(nullptr), m.worst_residual);
  }
  gens.add_to(rep, "F lies in the pullback");
  return rep;
}

Report check_xi_morphism(const Scenario& s, const RunOptions& opt) {
  Report rep("xi-morphism");
  const auto& q = need_quotient(s, "xi-morphism");
  const auto eo = equivalence_options(opt);
  const auto pts = source_samples(s.P);
  SplitMix64 rng(opt.seed);
  Tally comp, inv, unit, ends;
  int skipped = 0;
  for (int i = 0; i < opt.samples; ++i) {
    const Point& p = pick(pts, rng);
    auto w1 = try_random_word(s.F.generator_set(), p, rng);
    auto w2 = w1 ? try_random_word(s.F.generator_set(), w1->target(), rng) : std::nullopt;
    if (!w1 || !w2) {
      ++skipped;
      continue;
    }
    const nlohmann::json w = {{"w1", word_to_json(*w1)}, {"w2", word_to_json(*w2)}};
    guarded(comp, w, [&] { return equivalent(xi(compose(*w2, *w1), q), compose(xi(*w2, q), xi(*w1, q)), eo); });
    guarded(inv, w, [&] { return equivalent(xi(invert(*w1), q), invert(xi(*w1, q)), eo); });
    guarded(unit, w, [&] {
      return equivalent(xi(identity_word(s.P, p), q), identity_word(q.M(), q.project(p)), eo);
    });
    const auto x1 = xi(*w1, q);
    const double gap = std::max(q.M().distance(x1.source(), q.project(w1->source())),
                                q.M().distance(x1.target(), q.project(w1->target())));
    ends.see(gap <= 1e-6, w, gap);
  }
  comp.add_to(rep, "xi(w2 o w1) = xi(w2) o xi(w1)", std::to_string(skipped) + " skipped at the domain boundary");
  inv.add_to(rep, "xi(w^-1) = xi(w)^-1");
  unit.add_to(rep, "xi(1_p) = 1_pi(p)");
  ends.add_to(rep, "s, t of xi(w) are pi(s(w)), pi(t(w))");
  return rep;
}

Report check_kernel(const Scenario& s, const RunOptions& opt) {
  Report rep("kernel");
  const auto& q = need_quotient(s, "kernel");
  const auto eo = equivalence_options(opt);
  const auto pts = source_samples(s.P);
  SplitMix64 rng(opt.seed + 1);
  std::vector<HolonomyWord> words;
  for (std::size_t i = 0; i < s.F.size(); ++i) {
    for (double c : {std::numbers::pi, 2 * std::numbers::pi}) {
      std::vector<double> coeffs(s.F.size(), 0.0);
      coeffs[i] = c;
      for (int k = 0; k < 3; ++k) {
        try {
          words.push_back(path_word(s.F.generator_set(), pick(pts, rng), coeffs));
        } catch (const OutOfDomain&) {
        }
      }
    }
  }
  for (int i = 0; i < opt.samples; ++i) {
    if (auto w = try_random_word(s.F.generator_set(), pick(pts, rng), rng)) words.push_back(std::move(*w));
  }
  Tally agree;
  int in_kernel = 0;
  for (const auto& w : words) {
    guarded(agree, word_to_json(w), [&] {
      const bool k = kernel_test(w, q).in_kernel;
      in_kernel += k;
      return k == equivalent(xi(w, q), identity_word(q.M(), q.project(w.source())), eo);
    });
  }
  agree.add_to(rep, "kernel_test agrees with xi(w) = unit", std::to_string(in_kernel) + " in the kernel");
  return rep;
}

Report check_fiber(const Scenario& s, const RunOptions& opt) {
  Report rep("fiber");
  const auto& q = need_quotient(s, "fiber");
  const auto& act = need_action(s, "fiber");
  const auto eo = equivalence_options(opt);
  const auto pts = source_samples(s.P);
  SplitMix64 rng(opt.seed + 2);
  Tally orbit, agree, value, pairs;
  for (int i = 0; i < opt.samples; ++i) {
    const Point g = act.group().random(rng);
    auto w = try_random_word(s.F.generator_set(), pick(pts, rng), rng);
    if (!w) continue;
    const nlohmann::json wj = {{"g", g}, {"w", word_to_json(*w)}};
    guarded(orbit, wj, [&] { return equivalent(xi(lifted_action(g, *w, act), q), xi(*w, q), eo); });
    try {
      const auto r = xi_fiber_test(*w, lifted_action(g, *w, act), q);
      agree.see(r.agree(), wj);
      value.see(r.value(), wj);
    } catch (const Error& e) {
      agree.see(false, {{"case", wj}, {"error", e.what()}});
    }
  }
  for (int i = 0; i < opt.samples / 5; ++i) {
    const Point& p = pick(pts, rng);
    const Point p2 = act.act(act.group().random(rng), p);
    auto w1 = try_random_word(s.F.generator_set(), p, rng);
    auto w2 = try_random_word(s.F.generator_set(), p2, rng);
    if (!w1 || !w2) continue;
    const nlohmann::json wj = {{"w1", word_to_json(*w1)}, {"w2", word_to_json(*w2)}};
    try {
      pairs.see(xi_fiber_test(*w1, *w2, q).agree(), wj);
    } catch (const Error& e) {
      pairs.see(false, {{"case", wj}, {"error", e.what()}});
    }
  }
  orbit.add_to(rep, "xi(g w) = xi(w)");
  agree.add_to(rep, "xi_fiber_test paths agree on (w, g w)");
  value.add_to(rep, "xi_fiber_test holds on (w, g w)");
  pairs.add_to(rep, "xi_fiber_test paths agree on random pairs");
  return rep;
}

Report check_fibration(const Scenario& s, const RunOptions& opt) {
  const auto& q = need_quotient(s, "fibration");
  const auto push = pushforward_foliation(s.F, q);
  FibrationOptions fo;
  fo.budget = opt.budget;
  fo.seed = opt.seed;
  return fibration_check(q, s.F, fibration_witnesses(s, push), fo);
}

Report check_product(const Scenario& s, const RunOptions& opt) {
  need_action(s, "product");
  return product_foliation_assumption_check(need_quotient(s, "product"), s.F, 8, opt.seed + 3);
}

Report check_ideal(const Scenario& s, const RunOptions&) {
  Report rep("ideal");
  const auto& act = need_action(s, "ideal");
  const auto ideal = compute_ideal(s.F, act);
  const std::string dim = "dim " + std::to_string(ideal.dim()) + " of " + std::to_string(act.group().dim());
  rep.add("basis generators lie in F", ideal.residual <= 1e-7, dim, nullptr, ideal.residual);
  rep.add("closed under brackets with g", ideal.closed, dim);
  return rep;
}

Report check_nss(const Scenario& s, const RunOptions& opt) {
  const auto& q = need_quotient(s, "nss");
  const auto& act = need_action(s, "nss");
  if (s.F.size() != 1) throw PreconditionFailed("check 'nss' supports foliations with one generator");
  NormalSubgroupoidSystem n;
  n.h = flow_groupoid(s.F.generators()[0]);
  const auto set = s.F.generator_set();
  n.in_k = [set, &q](const Arrow& a) {
    return kernel_test(path_word(set, Point(a.begin() + 1, a.end()), {a[0]}), q).in_kernel;
  };
  n.related = [&q](const Point& p, const Point& r) { return q.M().distance(q.project(p), q.project(r)) <= 1e-6; };
  n.related_point = [&act](const Point& r, SplitMix64& rng) { return act.act(act.group().random(rng), r); };
  n.theta = [](const Point& p, const Point&, const Arrow& x) {
    Arrow out{x[0]};
    out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  return nss_check(n, opt.samples, opt.seed + 4);
}

Report check_lie2(const Scenario& s, const RunOptions& opt) {
  Report rep("lie2");
  const auto& q = need_quotient(s, "lie2");
  const auto& act = need_action(s, "lie2");
  const auto eo = equivalence_options(opt);
  const auto ideal = compute_ideal(s.F, act);
  const auto cm = ideal_crossed_module(act.group(), ideal);
  rep.merge(crossed_module_check(cm, opt.samples, opt.seed + 5));
  const Lie2Group l = semidirect_product(cm);
  rep.merge(l.axiom_check(opt.samples, opt.seed + 6));
  WordAction star = [&](const Point& hg, const HolonomyWord& w) {
    return two_group_action(l, hg, w, act, s.F, ideal);
  };
  rep.merge(word_action_axiom_check(star, l, act, s.F, opt.samples, opt.seed + 7));

  if (!verticals_in(s.F, q)) return rep;
  const auto push = pushforward_foliation(s.F, q);
  if (push.module.size() == 1 && q.section()) {
    const auto pg = pullback_groupoid(flow_groupoid(push.module.generators()[0]), q);
    FlatAction flat = [&](const Point& hg, const Arrow& a) { return star_pullback(l, act, hg, a); };
    rep.merge(action_axiom_check(flat, l, pg, act, opt.samples, opt.seed + 8));
  }

  const auto pts = source_samples(s.P);
  SplitMix64 rng(opt.seed + 9);
  const auto& G = act.group();
  Tally fact1, fact2, same;
  for (int i = 0; i < opt.samples; ++i) {
    const Point& p = pick(pts, rng);
    const Point g = G.random(rng);
    auto w = try_random_word(s.F.generator_set(), p, rng);
    if (!w) continue;
    if (ideal.dim() == static_cast<int>(G.dim())) {
      const Point h = G.random(rng);
      const nlohmann::json wj = {{"g", g}, {"h", h}, {"p", p}, {"w", word_to_json(*w)}};
      guarded(fact1, wj, [&] {
        return equivalent(lifted_action(g, phi(h, p, act, s.F, ideal), act),
                          phi(G.conj(g, h), act.act(g, p), act, s.F, ideal), eo);
      });
      guarded(fact2, wj, [&] {
        const auto rhs = compose(phi(h, w->target(), act, s.F, ideal),
                                 compose(*w, phi(G.inverse(h), act.act(h, w->source()), act, s.F, ideal)));
        return equivalent(lifted_action(h, *w, act), rhs, eo);
      });
    }
    const Point hg = l.random(rng);
    const nlohmann::json wj = {{"hg", hg}, {"w", word_to_json(*w)}};
    guarded(same, wj, [&] {
      const auto a = varphi(star(hg, *w), q, s.F);
      const auto b = star_pullback(l, act, hg, varphi(*w, q, s.F), q);
      return scaled_gap(s.P, a.target, b.target) <= opt.tol && scaled_gap(s.P, a.source, b.source) <= opt.tol &&
             equivalent(a.down, b.down, eo);
    });
  }
  if (ideal.dim() == static_cast<int>(G.dim())) {
    fact1.add_to(rep, "equivariance i: g phi(h, p) = phi(c_g h, g p)");
    fact2.add_to(rep, "equivariance ii: h w = phi(h, t(w)) o w o phi(h^-1, h s(w))");
  }
  same.add_to(rep, "varphi((h,g) w) = (h,g) * varphi(w)");
  return rep;
}

Report check_numeric(const Scenario&, const RunOptions& opt) { return numeric_foundations_check(20, opt.seed); }

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> checks = {
      {"validate", check_validate},   {"invariance", check_invariance}, {"pushforward", check_pushforward},
      {"pullback", check_pullback},   {"xi-morphism", check_xi_morphism}, {"kernel", check_kernel},
      {"fiber", check_fiber},         {"fibration", check_fibration},   {"product", check_product},
      {"ideal", check_ideal},         {"nss", check_nss},               {"lie2", check_lie2},
      {"numeric", check_numeric},
  };
  return checks;
}

std::string number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return "(" + os.str() + ")";
}

}  // namespace

RunOptions default_options(const Scenario& s) {
  RunOptions opt;
  opt.seed = s.seed;
  opt.budget = s.budget;
  opt.tol = s.tol;
  return opt;
}

std::vector<std::string> check_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

Report run_check(const Scenario& s, const std::string& name, const RunOptions& opt) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw PreconditionFailed("unknown check '" + name + "'");
  Report rep = it->second(s, opt);
  if (rep.check() != name) {
    Report named(name);
    for (const auto& a : rep.assertions()) named.add(a.name, a.pass, a.detail, a.witness, a.residual);
    return named;
  }
  return rep;
}

std::vector<Report> run_checks(const Scenario& s, const std::vector<std::string>& names, const RunOptions& opt) {
  for (const auto& n : names) {
    if (!registry().contains(n)) throw PreconditionFailed("unknown check '" + n + "'");
  }
  std::vector<std::future<Report>> jobs;
  for (const auto& n : names) jobs.push_back(std::async(std::launch::async, [&s, n, &opt] { return run_check(s, n, opt); }));
  std::vector<Report> out;
  for (auto& j : jobs) out.push_back(j.get());
  std::sort(out.begin(), out.end(), [](const Report& a, const Report& b) { return a.check() < b.check(); });
  return out;
}

GroupoidModel flow_groupoid(const VectorField& x, double time_scale) {
  GroupoidModel h;
  const ChartManifold& m = x.manifold();
  h.name = "flow(" + x.to_string() + ")";
  h.objects = m;
  std::vector<Coordinate> coords{{"t"}};
  for (const auto& c : m.coords()) coords.push_back(c);
  h.arrows = ChartManifold(h.name, std::move(coords));
  h.object_tol = 1e-6;
  h.s = [](const Arrow& a) { return Point(a.begin() + 1, a.end()); };
  h.t = [x](const Arrow& a) {
    const auto r = flow(x, Point(a.begin() + 1, a.end()), a[0]);
    if (!r.ok()) throw PreconditionFailed("flow_groupoid: " + r.message);
    return r.endpoint;
  };
  h.compose_raw = [](const Arrow& a2, const Arrow& a1) {
    Arrow out = a1;
    out[0] += a2[0];
    return out;
  };
  h.invert = [t = h.t](const Arrow& a) {
    Arrow out{-a[0]};
    const Point q = t(a);
    out.insert(out.end(), q.begin(), q.end());
    return out;
  };
  h.identity = [](const Point& p) {
    Arrow out{0.0};
    out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  h.sample_from = [time_scale](const Point& p, SplitMix64& rng) {
    Arrow out{rng.uniform(-time_scale, time_scale)};
    out.insert(out.end(), p.begin(), p.end());
    return out;
  };
  return h;
}

Report numeric_foundations_check(int fields, std::uint64_t seed) {
  Report rep("numeric");
  const ChartManifold plane("R2", {{"x"}, {"y"}});
  SplitMix64 rng(seed);
  std::vector<VectorField> xs;
  std::vector<std::string> texts;
  for (int i = 0; i < fields; ++i) {
    std::vector<Expr> comps;
    std::string text;
    for (int k = 0; k < 2; ++k) {
      double c[6];
      for (double& v : c) v = rng.uniform(-1.0, 1.0);
      const std::string e = number(c[0]) + " + " + number(c[1]) + "*x + " + number(c[2]) + "*y + " + number(c[3]) +
                            "*sin(x + " + number(c[4]) + "*y) + " + number(c[5]) + "*cos(y)";
      comps.push_back(parse_expr(e));
      text += (k ? ", " : "") + e;
    }
    xs.emplace_back(plane, std::move(comps));
    texts.push_back(text);
  }
  auto sample_point = [&] { return Point{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)}; };

  Tally bracket, composition, inversion, jacobi;
  const double h = 1e-5;
  for (int i = 0; i < fields; ++i) {
    const auto& x = xs[static_cast<std::size_t>(i)];
    const auto& y = xs[static_cast<std::size_t>((i + 1) % fields)];
    const auto& z = xs[static_cast<std::size_t>((i + 2) % fields)];
    const auto b = lie_bracket(x, y);
    for (int k = 0; k < 5; ++k) {
      const Point p = sample_point();
      const Point xv = x(p), yv = y(p), bv = b(p);
      auto along = [&](const VectorField& f, const Point& v) {
        const Point fp = f({p[0] + h * v[0], p[1] + h * v[1]});
        const Point fm = f({p[0] - h * v[0], p[1] - h * v[1]});
        return Point{(fp[0] - fm[0]) / (2 * h), (fp[1] - fm[1]) / (2 * h)};
      };
      const Point dy = along(y, xv), dx = along(x, yv);
      double err = 0.0;
      for (int c = 0; c < 2; ++c) err = std::max(err, std::abs(bv[c] - (dy[c] - dx[c])) / std::max(1.0, std::abs(bv[c])));
      bracket.see(err <= 1e-6, {{"X", texts[i]}, {"p", p}}, err);
    }
    for (int k = 0; k < 3; ++k) {
      const Point p = sample_point();
      const double s = rng.uniform(-0.3, 0.3), t = rng.uniform(-0.3, 0.3);
      const auto a = flow(x, flow(x, p, s).endpoint, t);
      const auto c = flow(x, p, s + t);
      const double gap = scaled_gap(plane, c.endpoint, a.endpoint);
      composition.see(a.ok() && c.ok() && gap <= 1e-6, {{"X", texts[i]}, {"p", p}, {"s", s}, {"t", t}}, gap);
      const auto back = flow(x, flow(x, p, t).endpoint, -t);
      const double gap2 = scaled_gap(plane, p, back.endpoint);
      inversion.see(back.ok() && gap2 <= 1e-6, {{"X", texts[i]}, {"p", p}, {"t", t}}, gap2);
    }
    const auto j = lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) + lie_bracket(z, lie_bracket(x, y));
    bool ok = true;
    for (const auto& comp : j.components()) ok = ok && numerically_equal(comp, parse_expr("0"), plane);
    jacobi.see(ok, {{"X", texts[i]}});
  }
  bracket.add_to(rep, "bracket matches central differences (h = 1e-5, tol 1e-6)");
  composition.add_to(rep, "flow composition phi_t phi_s = phi_(s+t) (tol 1e-6)");
  inversion.add_to(rep, "flow inversion phi_-t phi_t = id (tol 1e-6)");
  jacobi.add_to(rep, "Jacobi identity (tol 1e-9)");
  return rep;
}

}  // namespace sfol
