#include "sfol/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>

#include "sfol/errors.hpp"
#include "sfol/lifted.hpp"

namespace sfol {

struct SubmersionQuotient::Impl {
  std::string name;
  SmoothMap pi;
  std::optional<std::vector<Expr>> section;
  std::vector<VectorField> verticals;
  GroupActionPtr action;
  std::vector<Program> pi_prog;
  std::vector<Program> section_prog;
  std::optional<std::vector<std::size_t>> slots;

  std::mutex mutex;
  std::map<const GeneratorSet*, std::pair<GeneratorSetPtr, GeneratorSetPtr>> projected;
};

SubmersionQuotient::SubmersionQuotient(std::string name, SmoothMap pi, std::optional<std::vector<Expr>> section,
                                       std::vector<VectorField> verticals, GroupActionPtr action) {
  if (pi.components.size() != pi.target.dim()) throw DimensionMismatch("submersion '" + name + "': map components");
  if (section && section->size() != pi.source.dim())
    throw DimensionMismatch("submersion '" + name + "': section components");
  for (const auto& v : verticals) {
    if (!v.manifold().same_as(pi.source)) throw ManifoldMismatch("submersion '" + name + "': vertical field manifold");
  }
  if (action && !action->space().same_as(pi.source))
    throw ManifoldMismatch("submersion '" + name + "': action acts on another manifold");
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  impl->pi = std::move(pi);
  impl->section = std::move(section);
  impl->verticals = std::move(verticals);
  impl->action = std::move(action);
  for (const auto& c : impl->pi.components) impl->pi_prog.emplace_back(c, impl->pi.source.names());
  if (impl->section) {
    for (const auto& c : *impl->section) impl->section_prog.emplace_back(c, impl->pi.target.names());
  }
  impl->slots = impl->pi.projection_slots();
  impl_ = std::move(impl);
}

const std::string& SubmersionQuotient::name() const { return impl_->name; }
const SmoothMap& SubmersionQuotient::map() const { return impl_->pi; }
const ChartManifold& SubmersionQuotient::P() const { return impl_->pi.source; }
const ChartManifold& SubmersionQuotient::M() const { return impl_->pi.target; }
const std::optional<std::vector<Expr>>& SubmersionQuotient::section() const { return impl_->section; }
const std::vector<VectorField>& SubmersionQuotient::verticals() const { return impl_->verticals; }
const GroupActionPtr& SubmersionQuotient::action() const { return impl_->action; }

Point SubmersionQuotient::project(const Point& p) const {
  const Point q = P().normalize(p);
  Point out;
  for (const auto& pr : impl_->pi_prog) out.push_back(pr(q));
  return M().normalize(out);
}

Point SubmersionQuotient::lift(const Point& m) const {
  if (!impl_->section) throw PreconditionFailed("submersion '" + name() + "' has no section");
  const Point q = M().normalize(m);
  Point out;
  for (const auto& pr : impl_->section_prog) out.push_back(pr(q));
  return P().normalize(out);
}

std::optional<Point> SubmersionQuotient::fiber_point(const Point& m, SplitMix64& rng) const {
  if (impl_->slots) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      Point p(P().dim());
      for (auto& v : p) v = rng.uniform(-3.0, 3.0);
      for (std::size_t i = 0; i < impl_->slots->size(); ++i) p[(*impl_->slots)[i]] = m[i];
      if (P().contains(p)) return P().normalize(p);
    }
  }
  if (impl_->section) {
    Point p = lift(m);
    if (P().contains(p)) return p;
  }
  return std::nullopt;
}

GeneratorSetPtr SubmersionQuotient::projected(const GeneratorSetPtr& set) const {
  {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    auto it = impl_->projected.find(set.get());
    if (it != impl_->projected.end()) return it->second.second;
  }
  if (!set->manifold.same_as(P())) throw ManifoldMismatch("projection: generator set lives on another manifold");
  std::vector<VectorField> fields;
  for (std::size_t i = 0; i < set->size(); ++i) {
    auto r = pushforward_field(set->fields[i], impl_->pi, impl_->section);
    if (auto* np = std::get_if<NotProjectable>(&r))
      throw PreconditionFailed("generator " + std::to_string(i) + " of '" + set->name + "' is not projectable (" +
                               np->reason + "); supply a generating set of projectable or vertical fields");
    fields.push_back(std::get<VectorField>(r));
  }
  auto out = make_generator_set(set->name + "_M", std::move(fields));
  std::lock_guard<std::mutex> lock(impl_->mutex);
  impl_->projected.emplace(set.get(), std::make_pair(set, out));
  return out;
}

Report SubmersionQuotient::validate() const {
  Report rep("submersion");
  const auto msamples = region_samples(M(), SampleBox::cube(M().dim()), 40);
  if (impl_->section) {
    double worst = 0.0;
    for (const auto& m : msamples) worst = std::max(worst, M().distance(project(lift(m)), m));
    rep.add("section is a right inverse", worst <= 1e-9, "", nullptr, worst);
  }
  double vert = 0.0;
  for (const auto& v : impl_->verticals) {
    for (const auto& c : impl_->pi.components) {
      if (!numerically_equal(apply(v, c), Expr(0.0), P())) vert = 1.0;
    }
  }
  rep.add("verticals lie in ker dpi", vert == 0.0);
  // submersion rank
  const auto psamples = region_samples(P(), SampleBox::cube(P().dim()), 40);
  int low_rank = 0;
  for (const auto& p : psamples) {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(M().dim()), static_cast<Eigen::Index>(P().dim()));
    for (std::size_t a = 0; a < M().dim(); ++a) {
      for (std::size_t b = 0; b < P().dim(); ++b) {
        j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            Program(diff(impl_->pi.components[a], P().names()[b]), P().names())(P().normalize(p));
      }
    }
    if (numeric_rank(j) < static_cast<int>(M().dim())) ++low_rank;
  }
  rep.add("dpi has full rank", low_rank == 0, std::to_string(low_rank) + " rank-deficient samples");
  if (!impl_->verticals.empty() && impl_->slots) {
    FoliationModule vmod(name() + "_vertical", impl_->verticals);
    SplitMix64 rng(99);
    bool connected = true;
    nlohmann::json witness = nullptr;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, msamples.size()); ++i) {
      const Point& m = msamples[(i * 7) % msamples.size()];
      auto a = fiber_point(m, rng);
      auto b = fiber_point(m, rng);
      if (!a || !b) continue;
      auto leaf = leaf_sample(vmod, *a, 3000);
      if (!leaf.reached(*b, 0.1)) {
        connected = false;
        witness = {{"from", *a}, {"to", *b}};
      }
    }
    rep.add("sampled fibers are connected", connected, "", witness);
  }
  return rep;
}

Report invariance_check(const FoliationModule& f, const SubmersionQuotient& q, const std::optional<SampleBox>& region) {
  Report rep("invariance");
  std::vector<VectorField> big = q.verticals();
  big.insert(big.end(), f.generators().begin(), f.generators().end());
  FoliationModule bigmod(f.name() + "+vertical", big);
  const SampleBox box = region.value_or(SampleBox::cube(f.manifold().dim()));
  const auto samples = region_samples(f.manifold(), box);
  for (std::size_t i = 0; i < q.verticals().size(); ++i) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      auto m = pointwise_membership(lie_bracket(q.verticals()[i], f.generators()[j]), bigmod, samples);
      rep.add("[V" + std::to_string(i) + ",X" + std::to_string(j) + "] in verticals + F (pointwise)", m.pass, "",
              m.witness ? nlohmann::json(*m.witness) : nlohmann::json(nullptr), m.worst_residual);
    }
  }
  if (q.verticals().empty()) rep.add("no vertical generators", true);
  return rep;
}

PushforwardFoliation pushforward_foliation(const FoliationModule& f, const SubmersionQuotient& q) {
  PushforwardFoliation out;
  out.aligned = q.projected(f.generator_set());
  std::vector<VectorField> gens;
  for (std::size_t i = 0; i < out.aligned->size(); ++i) {
    const auto& y = out.aligned->fields[i];
    const bool zero = y.is_symbolically_zero() ||
                      std::all_of(y.components().begin(), y.components().end(),
                                  [&](const Expr& c) { return numerically_equal(c, Expr(0.0), q.M()); });
    if (zero) continue;
    gens.push_back(y);
    out.origin.push_back(i);
  }
  if (gens.empty()) {
    gens.push_back(VectorField::zero(q.M()));
    out.origin.push_back(0);
  }
  out.module = FoliationModule(f.name() + "_M", std::move(gens));
  return out;
}

FoliationModule pullback_foliation(const FoliationModule& fm, const SubmersionQuotient& q) {
  const auto slots = q.map().projection_slots();
  if (!q.section() && !slots)
    throw PreconditionFailed("pullback_foliation: submersion '" + q.name() + "' has no section and is not a coordinate projection");
  if (!fm.manifold().same_as(q.M())) throw ManifoldMismatch("pullback_foliation: foliation does not live on the base");
  std::map<std::string, Expr> down;
  for (std::size_t j = 0; j < q.M().dim(); ++j) down.emplace(q.M().names()[j], q.map().components[j]);
  std::vector<VectorField> gens = q.verticals();
  if (!fm.is_zero()) {
    for (const auto& y : fm.generators()) {
      std::vector<Expr> comps;
      if (!q.section()) {
        comps.assign(q.P().dim(), Expr::constant(0.0));
        for (std::size_t j = 0; j < q.M().dim(); ++j) comps[(*slots)[j]] = substitute(y.components()[j], down);
        gens.emplace_back(q.P(), comps);
        continue;
      }
      for (const auto& s : *q.section()) {
        std::vector<Expr> terms;
        for (std::size_t j = 0; j < q.M().dim(); ++j) terms.push_back(diff(s, q.M().names()[j]) * y.components()[j]);
        comps.push_back(substitute(make_sum(std::move(terms)), down));
      }
      gens.emplace_back(q.P(), comps);
    }
  }
  if (gens.empty()) gens.push_back(VectorField::zero(q.P()));
  return FoliationModule(fm.name() + "_pullback", std::move(gens));
}

HolonomyWord xi(const HolonomyWord& w, const SubmersionQuotient& q) {
  if (!w.manifold().same_as(q.P())) throw ManifoldMismatch("xi: word does not live on the total space");
  std::vector<Step> steps;
  for (const auto& s : w.steps()) {
    if (const auto* ps = std::get_if<PathStep>(&s)) steps.emplace_back(PathStep{q.projected(ps->set), ps->coeffs});
  }
  return HolonomyWord(q.M(), q.project(w.source()), std::move(steps));
}

namespace {

std::vector<Point> slice_points(const SubmersionQuotient& q, const Point& s, double r, int n) {
  const std::size_t dm = q.M().dim();
  std::vector<Point> out{s};
  const auto deltas = ball_samples(Point(dm, 0.0), r, n);
  const auto slots = q.map().projection_slots();
  if (slots) {
    for (const auto& d : deltas) {
      Point x = s;
      for (std::size_t i = 0; i < dm; ++i) x[(*slots)[i]] += d[i];
      out.push_back(std::move(x));
    }
  } else if (q.section()) {
    const Point m0 = q.project(s);
    for (const auto& d : deltas) {
      Point x = s;
      for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = 0; j < dm; ++j) {
          x[i] += Program(diff((*q.section())[i], q.M().names()[j]), q.M().names())(m0) * d[j];
        }
      }
      out.push_back(std::move(x));
    }
  } else {
    for (auto& p : ball_samples(s, r, n)) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

KernelResult kernel_test(const HolonomyWord& w, const SubmersionQuotient& q, double r) {
  if (!w.manifold().same_as(q.P())) throw ManifoldMismatch("kernel_test: word does not live on the total space");
  for (double radius = r; radius >= 1e-4; radius *= 0.5) {
    std::vector<std::pair<Point, Point>> images;
    bool ok = true;
    for (const auto& x : slice_points(q, w.source(), radius, 20)) {
      auto fx = w.transport(x);
      if (!fx) {
        ok = false;
        break;
      }
      images.emplace_back(x, *fx);
    }
    if (!ok) continue;
    KernelResult res;
    res.radius = radius;
    for (const auto& [x, fx] : images) {
      const Point a = q.project(x);
      const Point d = q.M().difference(a, q.project(fx));
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double scaled = std::abs(d[i]) / std::max(1.0, std::abs(a[i]));
        if (scaled > res.worst) {
          res.worst = scaled;
          res.witness = x;
        }
      }
    }
    res.in_kernel = res.worst <= 1e-5;
    if (res.in_kernel) res.witness.reset();
    return res;
  }
  throw DomainTooSmall("kernel_test: no slice of radius >= 1e-4 maps into the domain", 0.0);
}

std::optional<Point> solve_translation(const GroupAction& a, const Point& p, const Point& q) {
  const auto& G = a.group();
  const auto& P = a.space();
  const std::size_t d = G.dim();
  SplitMix64 rng(0x7a5);
  auto residual = [&](const Point& g) { return P.difference(q, a.act(g, p)); };
  auto norm = [](const Point& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };
  for (int start = 0; start < 12; ++start) {
    Point g = start == 0 ? G.unit() : G.random(rng, 2.0);
    for (int it = 0; it < 60; ++it) {
      const Point r = residual(g);
      const double rn = norm(r);
      if (rn < 1e-11) return G.normalize(g);
      Eigen::MatrixXd jac(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(d));
      const double h = 1e-7;
      for (std::size_t k = 0; k < d; ++k) {
        Point gp = g, gm = g;
        gp[k] += h;
        gm[k] -= h;
        const Point rp = residual(gp), rm = residual(gm);
        for (std::size_t i = 0; i < r.size(); ++i)
          jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (rp[i] - rm[i]) / (2 * h);
      }
      Eigen::VectorXd rv = Eigen::Map<const Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
      Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-rv);
      double lambda = 1.0;
      bool improved = false;
      for (int ls = 0; ls < 30; ++ls) {
        Point trial = g;
        for (std::size_t k = 0; k < d; ++k) trial[k] += lambda * step(static_cast<Eigen::Index>(k));
        if (G.contains(trial) && norm(residual(trial)) < rn) {
          g = trial;
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) break;
    }
    if (norm(residual(g)) < 1e-9) return G.normalize(g);
  }
  return std::nullopt;
}

XiFiberResult xi_fiber_test(const HolonomyWord& w1, const HolonomyWord& w2, const SubmersionQuotient& q) {
  XiFiberResult res;
  if (q.M().distance(q.project(w1.source()), q.project(w2.source())) > 1e-6) return res;
  res.direct = equivalent(xi(w1, q), xi(w2, q));
  if (!q.action()) throw PreconditionFailed("xi_fiber_test: submersion '" + q.name() + "' has no action");
  res.g = solve_translation(*q.action(), w1.source(), w2.source());
  if (!res.g) return res;
  const auto lifted = lifted_action(*res.g, w1, *q.action());
  res.structural = kernel_test(compose(w2, invert(lifted)), q).in_kernel;
  return res;
}

VarphiTriple varphi(const HolonomyWord& w, const SubmersionQuotient& q, const FoliationModule& f) {
  for (std::size_t i = 0; i < q.verticals().size(); ++i) {
    if (!hull_membership(q.verticals()[i], f).pass)
      throw PreconditionFailed("varphi: vertical field " + std::to_string(i) + " is not in F (pullback case fails)");
  }
  return {w.target(), xi(w, q), w.source()};
}

namespace {

struct Lifter {
  const SubmersionQuotient& q;
  const FoliationModule& f;
  PushforwardFoliation push;

  static bool same_fields(const GeneratorSetPtr& a, const GeneratorSetPtr& b) {
    if (a == b) return true;
    if (a->size() != b->size() || !a->manifold.same_as(b->manifold)) return false;
    for (std::size_t i = 0; i < a->size(); ++i) {
      for (std::size_t k = 0; k < a->manifold.dim(); ++k) {
        if (!numerically_equal(a->fields[i].components()[k], b->fields[i].components()[k], a->manifold)) return false;
      }
    }
    return true;
  }

  // Same coefficients upstairs; nullopt if blocked by the domain.
  std::optional<HolonomyWord> lift(const HolonomyWord& zeta, const Point& p) const {
    std::vector<Step> steps;
    for (const auto& s : zeta.steps()) {
      const auto* ps = std::get_if<PathStep>(&s);
      if (!ps) throw PreconditionFailed("fibration_check: downstairs words use path steps only");
      if (same_fields(ps->set, push.aligned)) {
        steps.emplace_back(PathStep{f.generator_set(), ps->coeffs});
      } else if (same_fields(ps->set, push.module.generator_set())) {
        std::vector<double> c(f.size(), 0.0);
        for (std::size_t i = 0; i < ps->coeffs.size(); ++i) c[push.origin[i]] = ps->coeffs[i];
        steps.emplace_back(PathStep{f.generator_set(), c});
      } else {
        throw PreconditionFailed("fibration_check: step over '" + ps->set->name + "' is not over the induced foliation");
      }
    }
    try {
      return HolonomyWord(q.P(), p, std::move(steps));
    } catch (const OutOfDomain&) {
      return std::nullopt;
    } catch (const PreconditionFailed&) {
      return std::nullopt;
    }
  }
};

nlohmann::json pair_json(const HolonomyWord& zeta, const Point& p) {
  return {{"zeta", word_to_json(zeta)}, {"p", p}};
}

}  // namespace

Report fibration_check(const SubmersionQuotient& q, const FoliationModule& f,
                       const std::vector<FibrationWitness>& witnesses, const FibrationOptions& opt) {
  Report rep("fibration");
  Lifter lifter{q, f, pushforward_foliation(f, q)};
  SplitMix64 rng(opt.seed);

  struct Pair {
    HolonomyWord zeta;
    Point p;
    bool explicit_witness;
  };
  std::vector<Pair> pairs;
  for (const auto& w : witnesses) pairs.push_back({w.zeta, w.p, true});
  const auto msamples = region_samples(q.M(), SampleBox::cube(q.M().dim()), 60);
  RandomWordOptions wo;
  wo.max_steps = 3;
  for (int i = 0; i < opt.random_pairs && !msamples.empty(); ++i) {
    const Point& m = msamples[rng.below(msamples.size())];
    auto p = q.fiber_point(m, rng);
    if (!p) continue;
    pairs.push_back({random_word({lifter.push.aligned}, q.project(*p), rng, wo), *p, false});
  }

  int lifted = 0, soft = 0, unsearched = 0, failed = 0;
  nlohmann::json first_failure = nullptr;
  std::vector<std::pair<HolonomyWord, Pair>> realized;
  int searches = 0;
  for (const auto& pr : pairs) {
    if (q.M().distance(q.project(pr.p), pr.zeta.source()) > 1e-6)
      throw PreconditionFailed("fibration_check: witness point is not over the source of its downstairs word");
    auto up = lifter.lift(pr.zeta, pr.p);
    bool ok = true;
    std::string how;
    if (up) {
      ++lifted;
      how = "lifted";
      realized.emplace_back(*up, pr);
    } else if (pr.explicit_witness || searches < opt.leaf_searches) {
      ++searches;
      auto leaf = leaf_sample(f, pr.p, opt.budget, LeafOptions{.seed = opt.seed});
      bool reaches = false;
      for (const auto& x : leaf.points()) {
        if (q.M().distance(q.project(x), pr.zeta.target()) < opt.eps) {
          reaches = true;
          break;
        }
      }
      if (reaches) {
        ++soft;
        how = "soft pass: the leaf of p meets the target fiber";
      } else {
        ++failed;
        ok = false;
        how = "the leaf of p (" + std::to_string(leaf.points().size()) + " samples) does not meet the fiber over the target";
        if (first_failure.is_null()) first_failure = pair_json(pr.zeta, pr.p);
      }
    } else {
      ++unsearched;
      how = "soft pass: blocked lift, no search budget left";
    }
    if (pr.explicit_witness) {
      rep.add("witness pair realizable", ok, how, pair_json(pr.zeta, pr.p));
    }
  }
  rep.add("surjectivity", failed == 0,
          std::to_string(pairs.size()) + " pairs: " + std::to_string(lifted) + " lifted, " + std::to_string(soft) +
              " soft, " + std::to_string(unsearched) + " unsearched, " + std::to_string(failed) + " failed",
          first_failure);

  // openness: pairs near realized ones are realizable as well
  int tried = 0, open_fail = 0;
  nlohmann::json open_witness = nullptr;
  for (std::size_t i = 0; i < realized.size() && i < 8; ++i) {
    const auto& [up, pr] = realized[i];
    for (int k = 0; k < 3; ++k) {
      Point p2 = pr.p;
      for (auto& v : p2) v += rng.uniform(-0.01, 0.01);
      if (!q.P().contains(p2)) continue;
      std::vector<Step> steps;
      for (const auto& s : pr.zeta.steps()) {
        PathStep ps = std::get<PathStep>(s);
        for (auto& c : ps.coeffs) c += rng.uniform(-0.01, 0.01);
        steps.emplace_back(std::move(ps));
      }
      std::optional<HolonomyWord> zeta2;
      try {
        zeta2.emplace(q.M(), q.project(p2), std::move(steps));
      } catch (const Error&) {
        continue;
      }
      ++tried;
      if (!lifter.lift(*zeta2, p2)) {
        ++open_fail;
        if (open_witness.is_null()) open_witness = pair_json(*zeta2, p2);
      }
    }
  }
  rep.add("openness (sampled)", open_fail == 0,
          std::to_string(tried) + " perturbed pairs, " + std::to_string(open_fail) + " not liftable", open_witness);
  return rep;
}

Report product_foliation_assumption_check(const SubmersionQuotient& q, const FoliationModule& f, int n_group,
                                          std::uint64_t seed) {
  Report rep("product-assumption");
  if (!q.action()) throw PreconditionFailed("product_foliation_assumption_check: no action on '" + q.name() + "'");
  const auto& a = *q.action();
  const auto& G = a.group();
  SplitMix64 rng(seed);
  const auto samples = region_samples(f.manifold(), SampleBox::cube(f.manifold().dim()), 60);
  const double delta = 1e-3;
  for (int i = 0; i < n_group; ++i) {
    const Point g = G.random(rng);
    bool member = true;
    double worst = 0.0;
    nlohmann::json witness = nullptr;
    double jump = 0.0;
    for (const auto& x : f.generators()) {
      const auto y = a.push(g, x);
      auto m = pointwise_membership(y, f, samples);
      worst = std::max(worst, m.worst_residual);
      if (!m.pass) {
        member = false;
        if (witness.is_null()) witness = {{"g", g}, {"p", m.witness ? nlohmann::json(*m.witness) : nlohmann::json(nullptr)}};
      }
      // coefficients of g_* X in terms of F move continuously with g
      for (std::size_t k = 0; k < G.dim(); ++k) {
        Point g2 = g;
        g2[k] += delta;
        const auto y2 = a.push(g2, x);
        for (std::size_t s = 0; s < samples.size(); s += 6) {
          const auto& p = samples[s];
          const Eigen::MatrixXd A = f.generator_set()->values_at(p);
          Point v1(f.manifold().dim()), v2(f.manifold().dim());
          y.eval_into(p, v1);
          y2.eval_into(p, v2);
          auto c1 = span_solve(A, Eigen::Map<Eigen::VectorXd>(v1.data(), static_cast<Eigen::Index>(v1.size()))).first;
          auto c2 = span_solve(A, Eigen::Map<Eigen::VectorXd>(v2.data(), static_cast<Eigen::Index>(v2.size()))).first;
          jump = std::max(jump, (c2 - c1).norm());
        }
      }
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "g=%.6g", g.empty() ? 0.0 : g[0]);
    rep.add(std::string("g_*F in F (pointwise), ") + buf, member, "", witness, worst);
    rep.add(std::string("coefficients continuous in g, ") + buf, jump <= 0.1, "largest coefficient change for dg=1e-3",
            nullptr, jump);
  }
  return rep;
}

}  // namespace sfol
