#include "sfol/holonomy.hpp"

#include <cmath>

#include "sfol/errors.hpp"

namespace sfol {

namespace {

const ChartManifold& step_manifold(const Step& s) {
  if (const auto* ps = std::get_if<PathStep>(&s)) return ps->set->manifold;
  return std::get<TwistStep>(s).action->space();
}

std::optional<Point> try_step(const Step& step, const Point& p) {
  if (const auto* ps = std::get_if<PathStep>(&step)) {
    auto r = exp_combination(ps->coeffs, ps->set->fields, p);
    if (!r.ok()) return std::nullopt;
    return r.endpoint;
  }
  const auto& ts = std::get<TwistStep>(step);
  Point q = ts.action->act(ts.g, p);
  if (!ts.action->space().contains(q)) return std::nullopt;
  return q;
}

}  // namespace

Point apply_step(const Step& step, const Point& p) {
  if (const auto* ps = std::get_if<PathStep>(&step)) {
    auto r = exp_combination(ps->coeffs, ps->set->fields, p);
    if (r.status == FlowStatus::LeftDomain) throw OutOfDomain("flow along '" + ps->set->name + "' leaves the domain");
    if (r.status == FlowStatus::StepFailure)
      throw PreconditionFailed("flow along '" + ps->set->name + "' failed: " + r.message);
    return r.endpoint;
  }
  auto q = try_step(step, p);
  if (!q) throw OutOfDomain("group translate leaves the domain");
  return *q;
}

HolonomyWord::HolonomyWord(ChartManifold m, Point source, std::vector<Step> steps)
    : m_(std::move(m)), steps_(std::move(steps)) {
  if (!m_.contains(source)) throw OutOfDomain("word source outside the domain of '" + m_.name() + "'");
  source_ = m_.normalize(std::move(source));
  Point p = source_;
  for (const auto& s : steps_) {
    if (const auto* ps = std::get_if<PathStep>(&s)) {
      if (!ps->set) throw PreconditionFailed("path step without generator set");
      if (ps->coeffs.size() != ps->set->size())
        throw DimensionMismatch("path step over '" + ps->set->name + "' has " + std::to_string(ps->coeffs.size()) +
                                " coefficients");
    } else if (!std::get<TwistStep>(s).action) {
      throw PreconditionFailed("twist step without action");
    }
    if (!step_manifold(s).same_as(m_)) throw ManifoldMismatch("word step lives on another manifold");
    p = apply_step(s, p);
  }
  target_ = std::move(p);
}

std::optional<Point> HolonomyWord::transport(const Point& p) const {
  if (!m_.contains(p)) return std::nullopt;
  Point q = p;
  for (const auto& s : steps_) {
    auto r = try_step(s, q);
    if (!r) return std::nullopt;
    q = std::move(*r);
  }
  return m_.normalize(q);
}

HolonomyWord identity_word(const ChartManifold& m, const Point& p) { return HolonomyWord(m, p); }

HolonomyWord invert(const HolonomyWord& w) {
  std::vector<Step> steps;
  for (auto it = w.steps().rbegin(); it != w.steps().rend(); ++it) {
    if (const auto* ps = std::get_if<PathStep>(&*it)) {
      PathStep inv{ps->set, ps->coeffs};
      for (auto& c : inv.coeffs) c = -c;
      steps.emplace_back(std::move(inv));
    } else {
      const auto& ts = std::get<TwistStep>(*it);
      steps.emplace_back(TwistStep{ts.action, ts.action->group().inverse(ts.g)});
    }
  }
  return HolonomyWord(w.manifold(), w.target(), std::move(steps));
}

HolonomyWord compose(const HolonomyWord& w2, const HolonomyWord& w1) {
  if (!w1.manifold().same_as(w2.manifold())) throw ManifoldMismatch("compose: words on different manifolds");
  const double gap = w1.manifold().distance(w1.target(), w2.source());
  if (gap > 1e-6)
    throw PreconditionFailed("compose: target of the first word and source of the second differ by " +
                             std::to_string(gap));
  std::vector<Step> steps = w1.steps();
  steps.insert(steps.end(), w2.steps().begin(), w2.steps().end());
  return HolonomyWord(w1.manifold(), w1.source(), std::move(steps));
}

HolonomyWord path_word(const GeneratorSetPtr& set, const Point& source, std::vector<double> coeffs) {
  return HolonomyWord(set->manifold, source, {PathStep{set, std::move(coeffs)}});
}

Point CarriedDiffeo::operator()(const Point& q) const {
  auto r = word.transport(q);
  if (!r) throw OutOfDomain("carried diffeomorphism undefined at the requested point");
  return *r;
}

namespace {

// Sample points of the ball of radius r around q, q first.
std::vector<Point> ball_with_center(const Point& q, double r, int n) {
  std::vector<Point> pts{q};
  for (auto& p : ball_samples(q, r, n)) pts.push_back(std::move(p));
  return pts;
}

}  // namespace

CarriedDiffeo carried_diffeo(const HolonomyWord& w, double r) {
  auto fits = [&](double radius) {
    for (const auto& p : ball_with_center(w.source(), radius, 20)) {
      if (!w.transport(p)) return false;
    }
    return true;
  };
  if (fits(r)) return CarriedDiffeo{w.source(), r, w};
  double good = 0.0;
  for (double smaller = 0.5 * r; smaller >= 1e-6; smaller *= 0.5) {
    if (fits(smaller)) {
      good = smaller;
      break;
    }
  }
  throw DomainTooSmall("carried diffeomorphism leaves the domain on the requested ball", good);
}

EquivalenceResult compare(const HolonomyWord& a, const HolonomyWord& b, const EquivalenceOptions& opt) {
  EquivalenceResult res;
  if (!a.manifold().same_as(b.manifold())) throw ManifoldMismatch("equivalent: words on different manifolds");
  const auto& m = a.manifold();
  if (m.distance(a.source(), b.source()) > opt.endpoint_tol) {
    res.worst = std::numeric_limits<double>::infinity();
    res.witness = a.source();
    return res;
  }
  for (double r = opt.radius; r >= opt.min_radius; r *= 0.5) {
    std::vector<std::pair<Point, Point>> images;
    bool ok = true;
    for (const auto& p : ball_with_center(a.source(), r, opt.samples)) {
      auto fa = a.transport(p);
      auto fb = b.transport(p);
      if (!fa || !fb) {
        ok = false;
        break;
      }
      images.emplace_back(std::move(*fa), std::move(*fb));
    }
    if (!ok) continue;
    res.radius = r;
    res.equivalent = true;
    std::size_t idx = 0;
    for (const auto& [fa, fb] : images) {
      const Point d = m.difference(fa, fb);
      for (std::size_t i = 0; i < d.size(); ++i) {
        const double scaled = std::abs(d[i]) / std::max(1.0, std::abs(fa[i]));
        if (scaled > res.worst) {
          res.worst = scaled;
          if (scaled > opt.tol) res.witness = idx == 0 ? a.source() : fa;
        }
      }
      ++idx;
    }
    res.equivalent = res.worst <= opt.tol;
    return res;
  }
  throw DomainTooSmall("no common ball of radius >= " + std::to_string(opt.min_radius) + " maps into the domain", 0.0);
}

bool equivalent(const HolonomyWord& a, const HolonomyWord& b, const EquivalenceOptions& opt) {
  return compare(a, b, opt).equivalent;
}

Point PathHolonomyBisubmersion::s(const std::vector<double>&, const Point& p) const { return p; }

Point PathHolonomyBisubmersion::t(const std::vector<double>& v, const Point& p) const {
  if (v.size() != k()) throw DimensionMismatch("bisubmersion: coefficient dimension");
  if (k() == 0) return p;
  auto r = exp_combination(v, generators->fields, p);
  if (r.status == FlowStatus::LeftDomain) throw OutOfDomain("bisubmersion target leaves the domain");
  if (!r.ok()) throw PreconditionFailed("bisubmersion target: " + r.message);
  return r.endpoint;
}

HolonomyWord PathHolonomyBisubmersion::word(const std::vector<double>& v, const Point& p) const {
  if (v.size() != k()) throw DimensionMismatch("bisubmersion: coefficient dimension");
  if (k() == 0) return HolonomyWord(manifold, p);
  return path_word(generators, p, v);
}

namespace {

std::vector<std::size_t> select_fiber_basis(const FoliationModule& f, const Point& p0) {
  std::vector<std::size_t> selected;
  auto jets = fiber_jets(f, p0);
  Eigen::MatrixXd acc;
  if (jets) {
    acc = jets->ideal;
  } else {
    acc = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(f.manifold().dim()), 0);
  }
  const Eigen::MatrixXd gens = jets ? jets->gen : f.generator_set()->values_at(p0);
  const double scale = std::max(1.0, gens.size() ? gens.cwiseAbs().maxCoeff() : 1.0);
  int rank = numeric_rank(acc / scale, 1e-10, 1e-12);
  for (std::size_t j = 0; j < f.size(); ++j) {
    Eigen::MatrixXd next(acc.rows(), acc.cols() + 1);
    next << acc, gens.col(static_cast<Eigen::Index>(j));
    const int r = numeric_rank(next / scale, 1e-10, 1e-12);
    if (r > rank) {
      acc = std::move(next);
      rank = r;
      selected.push_back(j);
    }
  }
  return selected;
}

}  // namespace

PathHolonomyBisubmersion path_holonomy_bisubmersion(const FoliationModule& f, const Point& p0) {
  const auto& m = f.manifold();
  if (!m.contains(p0)) throw OutOfDomain("bisubmersion base point outside the domain");
  PathHolonomyBisubmersion b;
  b.manifold = m;
  b.base = m.normalize(p0);
  b.selected = select_fiber_basis(f, p0);
  if (!b.selected.empty()) {
    std::vector<VectorField> fields;
    for (std::size_t j : b.selected) fields.push_back(f.generators()[j]);
    b.generators = make_generator_set(f.name() + "|basis", std::move(fields));
  }
  const std::size_t k = b.k();
  const std::size_t n = m.dim();
  const double h = 1e-6;
  for (double rho = 1.0; rho >= 1e-4; rho *= 0.5) {
    Point center(k + n, 0.0);
    for (std::size_t i = 0; i < n; ++i) center[k + i] = b.base[i];
    bool ok = true;
    for (const auto& z : ball_samples(center, rho, 50)) {
      std::vector<double> v(z.begin(), z.begin() + static_cast<long>(k));
      Point p(z.begin() + static_cast<long>(k), z.end());
      if (!m.contains(p)) {
        ok = false;
        break;
      }
      Eigen::MatrixXd jt(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k + n));
      try {
        for (std::size_t c = 0; c < k + n; ++c) {
          auto vp = v, vm = v;
          Point pp = p, pm = p;
          if (c < k) {
            vp[c] += h;
            vm[c] -= h;
          } else {
            pp[c - k] += h;
            pm[c - k] -= h;
          }
          if (!m.contains(pp) || !m.contains(pm)) throw OutOfDomain("rank probe outside the domain");
          const Point d = m.difference(b.t(vm, pm), b.t(vp, pp));
          for (std::size_t r = 0; r < n; ++r)
            jt(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = d[r] / (2 * h);
        }
      } catch (const Error&) {
        ok = false;
        break;
      }
      // s(v,p) = p has Jacobian [0 | I], always of rank n
      if (numeric_rank(jt, 1e-6) < static_cast<int>(n)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      b.rho = rho;
      return b;
    }
  }
  throw PreconditionFailed("bisubmersion rank check fails for every radius down to 1e-4");
}

HolonomyWord random_word(const std::vector<GeneratorSetPtr>& sets, const Point& source, SplitMix64& rng,
                         const RandomWordOptions& opt) {
  if (sets.empty()) throw PreconditionFailed("random_word: no generator sets");
  const auto& m = sets.front()->manifold;
  const int len = opt.min_steps + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_steps - opt.min_steps + 1)));
  std::vector<Step> steps;
  Point p = m.normalize(source);
  int attempts = 0;
  while (static_cast<int>(steps.size()) < len) {
    if (++attempts > opt.attempts) throw PreconditionFailed("random_word: could not stay inside the domain");
    const auto& set = sets[rng.below(sets.size())];
    PathStep st{set, std::vector<double>(set->size())};
    for (auto& c : st.coeffs) c = rng.uniform(-opt.scale, opt.scale);
    auto q = try_step(st, p);
    if (!q) continue;
    p = *q;
    steps.emplace_back(std::move(st));
  }
  return HolonomyWord(m, source, std::move(steps));
}

nlohmann::json word_to_json(const HolonomyWord& w) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : w.steps()) {
    if (const auto* ps = std::get_if<PathStep>(&s)) {
      steps.push_back({{"set", ps->set->name}, {"coeffs", ps->coeffs}});
    } else {
      const auto& ts = std::get<TwistStep>(s);
      steps.push_back({{"twist", ts.action->name()}, {"g", ts.g}});
    }
  }
  return {{"source", w.source()}, {"target", w.target()}, {"steps", steps}};
}

}  // namespace sfol
