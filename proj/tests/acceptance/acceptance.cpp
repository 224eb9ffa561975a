#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "sfol/checks.hpp"
#include "sfol/errors.hpp"
#include "sfol/lie2.hpp"
#include "sfol/scenario.hpp"

using namespace sfol;

namespace {

const double kPi = std::numbers::pi;
const double kTwoPi = 2 * kPi;

// Tolerances of the criteria.
const double kFlowTol = 1e-6;
const double kEquivTol = 1e-5;
const double kPairTol = 1e-9;
const int kBudget = 10000;
const double kLeafEps = 0.05;
const int kSuiteSamples = 50;
const int kPairSamples = 100;
const int kNumericFields = 20;

struct Criterion {
  int failures = 0;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (ok) return;
    ++failures;
    notes.push_back(what);
  }
};

double wrap(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

RunOptions options(const Scenario& s) {
  RunOptions opt = default_options(s);
  opt.tol = kEquivTol;
  opt.budget = kBudget;
  opt.samples = kSuiteSamples;
  return opt;
}

void expect_report(Criterion& c, const Report& r, const std::string& where) {
  for (const auto& a : r.assertions()) c.expect(a.pass, where + ": " + a.name + " (" + a.detail + ")");
  c.expect(!r.assertions().empty(), where + ": empty report");
}

bool has_assertion(const Report& r, const std::string& prefix) {
  for (const auto& a : r.assertions()) {
    if (a.name.starts_with(prefix)) return true;
  }
  return false;
}

int cases_of(const Assertion& a) {
  try {
    return std::stoi(a.detail);
  } catch (const std::exception&) {
    return 0;
  }
}

void criterion_cylinder(Criterion& c) {
  const auto s = load_scenario("cylinder");
  const auto& q = *s.quotient;
  const auto push = pushforward_foliation(s.F, q);
  c.expect(tangent_dim(push.module, {0.0}) == 0, "tangent_dim of F_M at y = 0 is not 0");
  for (double y : {-2.5, -1.0, -0.1, 0.1, 1.0, 2.5})
    c.expect(tangent_dim(push.module, {y}) == 1, "tangent_dim of F_M at y = " + std::to_string(y) + " is not 1");

  for (const Point& p : {Point{0.5, 1.0}, Point{3.0, -0.7}, Point{6.0, 0.0}}) {
    for (int k = 0; k <= 16; ++k) {
      const double t = -2.0 + 0.25 * k;
      const auto r = flow(s.F.generators()[0], p, t);
      const double dth = std::abs(wrap(r.endpoint[0] - (p[0] + t)));
      const double exact_y = std::exp(t) * p[1];
      const double dy = std::abs(r.endpoint[1] - exact_y) / std::max(1.0, std::abs(exact_y));
      c.expect(r.ok() && dth <= kFlowTol && dy <= kFlowTol, "flow mismatch at t = " + std::to_string(t));
    }
  }

  EquivalenceOptions eo;
  eo.tol = kEquivTol;
  for (const Point& p : {Point{0.5, 1.0}, Point{2.0, -1.5}, Point{1.0, 0.0}}) {
    for (double t : {-1.5, -0.3, 0.8, 2.0}) {
      const auto w = path_word(s.F.generator_set(), p, {t});
      const auto down = xi(w, q);
      const auto oracle = path_word(push.module.generator_set(), {p[1]}, {t});
      c.expect(equivalent(down, oracle, eo), "xi(t, p) differs from (t, pi(p))");
      c.expect(std::abs(down.target()[0] - std::exp(t) * p[1]) <= kFlowTol * std::max(1.0, std::exp(t) * std::abs(p[1])),
               "target of xi(t, p) is not e^t y");
    }
  }
}

void criterion_spiral(Criterion& c) {
  const auto s = load_scenario("spiral");
  const auto& q = *s.quotient;
  const std::vector<bool> expected{true, false, true, false, true};
  for (const Point& p : {Point{0.5, 0.3}, Point{4.0, -2.0}}) {
    for (int k = 0; k <= 4; ++k) {
      const auto w = path_word(s.F.generator_set(), p, {k * kPi});
      c.expect(kernel_test(w, q).in_kernel == expected[k], "kernel_test wrong at t = " + std::to_string(k) + " pi");
    }
  }

  const auto model = spiral_quotient_model(1.0, kPairSamples);
  expect_report(c, model.report, "quotient model");
  const auto n = spiral_system(1.0);
  SplitMix64 rng(41);
  for (int i = 0; i < kPairSamples; ++i) {
    const Point p{rng.uniform(0.0, kTwoPi), rng.uniform(-2.0, 2.0)};
    const double t1 = rng.uniform(-10.0, 10.0), t2 = rng.uniform(-10.0, 10.0);
    const Arrow a1{t1, p[0], p[1]};
    const Arrow a2{t2, p[0] + t1, p[1] + t1};
    const Arrow pair_of_composite = model.to_pair(model.cls(n.h.compose(a2, a1)));
    const Arrow composite_of_pairs = model.pair.compose(model.to_pair(model.cls(a2)), model.to_pair(model.cls(a1)));
    // oracle: (t, theta, y) goes to (theta + t, theta) in S1 x S1
    const double dt = std::abs(wrap(pair_of_composite[0] - (p[0] + t1 + t2)));
    const double ds = std::abs(wrap(pair_of_composite[1] - p[0]));
    const double dc = std::max(std::abs(wrap(composite_of_pairs[0] - pair_of_composite[0])),
                               std::abs(wrap(composite_of_pairs[1] - pair_of_composite[1])));
    c.expect(dt <= kPairTol && ds <= kPairTol && dc <= kPairTol, "pair groupoid composition mismatch");
  }

  expect_report(c, nss_check(n, kPairSamples), "nss (spiral system)");
  expect_report(c, run_check(s, "nss", options(s)), "nss (scenario)");
}

void criterion_punctured(Criterion& c) {
  const auto s = load_scenario("punctured");
  const auto r = run_check(s, "fibration", options(s));
  c.expect(!r.passed(), "fibration passes on the punctured plane");
  bool surjectivity_failed = false, witness_seen = false;
  for (const auto& a : r.assertions()) {
    if (a.name == "surjectivity") surjectivity_failed = !a.pass;
    if (!a.pass && a.witness.is_object() && a.witness.contains("p")) {
      const auto p = a.witness["p"].get<std::vector<double>>();
      const auto src = a.witness["zeta"]["source"].get<std::vector<double>>();
      const auto tgt = a.witness["zeta"]["target"].get<std::vector<double>>();
      if (std::abs(p[0] - 1) < 1e-9 && std::abs(p[1] - 1) < 1e-9 && std::abs(src[0] - 1) < 1e-9 &&
          std::abs(tgt[0] + 1) < 1e-6)
        witness_seen = true;
    }
  }
  c.expect(surjectivity_failed, "no surjectivity failure reported");
  c.expect(witness_seen, "witness pair (1 -> -1, (1, 1)) not reported");

  // oracle: the leaf through (1, 1) is the open ray {x > 0, y = 1}
  const auto leaf = leaf_sample(s.F, {1.0, 1.0}, kBudget);
  bool meets_target_fiber = false;
  for (const auto& p : leaf.points()) {
    if (std::abs(p[0] + 1.0) <= kLeafEps) meets_target_fiber = true;
    c.expect(p[0] > 0.0 && std::abs(p[1] - 1.0) < 1e-9, "leaf of (1, 1) leaves the ray x > 0");
  }
  c.expect(!meets_target_fiber, "leaf of (1, 1) meets the fiber over -1");

  for (const char* name : {"spiral", "cylinder-pullback"}) {
    const auto sc = load_scenario(name);
    expect_report(c, run_check(sc, "fibration", options(sc)), std::string("fibration on ") + name);
  }
}

void criterion_morphism(Criterion& c) {
  for (const char* name : {"cylinder", "spiral", "punctured", "cylinder-pullback"}) {
    const auto s = load_scenario(name);
    const auto r = run_check(s, "xi-morphism", options(s));
    expect_report(c, r, std::string("xi-morphism on ") + name);
    for (const auto& a : r.assertions())
      c.expect(cases_of(a) == kSuiteSamples, std::string(name) + ": " + a.name + " ran on fewer than 50 words");
  }
}

void criterion_lie2(Criterion& c) {
  const auto s = load_scenario("cylinder-pullback");
  const auto r = run_check(s, "lie2", options(s));
  expect_report(c, r, "lie2 on cylinder-pullback");
  for (const char* prefix : {"crossed-module/", "lie2-group/", "lie2-word-action/", "lie2-action/", "equivariance i:",
                             "equivariance ii:", "varphi((h,g) w)"})
    c.expect(has_assertion(r, prefix), std::string("missing assertions ") + prefix);
  for (const auto& a : r.assertions()) {
    const int n = cases_of(a);
    c.expect(n >= kSuiteSamples, a.name + " ran on " + std::to_string(n) + " samples");
  }
}

void criterion_ideal(Criterion& c) {
  const std::vector<std::pair<const char*, int>> expected{{"cylinder", 0}, {"spiral", 0}, {"cylinder-pullback", 1}};
  for (const auto& [name, dim] : expected) {
    const auto s = load_scenario(name);
    const auto ideal = compute_ideal(s.F, *s.action);
    c.expect(ideal.dim() == dim, std::string("ideal of ") + name + " has dim " + std::to_string(ideal.dim()));
    c.expect(ideal.closed, std::string("ideal of ") + name + " is not closed");
  }
  c.expect(static_cast<int>(load_scenario("cylinder-pullback").group->dim()) == 1, "cylinder-pullback group is not 1-dim");
}

void criterion_fiber(Criterion& c) {
  for (const char* name : {"cylinder", "spiral", "cylinder-pullback"}) {
    const auto s = load_scenario(name);
    const auto r = run_check(s, "fiber", options(s));
    expect_report(c, r, std::string("fiber on ") + name);
    for (const auto& a : r.assertions()) {
      if (a.name.ends_with("(w, g w)") || a.name.starts_with("xi(g w)"))
        c.expect(cases_of(a) == kSuiteSamples, std::string(name) + ": " + a.name + " ran on fewer than 50 samples");
    }
  }
}

void criterion_numeric(Criterion& c) {
  expect_report(c, numeric_foundations_check(kNumericFields, 1), "numeric");
  const ChartManifold plane("R2", {{"x"}, {"y"}});
  // rotation and dilation commute; [d/dx, x d/dy] = d/dy
  const auto b1 = lie_bracket(VectorField(plane, parse_expr_list("-y, x")), VectorField(plane, parse_expr_list("x, y")));
  const auto b2 = lie_bracket(VectorField(plane, parse_expr_list("1, 0")), VectorField(plane, parse_expr_list("0, x")));
  for (const Point& p : {Point{0.3, -1.2}, Point{2.0, 1.0}}) {
    const auto v1 = b1(p), v2 = b2(p);
    c.expect(std::abs(v1[0]) + std::abs(v1[1]) <= 1e-12, "rotation and dilation do not commute");
    c.expect(std::abs(v2[0]) <= 1e-12 && std::abs(v2[1] - 1.0) <= 1e-12, "[d/dx, x d/dy] is not d/dy");
  }
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Criterion&)>>> criteria{
      {"1 cylinder: F_M tangent dims, flow within 1e-6, xi(t, p) = (t, pi(p))", criterion_cylinder},
      {"2 spiral: kernel at t in {0..4 pi} = T,F,T,F,T, pair composition within 1e-9, nss", criterion_spiral},
      {"3 punctured: fibration fails at (1 -> -1, (1, 1)), budget 1e4, eps 0.05; spiral, cylinder-pullback pass",
       criterion_punctured},
      {"4 morphism suite: 50 words per scenario, tol 1e-5", criterion_morphism},
      {"5 lie2 suite on cylinder-pullback: >= 50 samples, tol 1e-5", criterion_lie2},
      {"6 ideal dims: cylinder 0, spiral 0, cylinder-pullback full", criterion_ideal},
      {"7 fiber suite: 50 samples of (g, w)", criterion_fiber},
      {"8 numeric foundations: 20 random fields", criterion_numeric},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Criterion c;
    try {
      run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("error: ") + e.what());
    }
    std::printf("%s %s\n", c.failures == 0 ? "PASS" : "FAIL", name.c_str());
    for (const auto& n : c.notes) std::printf("    %s\n", n.c_str());
    failed += c.failures > 0;
  }
  std::fflush(stdout);
  return failed == 0 ? 0 : 1;
}
