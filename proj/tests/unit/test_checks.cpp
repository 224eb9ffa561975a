#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "sfol/checks.hpp"
#include "sfol/errors.hpp"

using namespace sfol;
using namespace fixtures;

namespace {

const char* kTilted = R"(
[scenario]
name = tilted
[manifold P]
coords = theta:circle(2*pi), y
[manifold M]
coords = y
[foliation]
generator = 1, sin(theta)
[group]
kind = circle
coords = alpha:circle(2*pi)
[action]
map = theta + alpha, y
[submersion]
map = y
section = 0, y
vertical = 1, 0
)";

}  // namespace

TEST_CASE("check registry") {
  auto names = check_names();
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (const char* n : {"validate", "xi-morphism", "fibration", "nss", "lie2", "numeric"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  auto s = load_scenario("cylinder");
  CHECK_THROWS_AS(run_check(s, "no-such-check", default_options(s)), PreconditionFailed);
  CHECK_THROWS_AS(run_check(load_scenario("punctured"), "fiber", default_options(s)), PreconditionFailed);
}

TEST_CASE("reports are deterministic and ordered") {
  auto s = load_scenario("spiral");
  auto opt = default_options(s);
  opt.samples = 10;
  auto a = reports_to_json(run_checks(s, {"xi-morphism", "ideal", "kernel"}, opt));
  auto b = reports_to_json(run_checks(s, {"kernel", "xi-morphism", "ideal"}, opt));
  CHECK(a.dump() == b.dump());
  CHECK(a["reports"][0]["check"] == "ideal");
}

TEST_CASE("non-invariant foliation is flagged") {
  auto s = parse_scenario(kTilted);
  auto opt = default_options(s);
  CHECK_FALSE(run_check(s, "invariance", opt).passed());
  CHECK_FALSE(run_check(s, "pushforward", opt).passed());
  CHECK_FALSE(run_check(s, "product", opt).passed());
}

TEST_CASE("flow groupoid") {
  auto h = flow_groupoid(field(cylinder(), "1, y"));
  auto rep = structure_check(h, 30);
  for (const auto& a : rep.assertions()) {
    CHECK_MESSAGE(a.pass, a.name);
  }
  auto t = h.t({1.0, 0.5, 2.0});
  CHECK(t[0] == doctest::Approx(1.5));
  CHECK(t[1] == doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-8));
}

TEST_CASE("numeric foundations") {
  auto rep = numeric_foundations_check(5, 3);
  CHECK(rep.passed());
  CHECK(rep.assertions().size() == 4);
}
