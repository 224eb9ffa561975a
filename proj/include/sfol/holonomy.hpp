#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "sfol/flow.hpp"
#include "sfol/foliation.hpp"
#include "sfol/group.hpp"

namespace sfol {

struct PathStep {
  GeneratorSetPtr set;
  std::vector<double> coeffs;
};

// Applies the group translate p -> g p of an action.
struct TwistStep {
  GroupActionPtr action;
  Point g;
};

using Step = std::variant<PathStep, TwistStep>;

// Image of p under one step; throws OutOfDomain when the flow leaves the
// domain and PreconditionFailed on integration failure.
Point apply_step(const Step& step, const Point& p);

// A representative of an element of the holonomy groupoid: a source point and
// a list of steps applied left to right.
class HolonomyWord {
 public:
  HolonomyWord() = default;
  // Computes the target; throws OutOfDomain if some step leaves the domain.
  HolonomyWord(ChartManifold m, Point source, std::vector<Step> steps = {});

  const ChartManifold& manifold() const { return m_; }
  const Point& source() const { return source_; }
  const Point& target() const { return target_; }
  const std::vector<Step>& steps() const { return steps_; }
  std::size_t length() const { return steps_.size(); }
  bool empty() const { return steps_.empty(); }

  // Image of an arbitrary point under the same steps (constant bisection).
  // Returns nullopt if a flow leaves the domain.
  std::optional<Point> transport(const Point& p) const;

 private:
  ChartManifold m_;
  Point source_;
  Point target_;
  std::vector<Step> steps_;
};

HolonomyWord identity_word(const ChartManifold& m, const Point& p);
HolonomyWord invert(const HolonomyWord& w);
// w2 after w1; requires target(w1) = source(w2) within 1e-6.
HolonomyWord compose(const HolonomyWord& w2, const HolonomyWord& w1);
// Single-step word.
HolonomyWord path_word(const GeneratorSetPtr& set, const Point& source, std::vector<double> coeffs);

struct CarriedDiffeo {
  Point base;
  double radius = 0.0;
  HolonomyWord word;

  // Throws OutOfDomain if the flows leave the domain at q.
  Point operator()(const Point& q) const;
};

// Checks the constant-bisection map on the source, 20 ball samples of radius r
// and throws DomainTooSmall (with the largest working radius) if some sample
// leaves the domain.
CarriedDiffeo carried_diffeo(const HolonomyWord& w, double r);

struct EquivalenceOptions {
  double radius = 0.05;
  int samples = 20;
  double tol = 1e-5;
  double endpoint_tol = 1e-6;
  double min_radius = 1e-4;
};

struct EquivalenceResult {
  bool equivalent = false;
  double worst = 0.0;  // largest scaled deviation seen
  double radius = 0.0;
  std::optional<Point> witness;
};

// Witness test: both constant-bisection maps agree on a common ball around the
// source. The radius is halved until every sample maps into the domain.
EquivalenceResult compare(const HolonomyWord& a, const HolonomyWord& b, const EquivalenceOptions& opt = {});
bool equivalent(const HolonomyWord& a, const HolonomyWord& b, const EquivalenceOptions& opt = {});

struct PathHolonomyBisubmersion {
  ChartManifold manifold;
  GeneratorSetPtr generators;         // the k selected fields
  std::vector<std::size_t> selected;  // their indices in the foliation
  Point base;
  double rho = 0.0;

  std::size_t k() const { return selected.size(); }
  Point s(const std::vector<double>& v, const Point& p) const;
  Point t(const std::vector<double>& v, const Point& p) const;
  HolonomyWord word(const std::vector<double>& v, const Point& p) const;
};

// Chooses generators whose classes form a basis of the fiber at p0 and finds
// the neighborhood radius by halving from 1 until s and t pass rank checks at
// 50 samples; throws PreconditionFailed below rho_min = 1e-4.
PathHolonomyBisubmersion path_holonomy_bisubmersion(const FoliationModule& f, const Point& p0);

struct RandomWordOptions {
  int min_steps = 1;
  int max_steps = 4;
  double scale = 1.0;  // coefficients uniform in [-scale, scale]
  int attempts = 200;
};

// Random word over the given generator sets; steps that leave the domain are redrawn.
HolonomyWord random_word(const std::vector<GeneratorSetPtr>& sets, const Point& source, SplitMix64& rng,
                         const RandomWordOptions& opt = {});

nlohmann::json word_to_json(const HolonomyWord& w);

}  // namespace sfol
