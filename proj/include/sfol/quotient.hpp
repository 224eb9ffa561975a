#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfol/holonomy.hpp"
#include "sfol/report.hpp"

namespace sfol {

// A surjective submersion pi : P -> M, optionally with a section and with a
// group action whose orbits are the pi-fibers.
class SubmersionQuotient {
 public:
  SubmersionQuotient() = default;
  SubmersionQuotient(std::string name, SmoothMap pi, std::optional<std::vector<Expr>> section,
                     std::vector<VectorField> verticals, GroupActionPtr action = nullptr);

  const std::string& name() const;
  const SmoothMap& map() const;
  const ChartManifold& P() const;
  const ChartManifold& M() const;
  const std::optional<std::vector<Expr>>& section() const;
  const std::vector<VectorField>& verticals() const;
  const GroupActionPtr& action() const;

  Point project(const Point& p) const;
  Point lift(const Point& m) const;  // section; throws PreconditionFailed without one
  // A point of the fiber over m: the section, or m in the projected coordinates
  // and pseudo-random values in [-3,3] elsewhere.
  std::optional<Point> fiber_point(const Point& m, SplitMix64& rng) const;

  // Generator set on M obtained by projecting each field of `set`; cached per set.
  // Throws PreconditionFailed if some field is not projectable.
  GeneratorSetPtr projected(const GeneratorSetPtr& set) const;

  // Section is a right inverse, dpi kills the verticals, sampled fibers are connected.
  Report validate() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

Report invariance_check(const FoliationModule& f, const SubmersionQuotient& q,
                        const std::optional<SampleBox>& region = std::nullopt);

struct PushforwardFoliation {
  FoliationModule module;            // F_M, zero fields dropped (zero module: one zero field)
  GeneratorSetPtr aligned;           // projections of the F generators, index for index
  std::vector<std::size_t> origin;   // module generator i is aligned[origin[i]]
};

PushforwardFoliation pushforward_foliation(const FoliationModule& f, const SubmersionQuotient& q);
// Verticals plus lifts of the F_M generators, through the section or, for a
// coordinate projection without one, into the projected coordinates.
FoliationModule pullback_foliation(const FoliationModule& fm, const SubmersionQuotient& q);

// Reinterprets every path step over the projected generator set; twist steps
// project to nothing since the action preserves the fibers.
HolonomyWord xi(const HolonomyWord& w, const SubmersionQuotient& q);

struct KernelResult {
  bool in_kernel = false;
  double worst = 0.0;
  double radius = 0.0;
  std::optional<Point> witness;
};

// pi(f(x)) = pi(x) for slice points x through the source, f the carried map.
KernelResult kernel_test(const HolonomyWord& w, const SubmersionQuotient& q, double r = 0.05);

struct XiFiberResult {
  bool direct = false;      // xi(w1) equivalent to xi(w2) downstairs
  bool structural = false;  // kernel_test(w2 o (g w1)^-1) with g s(w1) = s(w2)
  std::optional<Point> g;
  bool agree() const { return direct == structural; }
  bool value() const { return direct && structural; }
};

XiFiberResult xi_fiber_test(const HolonomyWord& w1, const HolonomyWord& w2, const SubmersionQuotient& q);

// Group element g with g p = q, by Gauss-Newton from several starts.
std::optional<Point> solve_translation(const GroupAction& a, const Point& p, const Point& q);

struct VarphiTriple {
  Point target;
  HolonomyWord down;
  Point source;
};

// Precondition: the verticals are hull members of F (checked, PreconditionFailed otherwise).
VarphiTriple varphi(const HolonomyWord& w, const SubmersionQuotient& q, const FoliationModule& f);

struct FibrationWitness {
  HolonomyWord zeta;  // on M
  Point p;            // in the fiber over the source of zeta
};

struct FibrationOptions {
  int budget = 10000;     // leaf_sample budget
  int random_pairs = 12;
  int leaf_searches = 3;  // leaf searches spent on random blocked pairs
  double eps = 0.05;
  std::uint64_t seed = 1;
};

Report fibration_check(const SubmersionQuotient& q, const FoliationModule& f,
                       const std::vector<FibrationWitness>& witnesses = {}, const FibrationOptions& opt = {});

Report product_foliation_assumption_check(const SubmersionQuotient& q, const FoliationModule& f, int n_group = 8,
                                          std::uint64_t seed = 3);

}  // namespace sfol
