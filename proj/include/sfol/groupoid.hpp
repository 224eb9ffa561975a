#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sfol/group.hpp"
#include "sfol/quotient.hpp"
#include "sfol/report.hpp"

namespace sfol {

// Arrows are points of a chart (`arrows`) whose coordinates concatenate the
// typed pieces: (t-point, s-point) for pair groupoids, (g, p) for
// transformation groupoids, (p, h, q) for pullbacks, (xi, g) for semidirect
// products. Equality is numeric after normalization.
using Arrow = Point;

struct GroupoidModel {
  std::string name;
  ChartManifold objects;
  ChartManifold arrows;
  std::function<Point(const Arrow&)> s;
  std::function<Point(const Arrow&)> t;
  std::function<Arrow(const Arrow&, const Arrow&)> compose_raw;  // a2 o a1, no checks
  std::function<Arrow(const Arrow&)> invert;
  std::function<Arrow(const Point&)> identity;
  // A pseudo-random arrow with the given source.
  std::function<Arrow(const Point&, SplitMix64&)> sample_from;
  // Object tolerance for composability; larger for models whose t is a numerical flow.
  double object_tol = 1e-9;

  // Throws PreconditionFailed unless s(a2) = t(a1) within object_tol.
  Arrow compose(const Arrow& a2, const Arrow& a1) const;
  // Largest coordinate gap scaled by max(1, |a_i|), circle coordinates wrapped.
  double gap(const Arrow& a, const Arrow& b) const;
  bool same(const Arrow& a, const Arrow& b, double tol = 1e-9) const { return gap(a, b) <= tol; }
  double object_gap(const Point& p, const Point& q) const;
};

// Unit, identity-and-inverse and associativity laws at sampled arrows.
Report structure_check(const GroupoidModel& h, int samples = 200, std::uint64_t seed = 5);

GroupoidModel pair_groupoid(const ChartManifold& m);
GroupoidModel unit_groupoid(const ChartManifold& m);
GroupoidModel transformation_groupoid(const GroupAction& action);
// Arrows (p, h, q) with pi(p) = t(h), pi(q) = s(h).
GroupoidModel pullback_groupoid(const GroupoidModel& h, const SubmersionQuotient& q);
// Throws PreconditionFailed if (p, h, q) is not an arrow of the pullback.
void check_pullback_arrow(const GroupoidModel& pb, const GroupoidModel& h, const SubmersionQuotient& q,
                          const Arrow& a);

// Action of G on a groupoid K by automorphisms, covering `on_objects`.
struct GroupoidAutomorphismAction {
  GroupAction on_objects;
  std::function<Arrow(const Point& g, const Arrow& xi)> on_arrows;
};

// Sampled automorphism conditions: s, t covariance, compose and units.
Report automorphism_check(const GroupoidModel& k, const GroupoidAutomorphismAction& a, int samples = 50,
                          std::uint64_t seed = 9);

// Arrows (xi, g): s = g^-1 s(xi), t = t(xi), (xi2,g2) o (xi1,g1) = (xi2 o (g2 xi1), g2 g1).
// Throws PreconditionFailed if automorphism_check fails.
GroupoidModel semidirect_groupoid(const GroupoidModel& k, const GroupoidAutomorphismAction& a);

using ArrowMap = std::function<Arrow(const Arrow&)>;
using ObjectMap = std::function<Point(const Point&)>;

// Composition, unit, source and target laws of phi : h1 -> h2 covering `base`.
Report groupoid_morphism_check(const ArrowMap& phi, const GroupoidModel& h1, const GroupoidModel& h2,
                               const ObjectMap& base, int samples = 100, std::uint64_t seed = 13);

struct NormalSubgroupoidSystem {
  GroupoidModel h;
  std::function<bool(const Arrow&)> in_k;
  std::function<bool(const Point&, const Point&)> related;
  // Some p with (p, q) in R.
  std::function<Point(const Point& q, SplitMix64&)> related_point;
  // A representative of theta(p, q)(K xi) for s(xi) = q.
  std::function<Arrow(const Point& p, const Point& q, const Arrow& xi)> theta;
};

// K xi1 = K xi2: same source and xi2 o xi1^-1 in K.
bool same_coset(const NormalSubgroupoidSystem& n, const Arrow& xi1, const Arrow& xi2);

struct NssWitness {
  Point p, q;
  Arrow xi1, xi2;  // xi2 has source q, xi1 is composable after xi2
};

// Samples (p,q) in R and arrows and checks the three coset conditions. Explicit
// witnesses are checked in addition to the samples.
Report nss_check(const NormalSubgroupoidSystem& n, int samples = 100, std::uint64_t seed = 17,
                 const std::vector<NssWitness>& witnesses = {});

// The system of the spiral foliation on the cylinder: H = R x P with the flow
// of d/dtheta + lambda d/dy, K = 2 pi Z x P, R = P x_M P, theta(g)(K xi) = K(g xi)
// for vertical translations g.
NormalSubgroupoidSystem spiral_system(double lambda = 1.0);

struct QuotientModel {
  GroupoidModel quotient;  // rotation groupoid of U(1) on S^1
  ArrowMap cls;            // class of an arrow of H
  GroupoidModel pair;      // S^1 x S^1
  ArrowMap to_pair;
  Report report;
};

// K\H / theta for the spiral system, compared with the rotation groupoid and
// with the pair groupoid on S^1 at sampled arrows.
QuotientModel spiral_quotient_model(double lambda = 1.0, int samples = 100);

}  // namespace sfol
