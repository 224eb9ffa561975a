#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sfol/group.hpp"
#include "sfol/groupoid.hpp"
#include "sfol/holonomy.hpp"
#include "sfol/quotient.hpp"
#include "sfol/report.hpp"

namespace sfol {

struct CrossedModule {
  LieGroupModel h;
  LieGroupModel g;
  std::function<Point(const Point& h)> boundary;                   // H -> G
  std::function<Point(const Point& g, const Point& h)> act;        // C_g(h)

  // H trivial in G: boundary constant e, C trivial.
  static CrossedModule trivial(const LieGroupModel& h, const LieGroupModel& g);
  // H = G, boundary the identity, C conjugation.
  static CrossedModule conjugation(const LieGroupModel& g);
};

// d(C_g h) = g d(h) g^-1, C_{d h}(j) = h j h^-1, and C is an action by automorphisms.
Report crossed_module_check(const CrossedModule& cm, int samples = 50, std::uint64_t seed = 19);

// Elements of H x| G are concatenations (h, g).
class Lie2Group {
 public:
  Lie2Group() = default;
  explicit Lie2Group(CrossedModule cm);

  const CrossedModule& crossed_module() const { return cm_; }
  std::size_t h_dim() const { return cm_.h.dim(); }
  std::size_t g_dim() const { return cm_.g.dim(); }
  Point h_part(const Point& hg) const;
  Point g_part(const Point& hg) const;
  Point make(const Point& h, const Point& g) const;

  // (h1, g1)(h2, g2) = (h1 C_{g1}(h2), g1 g2)
  Point multiply(const Point& a, const Point& b) const;
  Point inverse(const Point& a) const;
  Point unit() const;
  Point random(SplitMix64& rng, double scale = 1.0) const;
  double gap(const Point& a, const Point& b) const;

  // Groupoid over G: s(h, g) = g, t(h, g) = d(h) g, (h2, d(h1) g) o (h1, g) = (h2 h1, g).
  const GroupoidModel& groupoid() const { return groupoid_; }

  // Group axioms of H x| G, groupoid axioms, and multiplication as a groupoid morphism.
  Report axiom_check(int samples = 50, std::uint64_t seed = 29) const;

 private:
  CrossedModule cm_;
  GroupoidModel groupoid_;
};

// Throws PreconditionFailed if crossed_module_check fails.
Lie2Group semidirect_product(const CrossedModule& cm);

struct Ideal {
  Eigen::MatrixXd basis;  // dim G x r, orthonormal columns
  int dim() const { return static_cast<int>(basis.cols()); }
  bool closed = true;     // [h, g] in h at the bracket samples
  double residual = 0.0;  // worst hull residual of the basis fields
};

// Algebra elements x with v_x pointwise in F at the region samples.
Ideal compute_ideal(const FoliationModule& f, const GroupAction& a, const std::optional<SampleBox>& region = std::nullopt);

// The connected subgroup integrating the ideal, as a subgroup of G. Only the
// cases 0 and all of g are supported; other dimensions throw PreconditionFailed.
LieGroupModel ideal_subgroup(const LieGroupModel& g, const Ideal& ideal);
// Crossed module of the ideal subgroup H in G with inclusion and conjugation.
CrossedModule ideal_crossed_module(const LieGroupModel& g, const Ideal& ideal);

// Algebra element x with exp(x) = h, by Gauss-Newton from 0 (identity for
// vector and circle groups, circle angles taken in [-period/2, period/2)).
std::optional<std::vector<double>> group_log(const LieGroupModel& g, const Point& h);

struct PhiOptions {
  int pieces = 20;        // path discretization, dt = 0.05
  double ls_tol = 1e-6;   // least-squares residual bound, relative to max(1, |v_x|)
};

// Word over F carrying the action of h (a G element in the ideal subgroup)
// near p. Throws PreconditionFailed if log h is not in the ideal or some
// least-squares residual exceeds the tolerance.
HolonomyWord phi(const Point& h, const Point& p, const GroupAction& a, const FoliationModule& f, const Ideal& ideal,
                 const PhiOptions& opt = {});

// compose(phi(h, target(w)), w), h a G element.
HolonomyWord left_action(const Point& h, const HolonomyWord& w, const GroupAction& a, const FoliationModule& f,
                         const Ideal& ideal);

// left_action(d(h), lifted_action(g, w)) for hg = (h, g).
HolonomyWord two_group_action(const Lie2Group& l, const Point& hg, const HolonomyWord& w, const GroupAction& a,
                              const FoliationModule& f, const Ideal& ideal);

// (h, g) * (p, x, q) = (d(h) g p, x, g q) on flat pullback arrows whose first
// and last blocks are points of the action's manifold.
Arrow star_pullback(const Lie2Group& l, const GroupAction& a, const Point& hg, const Arrow& arrow);
// The same on triples (target, downstairs word, source); the triple must be an
// arrow of the pullback groupoid (PreconditionFailed otherwise).
VarphiTriple star_pullback(const Lie2Group& l, const GroupAction& a, const Point& hg, const VarphiTriple& arrow,
                           const SubmersionQuotient& q);

using FlatAction = std::function<Arrow(const Point& hg, const Arrow& a)>;

// Unit and group-action laws, source and target laws and the composition law
// of the action map (H x| G) x K -> K as a groupoid morphism, at sampled data.
Report action_axiom_check(const FlatAction& act, const Lie2Group& l, const GroupoidModel& k, const GroupAction& a,
                          int samples = 50, std::uint64_t seed = 31);

using WordAction = std::function<HolonomyWord(const Point& hg, const HolonomyWord& w)>;

// The same laws for an action on holonomy words, with equivalent() as equality.
Report word_action_axiom_check(const WordAction& act, const Lie2Group& l, const GroupAction& a,
                               const FoliationModule& f, int samples = 50, std::uint64_t seed = 37);

}  // namespace sfol
