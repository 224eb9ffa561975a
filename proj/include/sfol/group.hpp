#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfol/sampling.hpp"
#include "sfol/vector_field.hpp"

namespace sfol {

// A Lie group given in one global chart. Elements are coordinate vectors;
// Lie-algebra elements are coefficient vectors in the basis d/dg_i at the unit.
class LieGroupModel {
 public:
  enum class Kind { Vector, Circle, Generic };

  LieGroupModel() = default;

  // (R^n, +) with the given coordinate names.
  static LieGroupModel vector(std::vector<std::string> coords, std::string name = "R^n");
  // U(1) as a circle coordinate of the given period; addition mod period.
  static LieGroupModel circle(std::string coord, double period, std::string name = "U(1)");
  // Generic group: `mul` uses the coordinate names suffixed by _l and _r for
  // the two factors, `inv` uses the plain names, `unit` is a point. `exp`
  // (optional) maps algebra coordinates, written with the plain names, to the
  // group; without it exp is computed by flowing the left-invariant field.
  static LieGroupModel generic(std::string name, ChartManifold chart, std::vector<Expr> mul, std::vector<Expr> inv,
                               Point unit, std::optional<std::vector<Expr>> exp = std::nullopt);

  const std::string& name() const;
  Kind kind() const;
  std::size_t dim() const;
  const ChartManifold& chart() const;
  const std::vector<std::string>& coord_names() const;

  Point unit() const;
  Point multiply(const Point& a, const Point& b) const;
  Point inverse(const Point& a) const;
  Point conj(const Point& g, const Point& h) const;  // g h g^-1
  Point exp(const std::vector<double>& x) const;
  Point normalize(const Point& g) const;
  double distance(const Point& a, const Point& b) const;
  bool contains(const Point& g) const;

  // Symbolic multiplication components (factors named with _l/_r suffixes).
  std::vector<Expr> mul_exprs() const;
  std::vector<Expr> inv_exprs() const;

  // Lie bracket of algebra elements, from the second derivatives of mul at the unit.
  std::vector<double> bracket(const std::vector<double>& x, const std::vector<double>& y) const;

  // Random element exp(x) with x uniform in [-scale, scale]^n.
  Point random(SplitMix64& rng, double scale = 1.0) const;

  // Worst residual of associativity, unit and inverse laws over sampled triples
  // plus |exp(0) - e|.
  double axiom_defect(int samples = 100, std::uint64_t seed = 7) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// A left action of a Lie group on a chart manifold given by Exprs in the
// group coordinates and the manifold coordinates.
class GroupAction {
 public:
  GroupAction() = default;
  GroupAction(std::string name, LieGroupModel group, ChartManifold space, std::vector<Expr> map, const Params& params = {});

  const std::string& name() const;
  const LieGroupModel& group() const;
  const ChartManifold& space() const;
  const std::vector<Expr>& map() const;

  Point act(const Point& g, const Point& p) const;
  // The action map of a fixed g as Exprs in the manifold coordinates.
  std::vector<Expr> map_at(const Point& g) const;
  // Infinitesimal generator v_x of the algebra element x (v_x(p) = d/dt exp(tx) p at 0).
  VectorField generator(const std::vector<double>& x) const;
  const std::vector<VectorField>& basis_generators() const;
  // g_* X as a vector field.
  VectorField push(const Point& g, const VectorField& x) const;

  struct Defects {
    double unit = 0.0;           // |e p - p|
    double compatibility = 0.0;  // |g1 (g2 p) - (g1 g2) p|
    double generator = 0.0;      // v_x against finite differences of exp(tx) p
    double freeness = 0.0;       // smallest |g p - p| seen for g away from e, relative
  };
  Defects axiom_defects(int samples = 50, std::uint64_t seed = 11) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

using GroupActionPtr = std::shared_ptr<const GroupAction>;

}  // namespace sfol
