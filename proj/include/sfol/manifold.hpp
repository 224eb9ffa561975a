#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfol/expr.hpp"

namespace sfol {

using Point = std::vector<double>;

enum class CoordKind { Line, Circle };

struct Coordinate {
  std::string name;
  CoordKind kind = CoordKind::Line;
  double period = 0.0;  // Circle only, > 0
};

// An open subset of R^a x (S^1)^b described in one global chart.
//
// The domain is a conjunction of clauses; a clause is a disjunction of strict
// inequalities `literal > 0`. A point is in the domain iff every clause has a
// literal that is strictly positive there. Single-literal clauses give the
// plain "all predicates > 0" form; multi-literal clauses describe complements
// of closed sets such as a removed half-line.
class ChartManifold {
 public:
  using Clause = std::vector<Expr>;

  ChartManifold() = default;
  ChartManifold(std::string name, std::vector<Coordinate> coords, std::vector<Clause> domain = {},
                const Params& params = {});

  const std::string& name() const;
  std::size_t dim() const;
  const std::vector<Coordinate>& coords() const;
  const std::vector<std::string>& names() const;
  const std::vector<Clause>& domain() const;
  std::optional<std::size_t> index_of(const std::string& coord) const;

  bool same_as(const ChartManifold& other) const;

  // Wraps Circle coordinates into [0, period).
  Point normalize(Point p) const;
  // Coordinate-wise difference b - a, Circle components wrapped into [-period/2, period/2).
  Point difference(const Point& a, const Point& b) const;
  double distance(const Point& a, const Point& b) const;

  bool contains(const Point& p) const;
  // min over clauses of max over literals; > 0 iff in the domain (+inf without clauses).
  double margin(const Point& p) const;
  // Literal values, clause by clause, at a (normalized) point.
  std::vector<std::vector<double>> literal_values(const Point& p) const;

  // Name-checked derivative: throws UnknownSymbol unless `symbol` is a
  // coordinate of this manifold or a key of `params`.
  Expr diff(const Expr& e, const std::string& symbol, const Params& params = {}) const;

  // Evaluates at an in-domain point. Throws OutOfDomain, UnknownSymbol or EvalError.
  double eval(const Expr& e, const Point& p, const Params& params = {}) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Decides equality of two expressions by sampled agreement at `samples`
// quasi-random in-domain points of the box [-3,3]^n.
bool numerically_equal(const Expr& a, const Expr& b, const ChartManifold& m, const Params& params = {},
                       int samples = 50, double tol = 1e-9);

}  // namespace sfol
