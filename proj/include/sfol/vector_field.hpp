#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "sfol/manifold.hpp"

namespace sfol {

class VectorField {
 public:
  VectorField() = default;
  // Parameters are bound at construction; the remaining symbols must be
  // coordinates of `m`. Components along Circle coordinates are checked for
  // periodicity by sampling.
  VectorField(ChartManifold m, std::vector<Expr> components, const Params& params = {});

  static VectorField zero(const ChartManifold& m);
  static VectorField coordinate(const ChartManifold& m, const std::string& coord);

  const ChartManifold& manifold() const;
  std::size_t dim() const;
  const std::vector<Expr>& components() const;

  // Fast evaluation without the domain check; Circle coordinates are wrapped.
  void eval_into(std::span<const double> p, std::span<double> out) const;
  // Evaluation at an in-domain point (throws OutOfDomain otherwise).
  Point operator()(const Point& p) const;

  bool is_symbolically_zero() const;
  std::string to_string() const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// [X,Y]^k = X(Y^k) - Y(X^k)
VectorField lie_bracket(const VectorField& x, const VectorField& y);

VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(const Expr& f, const VectorField& x);

// Directional derivative X(f).
Expr apply(const VectorField& x, const Expr& f);

// Maximum deviation |X(p + period e_i) - X(p)| over sampled points and Circle
// coordinates i; 0 for manifolds without Circle coordinates.
double periodicity_defect(const ChartManifold& m, const std::vector<Expr>& components, int samples = 8);

struct SmoothMap {
  ChartManifold source;
  ChartManifold target;
  std::vector<Expr> components;  // in source coordinates

  Point operator()(const Point& p) const;
  // For each target coordinate, the index of the source coordinate it copies,
  // when every component is a bare source coordinate.
  std::optional<std::vector<std::size_t>> projection_slots() const;
};

struct NotProjectable {
  std::string reason;
  std::optional<Point> witness;
};

using Pushforward = std::variant<VectorField, NotProjectable>;

// dF(X) rewritten in target coordinates. Symbolic dependence analysis decides
// whether the result only depends on target coordinates (renaming through a
// coordinate projection or substituting `section`); the answer is then
// verified by sampling dF(X)(p) against Y(F(p)).
Pushforward pushforward_field(const VectorField& x, const SmoothMap& f,
                              const std::optional<std::vector<Expr>>& section = std::nullopt);

// Pushforward along a diffeomorphism of X.manifold() given with its inverse:
// (f_* X)(p) = Df(f^{-1} p) X(f^{-1} p).
VectorField pushforward_by_diffeo(const VectorField& x, const std::vector<Expr>& f, const std::vector<Expr>& f_inverse);

}  // namespace sfol
