#include "sfol/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sfol/errors.hpp"
#include "sfol/sampling.hpp"

namespace sfol {

struct ChartManifold::Impl {
  std::string name;
  std::vector<Coordinate> coords;
  std::vector<std::string> names;
  std::vector<Clause> domain;
  std::vector<std::vector<Program>> literals;
};

ChartManifold::ChartManifold(std::string name, std::vector<Coordinate> coords, std::vector<Clause> domain,
                             const Params& params) {
  auto impl = std::make_shared<Impl>();
  impl->name = std::move(name);
  for (const auto& c : coords) {
    if (c.kind == CoordKind::Circle && !(c.period > 0.0))
      throw PreconditionFailed("circle coordinate '" + c.name + "' needs a positive period");
    if (std::find(impl->names.begin(), impl->names.end(), c.name) != impl->names.end())
      throw PreconditionFailed("duplicate coordinate '" + c.name + "'");
    impl->names.push_back(c.name);
  }
  impl->coords = std::move(coords);
  for (auto& clause : domain) {
    if (clause.empty()) throw PreconditionFailed("empty domain clause");
    Clause bound;
    std::vector<Program> progs;
    for (const auto& lit : clause) {
      bound.push_back(sfol::bind(lit, params));
      progs.emplace_back(bound.back(), impl->names);
    }
    impl->domain.push_back(std::move(bound));
    impl->literals.push_back(std::move(progs));
  }
  impl_ = std::move(impl);
}

const std::string& ChartManifold::name() const { return impl_->name; }
std::size_t ChartManifold::dim() const { return impl_ ? impl_->coords.size() : 0; }
const std::vector<Coordinate>& ChartManifold::coords() const { return impl_->coords; }
const std::vector<std::string>& ChartManifold::names() const { return impl_->names; }
const std::vector<ChartManifold::Clause>& ChartManifold::domain() const { return impl_->domain; }

std::optional<std::size_t> ChartManifold::index_of(const std::string& coord) const {
  auto it = std::find(impl_->names.begin(), impl_->names.end(), coord);
  if (it == impl_->names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - impl_->names.begin());
}

bool ChartManifold::same_as(const ChartManifold& other) const {
  if (impl_ == other.impl_) return true;
  if (!impl_ || !other.impl_) return false;
  if (impl_->name != other.impl_->name || impl_->coords.size() != other.impl_->coords.size()) return false;
  for (std::size_t i = 0; i < impl_->coords.size(); ++i) {
    const auto& a = impl_->coords[i];
    const auto& b = other.impl_->coords[i];
    if (a.name != b.name || a.kind != b.kind || a.period != b.period) return false;
  }
  return true;
}

Point ChartManifold::normalize(Point p) const {
  if (p.size() != dim()) throw DimensionMismatch("point has dimension " + std::to_string(p.size()) + ", manifold '" +
                                                 name() + "' has " + std::to_string(dim()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& c = impl_->coords[i];
    if (c.kind == CoordKind::Circle) {
      double v = std::fmod(p[i], c.period);
      if (v < 0.0) v += c.period;
      if (v >= c.period) v = 0.0;
      p[i] = v;
    }
  }
  return p;
}

Point ChartManifold::difference(const Point& a, const Point& b) const {
  Point d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = b[i] - a[i];
    const auto& c = impl_->coords[i];
    if (c.kind == CoordKind::Circle) {
      d[i] = std::fmod(d[i], c.period);
      if (d[i] >= 0.5 * c.period) d[i] -= c.period;
      if (d[i] < -0.5 * c.period) d[i] += c.period;
    }
  }
  return d;
}

double ChartManifold::distance(const Point& a, const Point& b) const {
  double s = 0.0;
  for (double v : difference(a, b)) s += v * v;
  return std::sqrt(s);
}

std::vector<std::vector<double>> ChartManifold::literal_values(const Point& p) const {
  const Point q = normalize(p);
  std::vector<std::vector<double>> out;
  out.reserve(impl_->literals.size());
  for (const auto& clause : impl_->literals) {
    std::vector<double> vals;
    for (const auto& prog : clause) {
      double v;
      try {
        v = prog(q);
      } catch (const EvalError&) {
        v = -std::numeric_limits<double>::infinity();
      }
      vals.push_back(std::isnan(v) ? -std::numeric_limits<double>::infinity() : v);
    }
    out.push_back(std::move(vals));
  }
  return out;
}

double ChartManifold::margin(const Point& p) const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& clause : literal_values(p)) {
    m = std::min(m, *std::max_element(clause.begin(), clause.end()));
  }
  return m;
}

bool ChartManifold::contains(const Point& p) const {
  if (p.size() != dim()) return false;
  for (double v : p) {
    if (!std::isfinite(v)) return false;
  }
  return margin(p) > 0.0;
}

Expr ChartManifold::diff(const Expr& e, const std::string& symbol, const Params& params) const {
  if (!index_of(symbol) && !params.count(symbol))
    throw UnknownSymbol("'" + symbol + "' is neither a coordinate of '" + name() + "' nor a parameter");
  return sfol::diff(e, symbol);
}

double ChartManifold::eval(const Expr& e, const Point& p, const Params& params) const {
  if (!contains(p)) throw OutOfDomain("point outside the domain of '" + name() + "'");
  std::vector<std::string> slots = names();
  Point values = normalize(p);
  for (const auto& [k, v] : params) {
    slots.push_back(k);
    values.push_back(v);
  }
  return Program(e, slots)(values);
}

bool numerically_equal(const Expr& a, const Expr& b, const ChartManifold& m, const Params& params, int samples,
                       double tol) {
  std::vector<std::string> slots = m.names();
  for (const auto& [k, v] : params) slots.push_back(k);
  Program pa(a, slots);
  Program pb(b, slots);
  int used = 0;
  for (std::uint64_t i = 1; used < samples && i < 100000; ++i) {
    Point x = halton_point(i, m.dim());
    for (auto& v : x) v = -3.0 + 6.0 * v;
    if (!m.contains(x)) continue;
    Point vals = m.normalize(x);
    for (const auto& [k, v] : params) vals.push_back(v);
    double va, vb;
    try {
      va = pa(vals);
      vb = pb(vals);
    } catch (const EvalError&) {
      continue;
    }
    if (std::abs(va - vb) > tol * std::max(1.0, std::abs(va))) return false;
    ++used;
  }
  return used > 0;
}

}  // namespace sfol
