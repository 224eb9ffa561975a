#include "sfol/vector_field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "sfol/errors.hpp"
#include "sfol/sampling.hpp"

namespace sfol {

struct VectorField::Impl {
  ChartManifold manifold;
  std::vector<Expr> components;
  std::vector<Program> programs;
};

double periodicity_defect(const ChartManifold& m, const std::vector<Expr>& components, int samples) {
  std::vector<std::size_t> circles;
  for (std::size_t i = 0; i < m.dim(); ++i) {
    if (m.coords()[i].kind == CoordKind::Circle) circles.push_back(i);
  }
  if (circles.empty()) return 0.0;
  std::vector<Program> progs;
  for (const auto& c : components) progs.emplace_back(c, m.names());
  double worst = 0.0;
  int used = 0;
  for (std::uint64_t k = 1; used < samples && k < 2000; ++k) {
    Point p = halton_point(k, m.dim());
    for (auto& v : p) v = -3.0 + 6.0 * v;
    if (!m.contains(p)) continue;
    p = m.normalize(p);
    ++used;
    for (std::size_t ci : circles) {
      Point q = p;
      q[ci] += m.coords()[ci].period;
      for (const auto& prog : progs) {
        try {
          worst = std::max(worst, std::abs(prog(q) - prog(p)) / (1.0 + std::abs(prog(p))));
        } catch (const EvalError&) {
        }
      }
    }
  }
  return worst;
}

VectorField::VectorField(ChartManifold m, std::vector<Expr> components, const Params& params) {
  if (components.size() != m.dim())
    throw DimensionMismatch("vector field has " + std::to_string(components.size()) + " components on '" + m.name() +
                            "' of dimension " + std::to_string(m.dim()));
  auto impl = std::make_shared<Impl>();
  for (auto& c : components) {
    impl->components.push_back(sfol::bind(c, params));
    impl->programs.emplace_back(impl->components.back(), m.names());
  }
  if (periodicity_defect(m, impl->components) > 1e-9)
    throw PreconditionFailed("vector field is not periodic in a circle coordinate of '" + m.name() + "'");
  impl->manifold = std::move(m);
  impl_ = std::move(impl);
}

VectorField VectorField::zero(const ChartManifold& m) { return VectorField(m, std::vector<Expr>(m.dim(), Expr(0.0))); }

VectorField VectorField::coordinate(const ChartManifold& m, const std::string& coord) {
  auto idx = m.index_of(coord);
  if (!idx) throw UnknownSymbol("no coordinate '" + coord + "' on '" + m.name() + "'");
  std::vector<Expr> comps(m.dim(), Expr(0.0));
  comps[*idx] = Expr(1.0);
  return VectorField(m, std::move(comps));
}

const ChartManifold& VectorField::manifold() const { return impl_->manifold; }
std::size_t VectorField::dim() const { return impl_->components.size(); }
const std::vector<Expr>& VectorField::components() const { return impl_->components; }

void VectorField::eval_into(std::span<const double> p, std::span<double> out) const {
  const auto& coords = impl_->manifold.coords();
  std::array<double, 16> buf{};
  std::vector<double> big;
  std::span<double> q;
  if (p.size() <= buf.size()) {
    q = std::span<double>(buf.data(), p.size());
  } else {
    big.resize(p.size());
    q = big;
  }
  for (std::size_t i = 0; i < p.size(); ++i) {
    double v = p[i];
    if (coords[i].kind == CoordKind::Circle) {
      v = std::fmod(v, coords[i].period);
      if (v < 0.0) v += coords[i].period;
    }
    q[i] = v;
  }
  for (std::size_t i = 0; i < impl_->programs.size(); ++i) out[i] = impl_->programs[i](q);
}

Point VectorField::operator()(const Point& p) const {
  if (!impl_->manifold.contains(p)) throw OutOfDomain("point outside the domain of '" + impl_->manifold.name() + "'");
  Point out(dim());
  eval_into(p, out);
  return out;
}

bool VectorField::is_symbolically_zero() const {
  for (const auto& c : impl_->components) {
    if (!c.is_zero()) return false;
  }
  return true;
}

std::string VectorField::to_string() const {
  std::string s;
  const auto& names = impl_->manifold.names();
  for (std::size_t i = 0; i < dim(); ++i) {
    const Expr& c = impl_->components[i];
    if (c.is_zero()) continue;
    if (!s.empty()) s += " + ";
    s += c.is_one() ? "d/d" + names[i] : "(" + c.to_string() + ")*d/d" + names[i];
  }
  return s.empty() ? "0" : s;
}

Expr apply(const VectorField& x, const Expr& f) {
  std::vector<Expr> terms;
  const auto& names = x.manifold().names();
  for (std::size_t j = 0; j < x.dim(); ++j) {
    if (x.components()[j].is_zero()) continue;
    terms.push_back(x.components()[j] * diff(f, names[j]));
  }
  return make_sum(std::move(terms));
}

namespace {
void require_same(const VectorField& a, const VectorField& b) {
  if (!a.manifold().same_as(b.manifold()))
    throw ManifoldMismatch("vector fields live on '" + a.manifold().name() + "' and '" + b.manifold().name() + "'");
}
}  // namespace

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  require_same(x, y);
  std::vector<Expr> comps;
  for (std::size_t k = 0; k < x.dim(); ++k) {
    comps.push_back(apply(x, y.components()[k]) - apply(y, x.components()[k]));
  }
  return VectorField(x.manifold(), std::move(comps));
}

VectorField operator+(const VectorField& a, const VectorField& b) {
  require_same(a, b);
  std::vector<Expr> comps;
  for (std::size_t k = 0; k < a.dim(); ++k) comps.push_back(a.components()[k] + b.components()[k]);
  return VectorField(a.manifold(), std::move(comps));
}

VectorField operator-(const VectorField& a, const VectorField& b) {
  require_same(a, b);
  std::vector<Expr> comps;
  for (std::size_t k = 0; k < a.dim(); ++k) comps.push_back(a.components()[k] - b.components()[k]);
  return VectorField(a.manifold(), std::move(comps));
}

VectorField operator*(const Expr& f, const VectorField& x) {
  std::vector<Expr> comps;
  for (const auto& c : x.components()) comps.push_back(f * c);
  return VectorField(x.manifold(), std::move(comps));
}

Point SmoothMap::operator()(const Point& p) const {
  Point q = source.normalize(p);
  Point out;
  for (const auto& c : components) out.push_back(Program(c, source.names())(q));
  return target.normalize(out);
}

std::optional<std::vector<std::size_t>> SmoothMap::projection_slots() const {
  std::vector<std::size_t> slots;
  for (const auto& c : components) {
    if (c.kind() != Expr::Kind::Var) return std::nullopt;
    auto idx = source.index_of(c.name());
    if (!idx) return std::nullopt;
    slots.push_back(*idx);
  }
  return slots;
}

Pushforward pushforward_field(const VectorField& x, const SmoothMap& f, const std::optional<std::vector<Expr>>& section) {
  if (!x.manifold().same_as(f.source))
    throw ManifoldMismatch("field lives on '" + x.manifold().name() + "', map starts at '" + f.source.name() + "'");
  if (f.components.size() != f.target.dim()) throw DimensionMismatch("map components vs target dimension");
  if (section && section->size() != f.source.dim()) throw DimensionMismatch("section components vs source dimension");

  std::vector<Expr> raw;  // dF(X) in source coordinates
  for (const auto& c : f.components) raw.push_back(apply(x, c));

  std::optional<std::vector<Expr>> downstairs;
  if (auto slots = f.projection_slots()) {
    std::set<std::string> allowed;
    std::map<std::string, Expr> rename;
    for (std::size_t i = 0; i < slots->size(); ++i) {
      const std::string& src = f.source.names()[(*slots)[i]];
      allowed.insert(src);
      rename.emplace(src, Expr::symbol(f.target.names()[i]));
    }
    bool ok = true;
    for (const auto& r : raw) {
      for (const auto& s : free_symbols(r)) ok = ok && allowed.count(s) > 0;
    }
    if (ok) {
      downstairs.emplace();
      for (const auto& r : raw) downstairs->push_back(substitute(r, rename));
    }
  }
  if (!downstairs && section) {
    std::map<std::string, Expr> repl;
    for (std::size_t i = 0; i < f.source.dim(); ++i) repl.emplace(f.source.names()[i], (*section)[i]);
    downstairs.emplace();
    for (const auto& r : raw) downstairs->push_back(substitute(r, repl));
  }

  std::vector<Program> raw_progs;
  for (const auto& r : raw) raw_progs.emplace_back(r, f.source.names());

  if (!downstairs) {
    // Look for a fiber-dependence witness: two points of one fiber with different dF(X).
    if (auto slots = f.projection_slots()) {
      const auto samples = region_samples(f.source, SampleBox::cube(f.source.dim()), 64);
      for (const auto& p : samples) {
        Point q = p;
        for (std::size_t i = 0; i < q.size(); ++i) {
          if (std::find(slots->begin(), slots->end(), i) == slots->end()) q[i] += 0.731;
        }
        if (!f.source.contains(q)) continue;
        q = f.source.normalize(q);
        for (const auto& prog : raw_progs) {
          try {
            if (std::abs(prog(p) - prog(q)) > 1e-9 * (1.0 + std::abs(prog(p))))
              return NotProjectable{"coefficient varies along the fibers", p};
          } catch (const EvalError&) {
          }
        }
      }
    }
    return NotProjectable{"pushforward depends on fiber coordinates and no section is available", std::nullopt};
  }

  VectorField y;
  try {
    y = VectorField(f.target, *downstairs);
  } catch (const PreconditionFailed& e) {
    return NotProjectable{e.what(), std::nullopt};
  }
  // Sampled verification on the fibers: dF(X)(p) == Y(F(p)).
  const auto samples = region_samples(f.source, SampleBox::cube(f.source.dim()), 100);
  Point out(f.target.dim());
  for (const auto& p : samples) {
    Point m = f(p);
    try {
      y.eval_into(m, out);
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = raw_progs[i](p);
        if (std::abs(v - out[i]) > 1e-9 * (1.0 + std::abs(v))) return NotProjectable{"coefficient varies along the fibers", p};
      }
    } catch (const EvalError&) {
    }
  }
  return y;
}

VectorField pushforward_by_diffeo(const VectorField& x, const std::vector<Expr>& f, const std::vector<Expr>& f_inverse) {
  const auto& m = x.manifold();
  if (f.size() != m.dim() || f_inverse.size() != m.dim()) throw DimensionMismatch("diffeomorphism components");
  std::map<std::string, Expr> back;
  for (std::size_t i = 0; i < m.dim(); ++i) back.emplace(m.names()[i], f_inverse[i]);
  std::vector<Expr> comps;
  for (const auto& fi : f) comps.push_back(substitute(apply(x, fi), back));
  return VectorField(m, std::move(comps));
}

}  // namespace sfol
