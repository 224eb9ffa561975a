#include "sfol/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>

#include "sfol/errors.hpp"

namespace sfol {

Eigen::MatrixXd GeneratorSet::values_at(const Point& p) const {
  const std::size_t n = manifold.dim();
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(fields.size()));
  Point out(n);
  for (std::size_t j = 0; j < fields.size(); ++j) {
    fields[j].eval_into(p, out);
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = out[i];
  }
  return a;
}

GeneratorSetPtr make_generator_set(std::string name, std::vector<VectorField> fields) {
  if (fields.empty()) throw PreconditionFailed("generator set '" + name + "' is empty");
  for (const auto& f : fields) {
    if (!f.manifold().same_as(fields.front().manifold()))
      throw ManifoldMismatch("generator set '" + name + "' mixes manifolds");
  }
  auto set = std::make_shared<GeneratorSet>();
  set->name = std::move(name);
  set->manifold = fields.front().manifold();
  set->fields = std::move(fields);
  return set;
}

FoliationModule::FoliationModule(std::string name, std::vector<VectorField> generators)
    : set_(make_generator_set(std::move(name), std::move(generators))) {}

bool FoliationModule::is_zero() const {
  return std::all_of(generators().begin(), generators().end(), [](const VectorField& x) { return x.is_symbolically_zero(); });
}

int numeric_rank(const Eigen::MatrixXd& a, double rel, double abs_floor) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 0;
  const double cut = std::max(rel * s(0), abs_floor);
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++r;
  }
  return r;
}

int tangent_dim(const FoliationModule& f, const Point& p) {
  if (!f.manifold().contains(p)) throw OutOfDomain("tangent_dim: point outside the domain of '" + f.manifold().name() + "'");
  return numeric_rank(f.generator_set()->values_at(p));
}

namespace {

using MultiIndex = std::vector<int>;

std::vector<MultiIndex> multi_indices(std::size_t n, int max_order) {
  std::vector<MultiIndex> out;
  for (int order = 0; order <= max_order; ++order) {
    // all compositions of `order` into n nonnegative parts
    MultiIndex a(n, 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i + 1 == n) {
        a[i] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[i] = v;
        rec(i + 1, left - v);
      }
    };
    if (n == 0) {
      if (order == 0) out.push_back(a);
    } else {
      rec(0, order);
    }
  }
  return out;
}

double factorial_product(const MultiIndex& b) {
  double r = 1.0;
  for (int v : b) {
    for (int k = 2; k <= v; ++k) r *= k;
  }
  return r;
}

// Taylor coefficients d^b f(p) / b! for all listed multi-indices.
std::vector<double> taylor(const Expr& e, const std::vector<MultiIndex>& idx, const std::map<MultiIndex, std::size_t>& pos,
                           const std::vector<std::string>& names, const Point& p) {
  std::vector<Expr> derivs(idx.size());
  std::vector<double> out(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const MultiIndex& b = idx[k];
    auto first = std::find_if(b.begin(), b.end(), [](int v) { return v > 0; });
    if (first == b.end()) {
      derivs[k] = e;
    } else {
      MultiIndex parent = b;
      const auto i = static_cast<std::size_t>(first - b.begin());
      parent[i] -= 1;
      derivs[k] = diff(derivs[pos.at(parent)], names[i]);
    }
    out[k] = derivs[k].is_zero() ? 0.0 : Program(derivs[k], names)(p) / factorial_product(b);
  }
  return out;
}

}  // namespace

std::optional<JetData> fiber_jets(const FoliationModule& f, const Point& p) {
  const auto& m = f.manifold();
  const std::size_t n = m.dim();
  std::set<std::string> vars(m.names().begin(), m.names().end());
  int degree = 0;
  for (const auto& x : f.generators()) {
    for (const auto& c : x.components()) {
      auto d = polynomial_degree(c, vars);
      if (!d) return std::nullopt;
      degree = std::max(degree, *d);
    }
  }
  const int order = degree + 1;
  const auto idx = multi_indices(n, order);
  std::map<MultiIndex, std::size_t> pos;
  for (std::size_t k = 0; k < idx.size(); ++k) pos.emplace(idx[k], k);
  const std::size_t nj = idx.size();
  const Point q = m.normalize(p);

  // jets[j][component] = Taylor coefficient vector
  std::vector<std::vector<std::vector<double>>> jets;
  for (const auto& x : f.generators()) {
    std::vector<std::vector<double>> comp;
    for (const auto& c : x.components()) comp.push_back(taylor(c, idx, pos, m.names(), q));
    jets.push_back(std::move(comp));
  }
  const auto rows = static_cast<Eigen::Index>(n * nj);
  const auto k = static_cast<Eigen::Index>(f.size());
  JetData out;
  out.gen = Eigen::MatrixXd::Zero(rows, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t b = 0; b < nj; ++b) out.gen(static_cast<Eigen::Index>(c * nj + b), j) = jets[j][c][b];
    }
  }
  // (x - p)^a X_j for 1 <= |a| <= order, truncated at total order `order`
  std::vector<const MultiIndex*> shifts;
  for (const auto& a : idx) {
    int s = 0;
    for (int v : a) s += v;
    if (s >= 1) shifts.push_back(&a);
  }
  out.ideal = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(shifts.size()) * k);
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (const MultiIndex* a : shifts) {
      for (std::size_t b = 0; b < nj; ++b) {
        MultiIndex src = idx[b];
        bool ok = true;
        for (std::size_t i = 0; i < n; ++i) {
          src[i] -= (*a)[i];
          ok = ok && src[i] >= 0;
        }
        if (!ok) continue;
        const std::size_t sp = pos.at(src);
        for (std::size_t c = 0; c < n; ++c) out.ideal(static_cast<Eigen::Index>(c * nj + b), col) = jets[j][c][sp];
      }
      ++col;
    }
  }
  return out;
}

FiberDim fiber_dim(const FoliationModule& f, const Point& p) {
  if (!f.manifold().contains(p)) throw OutOfDomain("fiber_dim: point outside the domain of '" + f.manifold().name() + "'");
  auto jets = fiber_jets(f, p);
  if (!jets) return {tangent_dim(f, p), false};
  Eigen::MatrixXd both(jets->ideal.rows(), jets->ideal.cols() + jets->gen.cols());
  both << jets->ideal, jets->gen;
  const double scale = std::max(both.cwiseAbs().maxCoeff(), 1.0);
  const int r_all = numeric_rank(both / scale, 1e-10, 1e-12);
  const int r_ideal = numeric_rank(jets->ideal / scale, 1e-10, 1e-12);
  return {r_all - r_ideal, true};
}

std::pair<Eigen::VectorXd, double> span_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& v) {
  if (a.cols() == 0) return {Eigen::VectorXd(), v.norm()};
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  cod.setThreshold(1e-12);
  Eigen::VectorXd c = cod.solve(v);
  return {c, (a * c - v).norm()};
}

MembershipResult pointwise_membership(const VectorField& x, const FoliationModule& f, const std::vector<Point>& samples) {
  if (!x.manifold().same_as(f.manifold()))
    throw ManifoldMismatch("membership: field on '" + x.manifold().name() + "', foliation on '" + f.manifold().name() + "'");
  if (samples.empty()) throw PreconditionFailed("membership: empty sample region");
  MembershipResult r;
  double worst_fail = -1.0;
  Point xv(x.dim());
  for (const auto& p : samples) {
    Eigen::MatrixXd a;
    try {
      a = f.generator_set()->values_at(p);
      x.eval_into(p, xv);
    } catch (const EvalError&) {
      continue;
    }
    ++r.samples;
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(xv.data(), static_cast<Eigen::Index>(xv.size()));
    const double res = span_solve(a, v).second;
    r.worst_residual = std::max(r.worst_residual, res);
    if (res >= 1e-7 * (1.0 + v.norm())) {
      r.pass = false;
      if (res > worst_fail) {
        worst_fail = res;
        r.witness = p;
      }
    }
  }
  if (r.samples == 0) throw PreconditionFailed("membership: no sample point could be evaluated");
  return r;
}

MembershipResult pointwise_membership(const VectorField& x, const FoliationModule& f,
                                      const std::optional<SampleBox>& region, int n_samples) {
  const SampleBox box = region.value_or(SampleBox::cube(f.manifold().dim()));
  return pointwise_membership(x, f, region_samples(f.manifold(), box, n_samples));
}

MembershipResult hull_membership(const VectorField& x, const FoliationModule& f, const std::optional<SampleBox>& region,
                                 int n_samples) {
  auto r = pointwise_membership(x, f, region, n_samples);
  r.label = "pointwise (hull surrogate)";
  return r;
}

InvolutivityReport involutivity_check(const FoliationModule& f, const std::optional<SampleBox>& region) {
  InvolutivityReport rep;
  const SampleBox box = region.value_or(SampleBox::cube(f.manifold().dim()));
  const auto samples = region_samples(f.manifold(), box);
  const auto& g = f.generators();
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      auto m = pointwise_membership(lie_bracket(g[i], g[j]), f, samples);
      if (!m.pass) {
        rep.pass = false;
        rep.failures.push_back({i, j, m.worst_residual, m.witness});
      }
    }
  }
  return rep;
}

}  // namespace sfol
