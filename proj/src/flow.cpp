#include "sfol/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "sfol/errors.hpp"
#include "sfol/sampling.hpp"

namespace sfol {

std::string to_string(FlowStatus s) {
  switch (s) {
    case FlowStatus::Completed: return "Completed";
    case FlowStatus::LeftDomain: return "LeftDomain";
    case FlowStatus::StepFailure: return "StepFailure";
  }
  return "?";
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

struct Stepper {
  const FlowRhs& rhs;
  std::size_t n;
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp;

  Stepper(const FlowRhs& f, std::size_t dim)
      : rhs(f), n(dim), k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), tmp(dim) {}

  // One step from y with size h; y5 receives the 5th order solution and the
  // return value is the scaled error norm. k1 must hold rhs(y).
  double step(const Point& y, double h, Point& y5, double tol) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    rhs(tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(tmp, k4);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(tmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(tmp, k6);
    y5.resize(n);
    for (std::size_t i = 0; i < n; ++i) y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(y5, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = tol + tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(e) / sc);
    }
    return err;
  }
};

bool finite(const Point& p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return std::isfinite(v); });
}

constexpr double kClauseSlack = 1e-6;

}  // namespace

FlowResult integrate(const FlowRhs& rhs, const ChartManifold& m, const Point& p, double t, const FlowOptions& opt) {
  if (p.size() != m.dim()) throw DimensionMismatch("flow: point dimension");
  if (!m.contains(p)) throw OutOfDomain("flow: start point outside the domain of '" + m.name() + "'");
  FlowResult res;
  res.endpoint = m.normalize(p);
  if (opt.record) res.trajectory.push_back(res.endpoint);
  if (t == 0.0) return res;

  const std::size_t n = m.dim();
  const bool monitored = !m.domain().empty();
  const double dir = t > 0 ? 1.0 : -1.0;
  const double total = std::abs(t);
  Stepper st(rhs, n);
  Point y = p;
  Point y5;
  double done = 0.0;
  double h = std::min({total, opt.max_step, 0.01});
  auto lits = monitored ? m.literal_values(y) : std::vector<std::vector<double>>{};
  long steps = 0;

  auto fail = [&](const std::string& why) {
    res.status = FlowStatus::StepFailure;
    res.endpoint = m.normalize(y);
    res.tau = dir * done;
    res.message = why;
    return res;
  };

  try {
    rhs(y, st.k1);
  } catch (const EvalError& e) {
    return fail(e.what());
  }
  if (!finite(st.k1)) return fail("non-finite vector field value");
  while (done < total) {
    if (++steps > opt.max_steps) return fail("too many steps");
    h = std::min({h, total - done, opt.max_step});
    if (h < 1e-12 * std::max(1.0, done)) return fail("step size underflow");
    double err;
    try {
      err = st.step(y, dir * h, y5, opt.tol);
    } catch (const EvalError&) {
      err = std::numeric_limits<double>::quiet_NaN();
    }
    if (!std::isfinite(err) || !finite(y5)) {
      h *= 0.25;
      continue;
    }
    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      continue;
    }
    if (monitored) {
      auto lits_new = m.literal_values(y5);
      // exit times (as fractions of h) collected from a margin sign change
      // and from literal crossings that are not covered by another literal
      double exit = std::numeric_limits<double>::infinity();
      std::vector<double> k1_saved = st.k1;
      Point probe;
      bool probed = false;
      auto state_at = [&](double hh) {
        probed = true;
        st.k1 = k1_saved;
        st.step(y, dir * hh, probe, opt.tol);
        return probe;
      };
      auto bisect = [&](auto&& inside) {
        double lo = 0.0, hi = h;
        while (hi - lo > 1e-11) {
          const double mid = 0.5 * (lo + hi);
          if (inside(mid)) lo = mid;
          else hi = mid;
        }
        return std::pair{lo, hi};
      };
      if (!m.contains(y5)) {
        exit = std::min(exit, bisect([&](double hh) { return m.contains(state_at(hh)); }).first);
      }
      for (std::size_t c = 0; c < lits.size(); ++c) {
        for (std::size_t l = 0; l < lits[c].size(); ++l) {
          if (!(lits[c][l] > 0.0 && lits_new[c][l] <= 0.0)) continue;
          auto [lo, hi] = bisect([&](double hh) { return m.literal_values(state_at(hh))[c][l] > 0.0; });
          const auto at = m.literal_values(state_at(hi));
          double others = -std::numeric_limits<double>::infinity();
          for (std::size_t o = 0; o < at[c].size(); ++o) {
            if (o != l) others = std::max(others, at[c][o]);
          }
          if (others <= kClauseSlack) exit = std::min(exit, lo);
        }
      }
      st.k1 = k1_saved;
      if (std::isfinite(exit)) {
        Point last = state_at(exit);
        st.k1 = k1_saved;
        res.status = FlowStatus::LeftDomain;
        res.endpoint = m.normalize(m.contains(last) ? last : y);
        res.tau = dir * (done + (m.contains(last) ? exit : 0.0));
        res.message = "trajectory left the domain";
        return res;
      }
      if (probed) rhs(y5, st.k7);
      lits = std::move(lits_new);
    }
    res.error_estimate += err * opt.tol;
    y = y5;
    done += h;
    std::swap(st.k1, st.k7);
    if (opt.record) res.trajectory.push_back(m.normalize(y));
    h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
  }
  res.endpoint = m.normalize(y);
  res.tau = t;
  return res;
}

FlowResult flow(const VectorField& x, const Point& p, double t, const FlowOptions& opt) {
  FlowRhs rhs = [&x](std::span<const double> q, std::span<double> out) { x.eval_into(q, out); };
  return integrate(rhs, x.manifold(), p, t, opt);
}

FlowResult exp_combination(std::span<const double> v, const std::vector<VectorField>& fields, const Point& p,
                           const FlowOptions& opt) {
  if (v.size() != fields.size())
    throw DimensionMismatch("exp_combination: " + std::to_string(v.size()) + " coefficients for " +
                            std::to_string(fields.size()) + " fields");
  if (fields.empty()) throw PreconditionFailed("exp_combination: no fields");
  const ChartManifold& m = fields.front().manifold();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0 && !fields[i].is_symbolically_zero()) active.push_back(i);
  }
  if (active.empty()) return integrate([](std::span<const double>, std::span<double>) {}, m, p, 0.0, opt);
  std::vector<double> coeffs(v.begin(), v.end());
  const std::size_t n = m.dim();
  FlowRhs rhs = [&, buf = std::vector<double>(n)](std::span<const double> q, std::span<double> out) mutable {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i : active) {
      fields[i].eval_into(q, buf);
      for (std::size_t k = 0; k < n; ++k) out[k] += coeffs[i] * buf[k];
    }
  };
  return integrate(rhs, m, p, 1.0, opt);
}

PointCloud::PointCloud(ChartManifold m, double cell) : m_(std::move(m)), cell_(cell) {
  if (!(cell > 0.0)) throw PreconditionFailed("point cloud cell size must be positive");
  for (const auto& c : m_.coords()) {
    wrap_.push_back(c.kind == CoordKind::Circle ? std::max<long>(1, static_cast<long>(std::floor(c.period / cell_))) : 0);
  }
}

std::vector<long> PointCloud::key_of(const Point& p) const {
  std::vector<long> key(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    long k = static_cast<long>(std::floor(p[i] / cell_));
    if (wrap_[i] > 0) k = ((k % wrap_[i]) + wrap_[i]) % wrap_[i];
    key[i] = k;
  }
  return key;
}

std::string PointCloud::hash(const std::vector<long>& key) const {
  std::string s;
  for (long k : key) {
    s += std::to_string(k);
    s += ',';
  }
  return s;
}

void PointCloud::insert(const Point& p) {
  Point q = m_.normalize(p);
  grid_[hash(key_of(q))].push_back(pts_.size());
  pts_.push_back(std::move(q));
}

bool PointCloud::near(const Point& q0, double eps) const {
  const Point q = m_.normalize(q0);
  if (eps > cell_) {
    return std::any_of(pts_.begin(), pts_.end(), [&](const Point& p) { return m_.distance(p, q) <= eps; });
  }
  const auto base = key_of(q);
  const std::size_t n = base.size();
  std::vector<int> off(n, -1);
  while (true) {
    std::vector<long> key = base;
    for (std::size_t i = 0; i < n; ++i) {
      key[i] += off[i];
      if (wrap_[i] > 0) key[i] = ((key[i] % wrap_[i]) + wrap_[i]) % wrap_[i];
    }
    auto it = grid_.find(hash(key));
    if (it != grid_.end()) {
      for (std::size_t idx : it->second) {
        if (m_.distance(pts_[idx], q) <= eps) return true;
      }
    }
    std::size_t k = 0;
    while (k < n && ++off[k] == 2) off[k++] = -1;
    if (k == n) break;
  }
  return false;
}

LeafSample leaf_sample(const FoliationModule& f, const Point& p, int budget, const LeafOptions& opt) {
  const auto& m = f.manifold();
  if (!m.contains(p)) throw OutOfDomain("leaf_sample: start point outside the domain");
  LeafSample out{PointCloud(m, opt.dedup)};
  out.cloud.insert(p);
  const std::size_t k = f.size();
  SplitMix64 rng(opt.seed);
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < k; ++i) {
    for (double s : {1.0, -1.0}) {
      std::vector<double> v(k, 0.0);
      v[i] = s * opt.step;
      axes.push_back(v);
    }
  }
  std::deque<std::size_t> queue{0};
  FlowOptions fo;
  while (!queue.empty() && static_cast<int>(out.cloud.points().size()) < budget) {
    const Point from = out.cloud.points()[queue.front()];
    queue.pop_front();
    auto dirs = axes;
    for (int r = 0; r < opt.random_directions; ++r) {
      auto d = rng.direction(k);
      for (auto& v : d) v *= opt.step;
      dirs.push_back(std::move(d));
    }
    for (const auto& d : dirs) {
      if (static_cast<int>(out.cloud.points().size()) >= budget) break;
      auto r = exp_combination(d, f.generators(), from, fo);
      if (!r.ok()) continue;
      if (out.cloud.near(r.endpoint, opt.dedup)) continue;
      queue.push_back(out.cloud.points().size());
      out.cloud.insert(r.endpoint);
    }
  }
  return out;
}

}  // namespace sfol
