#include "sfol/sampling.hpp"

#include <cmath>
#include <numbers>

#include "sfol/errors.hpp"

namespace sfol {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double SplitMix64::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t SplitMix64::below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

std::vector<double> SplitMix64::direction(std::size_t k) {
  std::vector<double> v(k);
  double norm = 0.0;
  while (norm < 1e-12) {
    norm = 0.0;
    for (auto& x : v) {
      x = normal();
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (auto& x : v) x /= norm;
  return v;
}

double halton(std::uint64_t index, unsigned base) {
  double f = 1.0;
  double r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

std::vector<double> halton_point(std::uint64_t index, std::size_t dim) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (dim > std::size(primes)) throw DimensionMismatch("Halton sampling supports at most 16 dimensions");
  std::vector<double> p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = halton(index, primes[i]);
  return p;
}

SampleBox SampleBox::cube(std::size_t dim, double half_width) {
  return {Point(dim, -half_width), Point(dim, half_width)};
}

std::vector<Point> region_samples(const ChartManifold& m, const SampleBox& box, int n_halton) {
  const std::size_t n = m.dim();
  if (box.lo.size() != n || box.hi.size() != n) throw DimensionMismatch("sample box dimension");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(box.hi[i] > box.lo[i])) throw PreconditionFailed("empty sample region");
  }
  std::vector<Point> out;
  // integer lattice landmarks
  std::vector<std::vector<double>> axes(n);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    for (double v = std::ceil(box.lo[i]); v <= box.hi[i]; v += 1.0) {
      if (v > box.lo[i] && v < box.hi[i]) axes[i].push_back(v);
    }
    total *= std::max<std::size_t>(axes[i].size(), 1);
  }
  bool lattice = total <= 343;
  for (const auto& a : axes) lattice = lattice && !a.empty();
  if (lattice) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Point p(n);
      for (std::size_t i = 0; i < n; ++i) p[i] = axes[i][idx[i]];
      if (m.contains(p)) out.push_back(m.normalize(p));
      std::size_t k = 0;
      while (k < n && ++idx[k] == axes[k].size()) idx[k++] = 0;
      if (k == n) break;
    }
  }
  for (std::uint64_t i = 1; i <= static_cast<std::uint64_t>(std::max(n_halton, 0)); ++i) {
    Point u = halton_point(i, n);
    Point p(n);
    for (std::size_t k = 0; k < n; ++k) p[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * u[k];
    if (m.contains(p)) out.push_back(m.normalize(p));
  }
  return out;
}

std::vector<Point> ball_samples(const Point& center, double r, int n) {
  const std::size_t dim = center.size();
  std::vector<Point> out;
  if (dim == 0) return out;
  for (std::uint64_t i = 1; static_cast<int>(out.size()) < n && i < 100000; ++i) {
    Point u = halton_point(i, dim);
    double norm2 = 0.0;
    for (auto& v : u) {
      v = 2.0 * v - 1.0;
      norm2 += v * v;
    }
    if (norm2 > 1.0) continue;
    Point p(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = center[k] + r * u[k];
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace sfol
