#pragma once

#include <cstdint>
#include <vector>

#include "sfol/manifold.hpp"

namespace sfol {

// SplitMix64: state += 0x9E3779B97F4A7C15, then two xor-shift-multiply rounds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0x5F0F0F0Full) : state_(seed) {}
  std::uint64_t next();
  double uniform();                     // [0, 1)
  double uniform(double lo, double hi); // [lo, hi)
  double normal();
  std::uint64_t below(std::uint64_t n);
  // Uniform direction on the unit sphere of R^k (k >= 1).
  std::vector<double> direction(std::size_t k);

 private:
  std::uint64_t state_;
};

// Radical inverse of `index` in the given prime base.
double halton(std::uint64_t index, unsigned base);
// i-th point (i >= 1) of the Halton sequence in [0,1)^dim.
std::vector<double> halton_point(std::uint64_t index, std::size_t dim);

struct SampleBox {
  Point lo;
  Point hi;
  static SampleBox cube(std::size_t dim, double half_width = 3.0);
};

// Deterministic sample set of a box intersected with the domain: the integer
// lattice points of the box (when there are at most 343 of them) followed by
// `n_halton` Halton points. Points outside the domain are dropped.
std::vector<Point> region_samples(const ChartManifold& m, const SampleBox& box, int n_halton = 200);

// Halton points of the Euclidean ball of radius r around `center` (rejection
// from the cube); the center itself is not included. Out-of-domain points are
// kept so callers can detect a ball that is too large.
std::vector<Point> ball_samples(const Point& center, double r, int n);

}  // namespace sfol
