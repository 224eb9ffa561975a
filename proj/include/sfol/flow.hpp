#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sfol/foliation.hpp"
#include "sfol/vector_field.hpp"

namespace sfol {

enum class FlowStatus { Completed, LeftDomain, StepFailure };

std::string to_string(FlowStatus s);

struct FlowResult {
  Point endpoint;  // normalized; for LeftDomain the last in-domain point
  FlowStatus status = FlowStatus::Completed;
  double tau = 0.0;  // time actually reached
  double error_estimate = 0.0;
  std::vector<Point> trajectory;  // accepted steps, when requested
  std::string message;

  bool ok() const { return status == FlowStatus::Completed; }
};

struct FlowOptions {
  double tol = 1e-9;
  double max_step = 0.25;
  long max_steps = 200000;
  bool record = false;
};

// Right-hand side of an autonomous ODE on a chart: out = F(x).
using FlowRhs = std::function<void(std::span<const double>, std::span<double>)>;

// Dormand-Prince 5(4) integration of x' = rhs(x) on `m` from p for time t,
// with domain monitoring and bisection of exits.
FlowResult integrate(const FlowRhs& rhs, const ChartManifold& m, const Point& p, double t, const FlowOptions& opt = {});

FlowResult flow(const VectorField& x, const Point& p, double t, const FlowOptions& opt = {});

// Time-one flow of sum v_i X_i.
FlowResult exp_combination(std::span<const double> v, const std::vector<VectorField>& fields, const Point& p,
                           const FlowOptions& opt = {});

// Spatial hash of points on a chart manifold with wrap-aware distances.
class PointCloud {
 public:
  PointCloud(ChartManifold m, double cell);
  const ChartManifold& manifold() const { return m_; }
  const std::vector<Point>& points() const { return pts_; }
  void insert(const Point& p);
  // Some stored point within eps of q.
  bool near(const Point& q, double eps) const;

 private:
  std::vector<long> key_of(const Point& p) const;
  std::string hash(const std::vector<long>& key) const;
  ChartManifold m_;
  double cell_;
  std::vector<long> wrap_;  // cells per circle coordinate, 0 for lines
  std::vector<Point> pts_;
  std::unordered_map<std::string, std::vector<std::size_t>> grid_;
};

struct LeafSample {
  PointCloud cloud;
  bool reached(const Point& q, double eps) const { return cloud.near(q, eps); }
  const std::vector<Point>& points() const { return cloud.points(); }
};

struct LeafOptions {
  double step = 0.1;
  double dedup = 0.05;
  int random_directions = 2;
  std::uint64_t seed = 0x1eafULL;
};

// Breadth-first exploration of the leaf through p; `budget` bounds the number
// of visited points.
LeafSample leaf_sample(const FoliationModule& f, const Point& p, int budget, const LeafOptions& opt = {});

}  // namespace sfol
