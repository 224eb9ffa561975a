#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfol/groupoid.hpp"
#include "sfol/report.hpp"
#include "sfol/scenario.hpp"

namespace sfol {

struct RunOptions {
  std::uint64_t seed = 1;
  int budget = 10000;  // leaf_sample budget of the fibration check
  double tol = 1e-5;   // equivalent() tolerance of the word suites
  int samples = 50;    // sampled cases per property suite
};

// Scenario defaults for seed, budget and tolerance.
RunOptions default_options(const Scenario& s);

// Known check names, sorted.
std::vector<std::string> check_names();

// Runs one named check. Throws PreconditionFailed for an unknown name or when
// the scenario lacks the data the check needs (for example a group action).
Report run_check(const Scenario& s, const std::string& name, const RunOptions& opt);

// Runs the scenario's `checks` list in parallel; reports in check-name order.
std::vector<Report> run_checks(const Scenario& s, const std::vector<std::string>& names, const RunOptions& opt);

// The groupoid R x P of a complete vector field: arrows (t, p), s = p,
// t = flow of x for time t; composition adds times.
GroupoidModel flow_groupoid(const VectorField& x, double time_scale = 2.0);

// Bracket against finite differences, flow composition and inversion, and the
// Jacobi identity on `fields` random fields of the plane.
Report numeric_foundations_check(int fields = 20, std::uint64_t seed = 1);

}  // namespace sfol
