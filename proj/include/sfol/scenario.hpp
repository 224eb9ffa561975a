#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sfol/foliation.hpp"
#include "sfol/group.hpp"
#include "sfol/quotient.hpp"

namespace sfol {

// Step coefficients over the induced foliation on M, a downstairs source and
// an upstairs point over it.
struct WitnessSpec {
  std::vector<std::vector<double>> steps;
  Point source;
  Point point;
  std::size_t line = 0;
};

struct Scenario {
  std::string name;
  std::string description;
  Params params;
  std::uint64_t seed = 1;
  int budget = 10000;
  double tol = 1e-5;
  std::vector<std::string> checks;

  ChartManifold P;
  std::optional<ChartManifold> M;
  FoliationModule F;
  std::optional<LieGroupModel> group;
  GroupActionPtr action;
  std::optional<SubmersionQuotient> quotient;
  std::vector<WitnessSpec> witnesses;
};

// Parses the section/key format documented in docs/scenario-format.md.
// Throws ParseError with the offending line on syntax or validation errors.
Scenario parse_scenario(std::string_view text, const std::string& origin = "<scenario>");
// A built-in scenario name or a path to a scenario file.
Scenario load_scenario(const std::string& name_or_path);

std::vector<std::string> builtin_scenario_names();
std::optional<std::string> builtin_scenario_text(const std::string& name);

// Scenario witnesses as downstairs words over the induced foliation.
std::vector<FibrationWitness> fibration_witnesses(const Scenario& s, const PushforwardFoliation& push);

}  // namespace sfol
