#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "sfol/manifold.hpp"

namespace sfol {

struct Assertion {
  std::string name;
  bool pass = true;
  std::string detail;
  nlohmann::json witness;  // null when there is nothing to show
  double residual = 0.0;
};

// Outcome of one named check: a list of assertions, serialized as JSON.
class Report {
 public:
  explicit Report(std::string check = "") : check_(std::move(check)) {}

  const std::string& check() const { return check_; }
  const std::vector<Assertion>& assertions() const { return assertions_; }

  Report& add(std::string name, bool pass, std::string detail = "", nlohmann::json witness = nullptr,
              double residual = 0.0);
  // Appends the assertions of `other`, prefixing their names with its check name.
  Report& merge(const Report& other);

  bool passed() const;
  int failures() const;
  nlohmann::json to_json() const;

 private:
  std::string check_;
  std::vector<Assertion> assertions_;
};

// Combined document for several reports, sorted by check name; "status" is
// "pass" iff every report passed.
nlohmann::json reports_to_json(std::vector<Report> reports);

}  // namespace sfol
