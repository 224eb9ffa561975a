#include "sfol/report.hpp"

#include <algorithm>
#include <cmath>

namespace sfol {

Report& Report::add(std::string name, bool pass, std::string detail, nlohmann::json witness, double residual) {
  assertions_.push_back({std::move(name), pass, std::move(detail), std::move(witness), residual});
  return *this;
}

Report& Report::merge(const Report& other) {
  for (auto a : other.assertions_) {
    if (!other.check_.empty()) a.name = other.check_ + "/" + a.name;
    assertions_.push_back(std::move(a));
  }
  return *this;
}

bool Report::passed() const { return failures() == 0; }

int Report::failures() const {
  return static_cast<int>(std::count_if(assertions_.begin(), assertions_.end(), [](const Assertion& a) { return !a.pass; }));
}

nlohmann::json Report::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& a : assertions_) {
    nlohmann::json j = {{"name", a.name}, {"pass", a.pass}};
    if (!a.detail.empty()) j["detail"] = a.detail;
    if (!a.witness.is_null()) j["witness"] = a.witness;
    if (a.residual != 0.0 && std::isfinite(a.residual)) j["residual"] = a.residual;
    if (!std::isfinite(a.residual)) j["residual"] = "inf";
    list.push_back(std::move(j));
  }
  return {{"check", check_}, {"status", passed() ? "pass" : "fail"}, {"failures", failures()}, {"assertions", list}};
}

nlohmann::json reports_to_json(std::vector<Report> reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const Report& a, const Report& b) { return a.check() < b.check(); });
  nlohmann::json list = nlohmann::json::array();
  bool ok = true;
  for (const auto& r : reports) {
    ok = ok && r.passed();
    list.push_back(r.to_json());
  }
  return {{"status", ok ? "pass" : "fail"}, {"reports", list}};
}

}  // namespace sfol
