#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sfol/sampling.hpp"
#include "sfol/vector_field.hpp"

namespace sfol {

// A named, ordered list of vector fields on one manifold. Holonomy words refer
// to generator sets by pointer, so sets are shared and never mutated.
struct GeneratorSet {
  std::string name;
  ChartManifold manifold;
  std::vector<VectorField> fields;

  std::size_t size() const { return fields.size(); }
  // n x k matrix whose columns are the field values at p (no domain check).
  Eigen::MatrixXd values_at(const Point& p) const;
};
using GeneratorSetPtr = std::shared_ptr<const GeneratorSet>;

GeneratorSetPtr make_generator_set(std::string name, std::vector<VectorField> fields);

class FoliationModule {
 public:
  FoliationModule() = default;
  // `generators` must be nonempty and share one manifold. The zero module is
  // given by a single zero field.
  FoliationModule(std::string name, std::vector<VectorField> generators);

  const std::string& name() const { return set_->name; }
  const ChartManifold& manifold() const { return set_->manifold; }
  const std::vector<VectorField>& generators() const { return set_->fields; }
  const GeneratorSetPtr& generator_set() const { return set_; }
  std::size_t size() const { return set_->fields.size(); }
  bool is_zero() const;

 private:
  GeneratorSetPtr set_;
};

// Numerical rank with threshold rel * sigma_max, and at least `abs_floor`.
int numeric_rank(const Eigen::MatrixXd& a, double rel = 1e-8, double abs_floor = 1e-12);

int tangent_dim(const FoliationModule& f, const Point& p);

struct FiberDim {
  int value = 0;
  bool exact = false;  // false: tangent_dim reported as a lower bound
};

FiberDim fiber_dim(const FoliationModule& f, const Point& p);

// Taylor-jet data used by fiber_dim and by generator selection: the columns
// of `ideal` span the jets of I_p F, `gen` holds the jets of the generators.
// Empty optional for non-polynomial generators.
struct JetData {
  Eigen::MatrixXd ideal;
  Eigen::MatrixXd gen;
};
std::optional<JetData> fiber_jets(const FoliationModule& f, const Point& p);

struct MembershipResult {
  bool pass = true;
  double worst_residual = 0.0;
  std::optional<Point> witness;  // sample point with the worst failing residual
  int samples = 0;
  std::string label = "pointwise";
};

// Least-squares coefficients of v in the span of the columns of a, and the residual norm.
std::pair<Eigen::VectorXd, double> span_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& v);

// X(p) in span{X_i(p)} at every sampled in-domain point of `region`
// (default [-3,3]^n), residual < 1e-7 (1 + |X(p)|).
MembershipResult pointwise_membership(const VectorField& x, const FoliationModule& f,
                                      const std::optional<SampleBox>& region = std::nullopt, int n_samples = 200);
MembershipResult pointwise_membership(const VectorField& x, const FoliationModule& f,
                                      const std::vector<Point>& samples);

// Surrogate for membership in the global hull; same computation as above.
MembershipResult hull_membership(const VectorField& x, const FoliationModule& f,
                                 const std::optional<SampleBox>& region = std::nullopt, int n_samples = 200);

struct BracketFailure {
  std::size_t i = 0;
  std::size_t j = 0;
  double residual = 0.0;
  std::optional<Point> witness;
};

struct InvolutivityReport {
  bool pass = true;
  std::vector<BracketFailure> failures;
};

InvolutivityReport involutivity_check(const FoliationModule& f, const std::optional<SampleBox>& region = std::nullopt);

}  // namespace sfol
