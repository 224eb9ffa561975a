#pragma once

// Symbolic scalar expressions over named symbols (chart coordinates and real
// parameters). Values are immutable and share structure; every builder
// performs light simplification (constant folding, flattening, like-term and
// like-base merging). Simplification is not canonical: equality of two
// expressions is decided numerically, see `numerically_equal` in manifold.hpp.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfol {

using Params = std::map<std::string, double>;

class Expr {
 public:
  enum class Kind { Const, Var, Sum, Product, Power, Sin, Cos, Exp, Log };

  Expr();  // the constant 0
  Expr(double value);  // NOLINT(google-explicit-constructor)
  Expr(int value) : Expr(static_cast<double>(value)) {}  // NOLINT

  static Expr constant(double value);
  static Expr symbol(std::string name);

  Kind kind() const;
  double value() const;             // Const only
  const std::string& name() const;  // Var only
  int exponent() const;             // Power only
  std::span<const Expr> args() const;

  bool is_constant() const { return kind() == Kind::Const; }
  bool is_zero() const { return is_constant() && value() == 0.0; }
  bool is_one() const { return is_constant() && value() == 1.0; }

  // Structural key, stable across runs; used for like-term merging only.
  const std::string& key() const;
  std::string to_string() const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_sum(std::vector<Expr> terms);
  friend Expr make_product(std::vector<Expr> factors);
  friend Expr make_power(const Expr& base, int exponent);
  friend Expr make_unary(Kind kind, const Expr& arg);
};

Expr make_sum(std::vector<Expr> terms);
Expr make_product(std::vector<Expr> factors);
Expr make_power(const Expr& base, int exponent);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

// Exact partial derivative with respect to a symbol. Symbols not occurring in
// `e` give 0; use ChartManifold::diff for a name-checked variant.
Expr diff(const Expr& e, std::string_view symbol);

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);
Expr bind(const Expr& e, const Params& params);
std::set<std::string> free_symbols(const Expr& e);

// Total degree when `e` is a polynomial in `vars` (other symbols are treated as
// constants); nullopt otherwise.
std::optional<int> polynomial_degree(const Expr& e, const std::set<std::string>& vars);

// Parses the textual grammar documented in docs/expression-grammar.md.
Expr parse_expr(std::string_view text);
std::vector<Expr> parse_expr_list(std::string_view text);

// Stack-machine form of an expression with symbols resolved to slot indices.
class Program {
 public:
  Program() = default;
  Program(const Expr& e, const std::vector<std::string>& slots);

  // Throws EvalError on log of a non-positive value or a division by zero.
  double operator()(std::span<const double> slots) const;

 private:
  enum class Op : unsigned char { Push, Load, Add, Mul, Pow, Sin, Cos, Exp, Log };
  struct Instr {
    Op op;
    int arg;  // slot index, operand count or exponent
    double value;
  };
  void emit(const Expr& e, const std::vector<std::string>& slots);
  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
};

}  // namespace sfol
