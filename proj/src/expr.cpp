#include "sfol/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "sfol/errors.hpp"

namespace sfol {

struct Expr::Node {
  Kind kind = Kind::Const;
  double value = 0.0;
  int exponent = 0;
  std::string name;
  std::vector<Expr> args;
  std::string key;
};

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* kind_tag(Expr::Kind k) {
  switch (k) {
    case Expr::Kind::Sum: return "+";
    case Expr::Kind::Product: return "*";
    case Expr::Kind::Power: return "^";
    case Expr::Kind::Sin: return "sin";
    case Expr::Kind::Cos: return "cos";
    case Expr::Kind::Exp: return "exp";
    case Expr::Kind::Log: return "log";
    default: return "?";
  }
}

std::shared_ptr<Expr::Node> new_node(Expr::Kind kind) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  return n;
}

void finish_key(Expr::Node& n) {
  switch (n.kind) {
    case Expr::Kind::Const: n.key = format_number(n.value); return;
    case Expr::Kind::Var: n.key = n.name; return;
    case Expr::Kind::Power:
      n.key = "(^ " + n.args[0].key() + " " + std::to_string(n.exponent) + ")";
      return;
    default: break;
  }
  n.key = std::string("(") + kind_tag(n.kind);
  for (const auto& a : n.args) n.key += " " + a.key();
  n.key += ")";
}

bool key_less(const Expr& a, const Expr& b) { return a.key() < b.key(); }

}  // namespace

Expr::Expr() : Expr(0.0) {}

Expr::Expr(double value) {
  auto n = new_node(Kind::Const);
  n->value = value;
  finish_key(*n);
  node_ = std::move(n);
}

Expr Expr::constant(double value) { return Expr(value); }

Expr Expr::symbol(std::string name) {
  auto n = new_node(Kind::Var);
  n->name = std::move(name);
  finish_key(*n);
  return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
int Expr::exponent() const { return node_->exponent; }
std::span<const Expr> Expr::args() const { return node_->args; }
const std::string& Expr::key() const { return node_->key; }

namespace {

// Splits c*rest into (c, rest) for like-term merging.
std::pair<double, Expr> split_coefficient(const Expr& term) {
  if (term.kind() == Expr::Kind::Product && term.args().front().is_constant()) {
    auto args = term.args();
    std::vector<Expr> rest(args.begin() + 1, args.end());
    if (rest.size() == 1) return {args.front().value(), rest.front()};
    return {args.front().value(), make_product(std::move(rest))};
  }
  return {1.0, term};
}

std::pair<Expr, int> split_power(const Expr& factor) {
  if (factor.kind() == Expr::Kind::Power) return {factor.args().front(), factor.exponent()};
  return {factor, 1};
}

}  // namespace

Expr make_sum(std::vector<Expr> terms) {
  double constant = 0.0;
  std::vector<Expr> flat;
  for (auto& t : terms) {
    if (t.kind() == Expr::Kind::Sum) {
      for (const auto& a : t.args()) flat.push_back(a);
    } else {
      flat.push_back(std::move(t));
    }
  }
  std::map<std::string, std::pair<double, Expr>> groups;
  for (const auto& t : flat) {
    if (t.is_constant()) {
      constant += t.value();
      continue;
    }
    auto [c, core] = split_coefficient(t);
    auto it = groups.find(core.key());
    if (it == groups.end()) {
      groups.emplace(core.key(), std::make_pair(c, core));
    } else {
      it->second.first += c;
    }
  }
  std::vector<Expr> out;
  for (auto& [key, cc] : groups) {
    if (cc.first == 0.0) continue;
    out.push_back(cc.first == 1.0 ? cc.second : make_product({Expr(cc.first), cc.second}));
  }
  if (out.empty()) return Expr(constant);
  if (constant != 0.0) out.insert(out.begin(), Expr(constant));
  if (out.size() == 1) return out.front();
  std::sort(out.begin() + (constant != 0.0 ? 1 : 0), out.end(), key_less);
  auto n = new_node(Expr::Kind::Sum);
  n->args = std::move(out);
  finish_key(*n);
  return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

Expr make_product(std::vector<Expr> factors) {
  double coeff = 1.0;
  std::vector<Expr> flat;
  for (auto& f : factors) {
    if (f.kind() == Expr::Kind::Product) {
      for (const auto& a : f.args()) flat.push_back(a);
    } else {
      flat.push_back(std::move(f));
    }
  }
  std::map<std::string, std::pair<Expr, int>> bases;
  for (const auto& f : flat) {
    if (f.is_constant()) {
      coeff *= f.value();
      continue;
    }
    auto [base, e] = split_power(f);
    auto it = bases.find(base.key());
    if (it == bases.end()) {
      bases.emplace(base.key(), std::make_pair(base, e));
    } else {
      it->second.second += e;
    }
  }
  if (coeff == 0.0) return Expr(0.0);
  std::vector<Expr> out;
  for (auto& [key, be] : bases) {
    if (be.second == 0) continue;
    Expr p = make_power(be.first, be.second);
    if (p.is_constant()) {
      coeff *= p.value();
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) return Expr(coeff);
  if (coeff == 1.0 && out.size() == 1) return out.front();
  std::sort(out.begin(), out.end(), key_less);
  if (coeff != 1.0) out.insert(out.begin(), Expr(coeff));
  auto n = new_node(Expr::Kind::Product);
  n->args = std::move(out);
  finish_key(*n);
  return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

Expr make_power(const Expr& base, int exponent) {
  if (exponent == 0) return Expr(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) {
    if (base.value() == 0.0 && exponent < 0) {
      auto n = new_node(Expr::Kind::Power);  // left unevaluated; fails at evaluation
      n->args = {base};
      n->exponent = exponent;
      finish_key(*n);
      return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
    }
    return Expr(std::pow(base.value(), exponent));
  }
  if (base.kind() == Expr::Kind::Power) return make_power(base.args().front(), base.exponent() * exponent);
  if (base.kind() == Expr::Kind::Product) {
    std::vector<Expr> parts;
    for (const auto& a : base.args()) parts.push_back(make_power(a, exponent));
    return make_product(std::move(parts));
  }
  auto n = new_node(Expr::Kind::Power);
  n->args = {base};
  n->exponent = exponent;
  finish_key(*n);
  return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

Expr make_unary(Expr::Kind kind, const Expr& arg) {
  if (arg.is_constant()) {
    const double v = arg.value();
    switch (kind) {
      case Expr::Kind::Sin: return Expr(std::sin(v));
      case Expr::Kind::Cos: return Expr(std::cos(v));
      case Expr::Kind::Exp: return Expr(std::exp(v));
      case Expr::Kind::Log:
        if (v > 0.0) return Expr(std::log(v));
        break;
      default: break;
    }
  }
  if (kind == Expr::Kind::Log && arg.kind() == Expr::Kind::Exp) return arg.args().front();
  auto n = new_node(kind);
  n->args = {arg};
  finish_key(*n);
  return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

Expr operator+(const Expr& a, const Expr& b) { return make_sum({a, b}); }
Expr operator-(const Expr& a, const Expr& b) { return make_sum({a, make_product({Expr(-1.0), b})}); }
Expr operator*(const Expr& a, const Expr& b) { return make_product({a, b}); }
Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant() && b.value() != 0.0) return make_product({a, Expr(1.0 / b.value())});
  return make_product({a, make_power(b, -1)});
}
Expr operator-(const Expr& a) { return make_product({Expr(-1.0), a}); }
Expr pow(const Expr& base, int exponent) { return make_power(base, exponent); }
Expr sin(const Expr& a) { return make_unary(Expr::Kind::Sin, a); }
Expr cos(const Expr& a) { return make_unary(Expr::Kind::Cos, a); }
Expr exp(const Expr& a) { return make_unary(Expr::Kind::Exp, a); }
Expr log(const Expr& a) { return make_unary(Expr::Kind::Log, a); }

std::string Expr::to_string() const {
  auto wrap = [](const Expr& e) {
    const bool atomic = e.kind() == Kind::Var || (e.is_constant() && e.value() >= 0.0) ||
                        e.kind() == Kind::Sin || e.kind() == Kind::Cos || e.kind() == Kind::Exp ||
                        e.kind() == Kind::Log;
    return atomic ? e.to_string() : "(" + e.to_string() + ")";
  };
  switch (kind()) {
    case Kind::Const: return format_number(value());
    case Kind::Var: return name();
    case Kind::Sum: {
      std::string s;
      for (const auto& a : args()) {
        std::string t = a.to_string();
        if (s.empty()) {
          s = t;
        } else if (!t.empty() && t[0] == '-') {
          s += " - " + t.substr(1);
        } else {
          s += " + " + t;
        }
      }
      return s;
    }
    case Kind::Product: {
      std::string s;
      auto a = args();
      std::size_t i = 0;
      if (a.front().is_constant() && a.front().value() == -1.0) {
        s = "-";
        i = 1;
      }
      for (bool first = true; i < a.size(); ++i, first = false) {
        if (!first) s += "*";
        s += wrap(a[i]);
      }
      return s;
    }
    case Kind::Power: {
      const std::string e = exponent() < 0 ? "(" + std::to_string(exponent()) + ")" : std::to_string(exponent());
      return wrap(args().front()) + "^" + e;
    }
    default: return std::string(kind_tag(kind())) + "(" + args().front().to_string() + ")";
  }
}

Expr diff(const Expr& e, std::string_view symbol) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Const: return Expr(0.0);
    case K::Var: return Expr(e.name() == symbol ? 1.0 : 0.0);
    case K::Sum: {
      std::vector<Expr> terms;
      for (const auto& a : e.args()) terms.push_back(diff(a, symbol));
      return make_sum(std::move(terms));
    }
    case K::Product: {
      auto a = e.args();
      std::vector<Expr> terms;
      for (std::size_t i = 0; i < a.size(); ++i) {
        Expr d = diff(a[i], symbol);
        if (d.is_zero()) continue;
        std::vector<Expr> factors{d};
        for (std::size_t j = 0; j < a.size(); ++j) {
          if (j != i) factors.push_back(a[j]);
        }
        terms.push_back(make_product(std::move(factors)));
      }
      return make_sum(std::move(terms));
    }
    case K::Power: {
      const Expr& b = e.args().front();
      Expr db = diff(b, symbol);
      if (db.is_zero()) return Expr(0.0);
      return make_product({Expr(static_cast<double>(e.exponent())), make_power(b, e.exponent() - 1), db});
    }
    case K::Sin: {
      const Expr& u = e.args().front();
      return cos(u) * diff(u, symbol);
    }
    case K::Cos: {
      const Expr& u = e.args().front();
      return -(sin(u) * diff(u, symbol));
    }
    case K::Exp: return e * diff(e.args().front(), symbol);
    case K::Log: {
      const Expr& u = e.args().front();
      return diff(u, symbol) * make_power(u, -1);
    }
  }
  return Expr(0.0);
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Const: return e;
    case K::Var: {
      auto it = replacements.find(e.name());
      return it == replacements.end() ? e : it->second;
    }
    case K::Power: return make_power(substitute(e.args().front(), replacements), e.exponent());
    case K::Sum:
    case K::Product: {
      std::vector<Expr> parts;
      for (const auto& a : e.args()) parts.push_back(substitute(a, replacements));
      return e.kind() == K::Sum ? make_sum(std::move(parts)) : make_product(std::move(parts));
    }
    default: return make_unary(e.kind(), substitute(e.args().front(), replacements));
  }
}

Expr bind(const Expr& e, const Params& params) {
  if (params.empty()) return e;
  std::map<std::string, Expr> repl;
  for (const auto& [k, v] : params) repl.emplace(k, Expr(v));
  return substitute(e, repl);
}

namespace {
void collect_symbols(const Expr& e, std::set<std::string>& out) {
  if (e.kind() == Expr::Kind::Var) {
    out.insert(e.name());
    return;
  }
  for (const auto& a : e.args()) collect_symbols(a, out);
}
}  // namespace

std::set<std::string> free_symbols(const Expr& e) {
  std::set<std::string> out;
  collect_symbols(e, out);
  return out;
}

std::optional<int> polynomial_degree(const Expr& e, const std::set<std::string>& vars) {
  using K = Expr::Kind;
  auto depends = [&](const Expr& x) {
    for (const auto& s : free_symbols(x)) {
      if (vars.count(s)) return true;
    }
    return false;
  };
  switch (e.kind()) {
    case K::Const: return 0;
    case K::Var: return vars.count(e.name()) ? 1 : 0;
    case K::Sum: {
      int d = 0;
      for (const auto& a : e.args()) {
        auto da = polynomial_degree(a, vars);
        if (!da) return std::nullopt;
        d = std::max(d, *da);
      }
      return d;
    }
    case K::Product: {
      int d = 0;
      for (const auto& a : e.args()) {
        auto da = polynomial_degree(a, vars);
        if (!da) return std::nullopt;
        d += *da;
      }
      return d;
    }
    case K::Power: {
      auto db = polynomial_degree(e.args().front(), vars);
      if (!db) return std::nullopt;
      if (*db == 0) return 0;
      if (e.exponent() < 0) return std::nullopt;
      return *db * e.exponent();
    }
    default:
      if (depends(e.args().front())) return std::nullopt;
      return 0;
  }
}

// ---------------------------------------------------------------- parser

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression");
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail(std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

  std::vector<Expr> parse_list() {
    std::vector<Expr> out;
    skip_ws();
    if (pos_ >= text_.size()) fail("empty expression list");
    while (true) {
      out.push_back(parse_sum());
      skip_ws();
      if (pos_ == text_.size()) break;
      if (text_[pos_] != ',') fail(std::string("unexpected '") + text_[pos_] + "'");
      ++pos_;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("expression: " + msg + " at column " + std::to_string(pos_ + 1), 1, pos_ + 1);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    std::vector<Expr> terms{parse_term()};
    while (true) {
      if (accept('+')) {
        terms.push_back(parse_term());
      } else if (accept('-')) {
        terms.push_back(-parse_term());
      } else {
        break;
      }
    }
    return make_sum(std::move(terms));
  }

  Expr parse_term() {
    Expr acc = parse_unary();
    while (true) {
      if (accept('*')) {
        acc = acc * parse_unary();
      } else if (accept('/')) {
        acc = acc / parse_unary();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (!accept('^')) return base;
    const bool paren = accept('(');
    const bool negative = accept('-');
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("exponent must be an integer literal");
    int n = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (paren && !accept(')')) fail("expected ')'");
    return make_power(base, negative ? -n : n);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string id(text_.substr(start, pos_ - start));
      static const std::map<std::string, Expr::Kind> functions{
          {"sin", Expr::Kind::Sin}, {"cos", Expr::Kind::Cos}, {"exp", Expr::Kind::Exp}, {"log", Expr::Kind::Log}};
      if (auto f = functions.find(id); f != functions.end()) {
        if (!accept('(')) fail("expected '(' after " + id);
        Expr arg = parse_sum();
        if (!accept(')')) fail("expected ')'");
        return make_unary(f->second, arg);
      }
      if (id == "pi") return Expr(std::numbers::pi);
      return Expr::symbol(id);
    }
    fail(std::string("unexpected '") + c + "'");
  }

  Expr parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    std::string tmp(text_.substr(pos_));
    double v = std::strtod(tmp.c_str(), &end);
    std::size_t used = static_cast<std::size_t>(end - tmp.c_str());
    if (used == 0) fail("malformed number");
    (void)begin;
    pos_ += used;
    return Expr(v);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }
std::vector<Expr> parse_expr_list(std::string_view text) { return Parser(text).parse_list(); }

// ---------------------------------------------------------------- programs

Program::Program(const Expr& e, const std::vector<std::string>& slots) {
  emit(e, slots);
  std::size_t depth = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push:
      case Op::Load: ++depth; break;
      case Op::Add:
      case Op::Mul: depth -= static_cast<std::size_t>(ins.arg) - 1; break;
      default: break;
    }
    max_depth_ = std::max(max_depth_, depth);
  }
}

void Program::emit(const Expr& e, const std::vector<std::string>& slots) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Const: code_.push_back({Op::Push, 0, e.value()}); return;
    case K::Var: {
      auto it = std::find(slots.begin(), slots.end(), e.name());
      if (it == slots.end()) throw UnknownSymbol("unbound symbol '" + e.name() + "'");
      code_.push_back({Op::Load, static_cast<int>(it - slots.begin()), 0.0});
      return;
    }
    case K::Sum:
    case K::Product:
      for (const auto& a : e.args()) emit(a, slots);
      code_.push_back({e.kind() == K::Sum ? Op::Add : Op::Mul, static_cast<int>(e.args().size()), 0.0});
      return;
    case K::Power:
      emit(e.args().front(), slots);
      code_.push_back({Op::Pow, e.exponent(), 0.0});
      return;
    case K::Sin: emit(e.args().front(), slots); code_.push_back({Op::Sin, 0, 0.0}); return;
    case K::Cos: emit(e.args().front(), slots); code_.push_back({Op::Cos, 0, 0.0}); return;
    case K::Exp: emit(e.args().front(), slots); code_.push_back({Op::Exp, 0, 0.0}); return;
    case K::Log: emit(e.args().front(), slots); code_.push_back({Op::Log, 0, 0.0}); return;
  }
}

double Program::operator()(std::span<const double> slots) const {
  std::array<double, 48> small;
  std::vector<double> big;
  double* stack = small.data();
  if (max_depth_ > small.size()) {
    big.resize(max_depth_);
    stack = big.data();
  }
  std::size_t top = 0;
  for (const auto& ins : code_) {
    switch (ins.op) {
      case Op::Push: stack[top++] = ins.value; break;
      case Op::Load: stack[top++] = slots[static_cast<std::size_t>(ins.arg)]; break;
      case Op::Add: {
        double s = 0.0;
        for (int i = 0; i < ins.arg; ++i) s += stack[--top];
        stack[top++] = s;
        break;
      }
      case Op::Mul: {
        double p = 1.0;
        for (int i = 0; i < ins.arg; ++i) p *= stack[--top];
        stack[top++] = p;
        break;
      }
      case Op::Pow: {
        double& b = stack[top - 1];
        if (ins.arg < 0 && b == 0.0) throw EvalError("division by zero");
        b = std::pow(b, ins.arg);
        break;
      }
      case Op::Sin: stack[top - 1] = std::sin(stack[top - 1]); break;
      case Op::Cos: stack[top - 1] = std::cos(stack[top - 1]); break;
      case Op::Exp: stack[top - 1] = std::exp(stack[top - 1]); break;
      case Op::Log:
        if (!(stack[top - 1] > 0.0)) throw EvalError("log of non-positive value");
        stack[top - 1] = std::log(stack[top - 1]);
        break;
    }
  }
  return stack[0];
}

}  // namespace sfol
