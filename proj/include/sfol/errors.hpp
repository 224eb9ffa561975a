#pragma once

#include <stdexcept>
#include <string>

namespace sfol {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class UnknownSymbol : public Error {
 public:
  using Error::Error;
};

class OutOfDomain : public Error {
 public:
  using Error::Error;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ManifoldMismatch : public Error {
 public:
  using Error::Error;
};

class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

class DomainTooSmall : public Error {
 public:
  DomainTooSmall(const std::string& what, double suggested_radius)
      : Error(what), suggested_radius_(suggested_radius) {}
  // Largest radius at which the sampled ball still mapped into the domain, or 0.
  double suggested_radius() const { return suggested_radius_; }

 private:
  double suggested_radius_;
};

}  // namespace sfol
