#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace fcmgap {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual)
      : Error(what + ": expected " + std::to_string(expected) + ", got " +
              std::to_string(actual)),
        expected_(expected),
        actual_(actual) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t actual() const noexcept { return actual_; }

 private:
  std::size_t expected_;
  std::size_t actual_;
};

/// Invalid argument or model content (maps to the "usage/validation" exit code).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnknownName : public ValidationError {
 public:
  UnknownName(std::string kind, std::string name, std::vector<std::string> valid)
      : ValidationError("unknown " + kind + " '" + name + "'"),
        kind_(std::move(kind)),
        name_(std::move(name)),
        valid_(std::move(valid)) {}

  const std::string& kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<std::string>& valid_names() const noexcept { return valid_; }

 private:
  std::string kind_;
  std::string name_;
  std::vector<std::string> valid_;
};

class NonConvergence : public Error {
 public:
  explicit NonConvergence(std::size_t iterations)
      : Error("no repeated state within " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

/// Per-variable term degrees, as produced by fuzzification.
using Fuzzified = std::map<std::string, std::map<std::string, double>>;

/// Every rule evaluated to a zero degree of support. Carries the fuzzified
/// inputs so callers can show which terms were active.
class NoRuleFired : public Error {
 public:
  explicit NoRuleFired(Fuzzified degrees)
      : Error("no rule fired for the given inputs"), degrees_(std::move(degrees)) {}

  const Fuzzified& degrees() const noexcept { return degrees_; }

 private:
  Fuzzified degrees_;
};

class EmptyOutput : public Error {
 public:
  EmptyOutput() : Error("output fuzzy set is identically zero on the sampling grid") {}
};

}  // namespace fcmgap
