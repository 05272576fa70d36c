#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcmgap/error.hpp"

namespace fcmgap {

/// Triangle (a, b, c) or trapezoid (a, b, c, d) with non-decreasing breakpoints.
/// A triangle is stored as a trapezoid with b == c. Shoulders are expressed by
/// repeating an endpoint, e.g. (0, 0, 0, 25) is 1 at 0 falling to 0 at 25.
class MembershipFunction {
 public:
  enum class Shape { triangle, trapezoid };

  MembershipFunction() = default;

  static MembershipFunction triangle(double a, double b, double c) {
    return MembershipFunction(Shape::triangle, {a, b, b, c});
  }
  static MembershipFunction trapezoid(double a, double b, double c, double d) {
    return MembershipFunction(Shape::trapezoid, {a, b, c, d});
  }

  Shape shape() const noexcept { return shape_; }
  const std::array<double, 4>& breakpoints() const noexcept { return p_; }
  double lo() const noexcept { return p_[0]; }
  double hi() const noexcept { return p_[3]; }

  /// Breakpoints as written in a model file: 3 for a triangle, 4 for a trapezoid.
  std::vector<double> points() const {
    if (shape_ == Shape::triangle) return {p_[0], p_[1], p_[3]};
    return {p_.begin(), p_.end()};
  }

  /// Midpoint of the plateau.
  double center() const noexcept { return 0.5 * (p_[1] + p_[2]); }

  double operator()(double x) const noexcept {
    const auto [a, b, c, d] = p_;
    if (x < a || x > d) return 0.0;
    if (x >= b && x <= c) return 1.0;
    if (x < b) return (x - a) / (b - a);
    return (d - x) / (d - c);
  }

  friend bool operator==(const MembershipFunction&, const MembershipFunction&) = default;

 private:
  MembershipFunction(Shape s, std::array<double, 4> p) : shape_(s), p_(p) {
    if (!std::is_sorted(p_.begin(), p_.end()))
      throw ValidationError("membership breakpoints must be non-decreasing");
  }

  Shape shape_ = Shape::triangle;
  std::array<double, 4> p_{0.0, 0.0, 0.0, 0.0};
};

struct Term {
  std::string name;
  MembershipFunction mf;

  friend bool operator==(const Term&, const Term&) = default;
};

/// Canonical five-term scale, ordered low to high.
inline const std::array<std::string, 5>& canonical_terms() {
  static const std::array<std::string, 5> names{"TooLittle", "Little", "Normal", "Much", "TooMuch"};
  return names;
}

/// Maps free-form labels ("too little", "usual", "very much", "Toomuch") onto
/// the canonical term names. Returns the input unchanged if no match.
inline std::string canonical_term_name(const std::string& label) {
  std::string key;
  for (char ch : label)
    if (std::isalnum(static_cast<unsigned char>(ch)))
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));

  static const std::map<std::string, std::string> aliases{
      {"toolittle", "TooLittle"}, {"verylittle", "TooLittle"}, {"little", "Little"},
      {"normal", "Normal"},       {"usual", "Normal"},         {"much", "Much"},
      {"toomuch", "TooMuch"},     {"verymuch", "TooMuch"},
  };
  auto it = aliases.find(key);
  return it == aliases.end() ? label : it->second;
}

/// Unit-interval degree attached to each canonical label when linguistic edge
/// labels are turned into map weights (TooLittle 0.1 ... TooMuch 0.9).
inline std::optional<double> linguistic_weight(const std::string& label) {
  static const std::map<std::string, double> scale{
      {"TooLittle", 0.1}, {"Little", 0.3}, {"Normal", 0.5}, {"Much", 0.7}, {"TooMuch", 0.9}};
  auto it = scale.find(canonical_term_name(label));
  if (it == scale.end()) return std::nullopt;
  return it->second;
}

class LinguisticVariable {
 public:
  LinguisticVariable() = default;
  LinguisticVariable(std::string name, double lo, double hi, std::vector<Term> terms, std::string unit = {})
      : name_(std::move(name)), unit_(std::move(unit)), lo_(lo), hi_(hi), terms_(std::move(terms)) {}

  /// Uniform five-term Ruspini partition: interior triangles with apexes at
  /// 25/50/75% of the range and base width 50%, shoulder trapezoids at the ends.
  static LinguisticVariable canonical(std::string name, double lo, double hi, std::string unit = {}) {
    const double q = (hi - lo) / 4.0;
    const auto& n = canonical_terms();
    std::vector<Term> terms{
        {n[0], MembershipFunction::trapezoid(lo, lo, lo, lo + q)},
        {n[1], MembershipFunction::triangle(lo, lo + q, lo + 2 * q)},
        {n[2], MembershipFunction::triangle(lo + q, lo + 2 * q, lo + 3 * q)},
        {n[3], MembershipFunction::triangle(lo + 2 * q, lo + 3 * q, hi)},
        {n[4], MembershipFunction::trapezoid(lo + 3 * q, hi, hi, hi)},
    };
    return LinguisticVariable(std::move(name), lo, hi, std::move(terms), std::move(unit));
  }

  const std::string& name() const noexcept { return name_; }
  const std::string& unit() const noexcept { return unit_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  const Term* find_term(const std::string& name) const {
    auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Term& t) { return t.name == name; });
    return it == terms_.end() ? nullptr : &*it;
  }

  const Term& term(const std::string& name) const {
    if (const Term* t = find_term(name)) return *t;
    throw UnknownName("term of variable " + name_, name, term_names());
  }

  std::vector<std::string> term_names() const {
    std::vector<std::string> out;
    for (const auto& t : terms_) out.push_back(t.name);
    return out;
  }

  bool contains(double x) const noexcept { return x >= lo_ && x <= hi_; }
  double clamp(double x) const noexcept { return std::clamp(x, lo_, hi_); }

  /// Invariant violations as messages; empty when valid. `coverage_samples`
  /// grid points are probed for the "some term is positive" requirement.
  std::vector<std::string> validate(std::size_t coverage_samples = 1001) const {
    std::vector<std::string> errors;
    if (name_.empty()) errors.push_back("variable name is empty");
    if (!(lo_ < hi_)) errors.push_back("variable " + name_ + ": range lo must be < hi");
    if (terms_.empty()) errors.push_back("variable " + name_ + ": no terms");
    std::vector<std::string> seen;
    for (const auto& t : terms_) {
      if (std::find(seen.begin(), seen.end(), t.name) != seen.end())
        errors.push_back("variable " + name_ + ": duplicate term " + t.name);
      seen.push_back(t.name);
      if (t.mf.lo() < lo_ || t.mf.hi() > hi_)
        errors.push_back("variable " + name_ + ": term " + t.name + " breakpoints leave the range");
    }
    if (errors.empty() && coverage_samples >= 2) {
      for (std::size_t k = 0; k < coverage_samples; ++k) {
        const double x = lo_ + (hi_ - lo_) * static_cast<double>(k) / static_cast<double>(coverage_samples - 1);
        bool covered = std::any_of(terms_.begin(), terms_.end(), [x](const Term& t) { return t.mf(x) > 0.0; });
        if (!covered) {
          errors.push_back("variable " + name_ + ": no term covers x = " + std::to_string(x));
          break;
        }
      }
    }
    return errors;
  }

  friend bool operator==(const LinguisticVariable&, const LinguisticVariable&) = default;

 private:
  std::string name_;
  std::string unit_;
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<Term> terms_;
};

/// Degree of every term at x. Inputs outside the range are clamped first.
inline std::map<std::string, double> fuzzify(const LinguisticVariable& var, double x) {
  const double v = var.clamp(x);
  std::map<std::string, double> out;
  for (const auto& t : var.terms()) out[t.name] = t.mf(v);
  return out;
}

}  // namespace fcmgap
