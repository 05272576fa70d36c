#pragma once

// Mamdani inference: min for AND, consequent clipping, max aggregation and a
// discrete centroid over a uniform grid spanning the output range.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fcmgap/error.hpp"
#include "fcmgap/linguistic.hpp"

namespace fcmgap {

struct FuzzyRule {
  std::map<std::string, std::string> antecedent;  // variable -> term, AND-conjoined
  std::string output_variable;
  std::string output_term;

  friend bool operator==(const FuzzyRule&, const FuzzyRule&) = default;
};

/// Operator choices. Only the Mamdani set is implemented; the fields exist so
/// model files can name them explicitly.
struct InferenceSettings {
  std::string and_op = "min";
  std::string agg_op = "max";
  std::string implication = "clip";
  std::string defuzz_method = "centroid";
  std::size_t defuzz_resolution = 101;

  std::vector<std::string> validate() const {
    std::vector<std::string> errors;
    if (and_op != "min") errors.push_back("settings.and_op: unsupported '" + and_op + "' (supported: min)");
    if (agg_op != "max") errors.push_back("settings.agg_op: unsupported '" + agg_op + "' (supported: max)");
    if (implication != "clip")
      errors.push_back("settings.implication: unsupported '" + implication + "' (supported: clip)");
    if (defuzz_method != "centroid")
      errors.push_back("settings.defuzz_method: unsupported '" + defuzz_method + "' (supported: centroid)");
    if (defuzz_resolution < 2) errors.push_back("settings.defuzz_resolution must be >= 2");
    return errors;
  }

  friend bool operator==(const InferenceSettings&, const InferenceSettings&) = default;
};

class RuleBase {
 public:
  RuleBase() = default;
  RuleBase(std::vector<LinguisticVariable> inputs, LinguisticVariable output, std::vector<FuzzyRule> rules)
      : inputs_(std::move(inputs)), output_(std::move(output)), rules_(std::move(rules)) {}

  const std::vector<LinguisticVariable>& inputs() const noexcept { return inputs_; }
  const LinguisticVariable& output() const noexcept { return output_; }
  const std::vector<FuzzyRule>& rules() const noexcept { return rules_; }

  const LinguisticVariable* find_input(const std::string& name) const {
    auto it = std::find_if(inputs_.begin(), inputs_.end(),
                           [&](const LinguisticVariable& v) { return v.name() == name; });
    return it == inputs_.end() ? nullptr : &*it;
  }

  std::vector<std::string> input_names() const {
    std::vector<std::string> out;
    for (const auto& v : inputs_) out.push_back(v.name());
    return out;
  }

  /// Reference and consistency errors, each naming the 1-based rule number.
  std::vector<std::string> validate() const {
    std::vector<std::string> errors;
    std::set<std::string> names;
    for (const auto& v : inputs_)
      if (!names.insert(v.name()).second) errors.push_back("duplicate input variable " + v.name());
    if (names.count(output_.name())) errors.push_back("output variable " + output_.name() + " is also an input");

    std::map<std::map<std::string, std::string>, std::pair<std::size_t, std::string>> consequents;
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const auto& r = rules_[i];
      const std::string where = "rule " + std::to_string(i + 1);
      if (r.antecedent.empty()) errors.push_back(where + ": empty antecedent");
      for (const auto& [var, term] : r.antecedent) {
        const auto* v = find_input(var);
        if (!v) errors.push_back(where + ": undeclared input variable '" + var + "'");
        else if (!v->find_term(term))
          errors.push_back(where + ": undeclared term '" + term + "' of variable " + var);
      }
      if (r.output_variable != output_.name())
        errors.push_back(where + ": consequent variable '" + r.output_variable + "' is not the output " +
                         output_.name());
      else if (!output_.find_term(r.output_term))
        errors.push_back(where + ": undeclared term '" + r.output_term + "' of variable " + output_.name());

      auto [it, inserted] = consequents.emplace(r.antecedent, std::make_pair(i, r.output_term));
      if (!inserted && it->second.second != r.output_term)
        errors.push_back(where + ": same antecedent as rule " + std::to_string(it->second.first + 1) +
                         " with a different consequent");
    }
    return errors;
  }

  friend bool operator==(const RuleBase&, const RuleBase&) = default;

 private:
  std::vector<LinguisticVariable> inputs_;
  LinguisticVariable output_;
  std::vector<FuzzyRule> rules_;
};

/// Degree of support: minimum of the antecedent degrees.
inline double rule_dos(const FuzzyRule& rule, const Fuzzified& fuzzified) {
  double dos = 1.0;
  for (const auto& [var, term] : rule.antecedent) {
    auto v = fuzzified.find(var);
    if (v == fuzzified.end()) throw ValidationError("fuzzified input lacks variable '" + var + "'");
    auto t = v->second.find(term);
    if (t == v->second.end()) throw ValidationError("fuzzified input lacks term '" + term + "' of " + var);
    dos = std::min(dos, t->second);
  }
  return dos;
}

/// Max-of-clipped-terms output set.
struct AggregatedSet {
  LinguisticVariable variable;
  std::map<std::string, double> heights;  // term -> clip height, every output term listed

  double operator()(double x) const {
    double mu = 0.0;
    for (const auto& t : variable.terms()) {
      auto h = heights.find(t.name);
      if (h == heights.end() || h->second <= 0.0) continue;
      mu = std::max(mu, std::min(h->second, t.mf(x)));
    }
    return mu;
  }
};

struct FiredRule {
  std::size_t index = 0;  // 0-based position in the rule base
  double dos = 0.0;

  friend bool operator==(const FiredRule&, const FiredRule&) = default;
};

struct Inference {
  Fuzzified fuzzified;
  std::vector<std::string> clamped_inputs;  // inputs that were outside their range
  std::map<std::string, double> used_inputs;  // after clamping
  std::vector<FiredRule> fired;              // DoS > 0, in rule order
  AggregatedSet output;
};

/// Fuzzifies, evaluates every rule and aggregates. Throws NoRuleFired when
/// every DoS is zero.
inline Inference infer(const RuleBase& rb, const std::map<std::string, double>& inputs) {
  Inference out;
  for (const auto& v : rb.inputs()) {
    auto it = inputs.find(v.name());
    if (it == inputs.end()) throw ValidationError("missing input '" + v.name() + "'");
    if (!v.contains(it->second)) out.clamped_inputs.push_back(v.name());
    out.used_inputs[v.name()] = v.clamp(it->second);
    out.fuzzified[v.name()] = fuzzify(v, it->second);
  }
  for (const auto& [name, value] : inputs)
    if (!rb.find_input(name)) throw UnknownName("input variable", name, rb.input_names());

  out.output.variable = rb.output();
  for (const auto& t : rb.output().terms()) out.output.heights[t.name] = 0.0;

  for (std::size_t i = 0; i < rb.rules().size(); ++i) {
    const auto& rule = rb.rules()[i];
    const double dos = rule_dos(rule, out.fuzzified);
    if (dos <= 0.0) continue;
    out.fired.push_back({i, dos});
    auto& h = out.output.heights[rule.output_term];
    h = std::max(h, dos);
  }
  if (out.fired.empty()) throw NoRuleFired(out.fuzzified);
  return out;
}

/// Grid abscissa k of `resolution` samples spanning [lo, hi], endpoints included.
inline double grid_point(double lo, double hi, std::size_t k, std::size_t resolution) {
  return lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(resolution - 1);
}

/// Discrete centroid sum(x mu(x)) / sum(mu(x)) over the grid.
template <typename Set>
double defuzzify_centroid(const Set& set, double lo, double hi, std::size_t resolution) {
  if (resolution < 2) throw ValidationError("defuzzification resolution must be >= 2");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < resolution; ++k) {
    const double x = grid_point(lo, hi, k, resolution);
    const double mu = set(x);
    num += x * mu;
    den += mu;
  }
  if (den <= 0.0) throw EmptyOutput();
  return num / den;
}

inline double defuzzify_centroid(const AggregatedSet& set, std::size_t resolution) {
  return defuzzify_centroid(set, set.variable.lo(), set.variable.hi(), resolution);
}

struct CostPrediction {
  double crisp = 0.0;
  std::vector<FiredRule> fired_rules;
  std::map<std::string, double> output_memberships;
  std::size_t defuzz_resolution = 0;
  std::vector<std::string> clamped_inputs;
  std::map<std::string, double> inputs;
  Fuzzified fuzzified;

  bool clamped() const noexcept { return !clamped_inputs.empty(); }

  /// Output term with the largest clip height (first in term order on ties).
  std::string dominant_term(const LinguisticVariable& output) const {
    std::string best;
    double h = -1.0;
    for (const auto& t : output.terms()) {
      auto it = output_memberships.find(t.name);
      if (it != output_memberships.end() && it->second > h) {
        h = it->second;
        best = t.name;
      }
    }
    return best;
  }
};

/// fuzzify -> infer -> defuzzify. NoRuleFired propagates.
inline CostPrediction predict_cost(const RuleBase& rb, const std::map<std::string, double>& metrics,
                                   const InferenceSettings& settings = {}) {
  if (auto errs = settings.validate(); !errs.empty()) throw ValidationError(errs.front());
  Inference inf = infer(rb, metrics);
  CostPrediction out;
  out.crisp = defuzzify_centroid(inf.output, settings.defuzz_resolution);
  out.fired_rules = std::move(inf.fired);
  out.output_memberships = inf.output.heights;
  out.defuzz_resolution = settings.defuzz_resolution;
  out.clamped_inputs = std::move(inf.clamped_inputs);
  out.inputs = std::move(inf.used_inputs);
  out.fuzzified = std::move(inf.fuzzified);
  return out;
}

}  // namespace fcmgap
