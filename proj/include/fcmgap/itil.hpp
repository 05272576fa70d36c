#pragma once

// Built-in service-support content: the goal maps, the metric variables and
// the eight-rule cost base.

#include <string>
#include <vector>

#include "fcmgap/fcm.hpp"
#include "fcmgap/frm.hpp"
#include "fcmgap/inference.hpp"
#include "fcmgap/linguistic.hpp"

namespace fcmgap::itil {

inline constexpr const char* kCost = "Cost";

inline std::vector<std::string> goal_concepts() {
  return {"ResponseTime", "Cost", "Interrupt", "ProcessOriented", "Recording", "Authorization"};
}

/// Simple {-1, 0, 1} goal map.
inline Fcm binary_goal_map() {
  return Fcm(goal_concepts(),
             Matrix<double>{
                 {0, 1, 1, 0, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 1, 0, 0, 0, 0},
                 {-1, -1, -1, 0, 0, 1},
                 {-1, 0, 0, 0, 0, 0},
                 {0, -1, 0, 0, 1, 0},
             },
             FcmMode::binary);
}

/// Goal map with linguistic strengths replaced by their unit-interval degrees.
inline Fcm weighted_goal_map() {
  return Fcm(goal_concepts(),
             Matrix<double>{
                 {0, 0.7, 0.9, 0, 0, 0},
                 {0, 0, 0, 0, 0, 0},
                 {0, 0.7, 0, 0, 0, 0},
                 {-0.5, -0.5, -0.3, 0, 0, 0.7},
                 {-0.1, 0, 0, 0, 0, 0},
                 {0, 0.7, 0, 0, 0.5, 0},
             },
             FcmMode::weighted);
}

/// Reduced map: cost as output, four metric concepts as inputs. Recording is
/// dropped; remaining weights are those of the weighted goal map.
inline Fcm optimum_goal_map() {
  return Fcm({"ResponseTime", "Cost", "Interrupt", "ProcessOriented", "Authorization"},
             Matrix<double>{
                 {0, 0.7, 0.9, 0, 0},
                 {0, 0, 0, 0, 0},
                 {0, 0.7, 0, 0, 0},
                 {-0.5, -0.5, -0.3, 0, 0.7},
                 {0, 0.7, 0, 0, 0},
             },
             FcmMode::weighted);
}

inline std::vector<LinguisticVariable> metric_variables() {
  return {
      LinguisticVariable::canonical(kInterruptTime, 0, 1440, "min/day"),
      LinguisticVariable::canonical(kResponseTime, 0, 1440, "min/day"),
      LinguisticVariable::canonical(kProcessOrientation, 0, 100, "%"),
      LinguisticVariable::canonical(kAuthorizedChanges, 0, 100, "%"),
  };
}

inline LinguisticVariable cost_variable() { return LinguisticVariable::canonical(kCost, 0, 100, "% of budget"); }

/// The eight experimental rules over (interrupt, response, process
/// orientation, authorized changes). Rows 3/4, 5/6 and 7/8 differ only in
/// process orientation and share a consequent.
inline std::vector<FuzzyRule> cost_rules() {
  struct Row {
    const char* interrupt;
    const char* response;
    const char* po;
    const char* auth;
    const char* cost;
  };
  static const Row rows[] = {
      {"Little", "Little", "Normal", "Much", "Little"},
      {"Much", "Much", "Little", "Little", "Much"},
      {"Normal", "Normal", "Much", "Normal", "Normal"},
      {"Normal", "Normal", "Little", "Normal", "Normal"},
      {"TooLittle", "TooLittle", "Much", "TooMuch", "TooLittle"},
      {"TooLittle", "TooLittle", "TooMuch", "TooMuch", "TooLittle"},
      {"TooMuch", "TooMuch", "Little", "TooLittle", "TooMuch"},
      {"TooMuch", "TooMuch", "TooLittle", "TooLittle", "TooMuch"},
  };
  std::vector<FuzzyRule> rules;
  for (const auto& r : rows) {
    rules.push_back(FuzzyRule{{{kInterruptTime, r.interrupt},
                               {kResponseTime, r.response},
                               {kProcessOrientation, r.po},
                               {kAuthorizedChanges, r.auth}},
                              kCost,
                              r.cost});
  }
  return rules;
}

inline RuleBase cost_rule_base() { return RuleBase(metric_variables(), cost_variable(), cost_rules()); }

}  // namespace fcmgap::itil
