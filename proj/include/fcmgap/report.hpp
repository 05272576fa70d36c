#pragma once

// Structured (JSON) renderings of results, shared by the CLI's
// `--format structured` output and the HTTP API so both emit the same numbers.

#include <string>
#include <vector>

#include <json.hpp>

#include "fcmgap/fcm.hpp"
#include "fcmgap/frm.hpp"
#include "fcmgap/inference.hpp"
#include "fcmgap/scenario.hpp"

namespace fcmgap {

using ordered_json = nlohmann::ordered_json;

inline ordered_json state_json(const Fcm& fcm, const StateVector& s) {
  ordered_json active = ordered_json::array();
  for (auto i : s.active()) active.push_back(fcm.concepts()[i]);
  return ordered_json{{"values", s.values}, {"active", std::move(active)}};
}

inline ordered_json attractor_json(const Fcm& fcm, const Attractor& a) {
  ordered_json trajectory = ordered_json::array();
  for (const auto& s : a.trajectory) trajectory.push_back(state_json(fcm, s));
  ordered_json clamped = ordered_json::array();
  for (auto i : a.trajectory.front().clamped) clamped.push_back(fcm.concepts()[i]);
  return ordered_json{{"status", "ok"},
                      {"kind", to_string(a.kind)},
                      {"period", a.period},
                      {"iterations", a.iterations},
                      {"clamped", std::move(clamped)},
                      {"final", state_json(fcm, a.final_state())},
                      {"trajectory", std::move(trajectory)}};
}

inline ordered_json fuzzified_json(const Fuzzified& f, const std::vector<LinguisticVariable>& order) {
  ordered_json out = ordered_json::object();
  for (const auto& v : order) {
    auto it = f.find(v.name());
    if (it == f.end()) continue;
    ordered_json terms = ordered_json::object();
    for (const auto& t : v.terms())
      if (auto d = it->second.find(t.name); d != it->second.end()) terms[t.name] = d->second;
    out[v.name()] = std::move(terms);
  }
  return out;
}

inline ordered_json prediction_json(const RuleBase& rb, const CostPrediction& p) {
  ordered_json fired = ordered_json::array();
  for (const auto& r : p.fired_rules) {
    const auto& rule = rb.rules()[r.index];
    fired.push_back(ordered_json{{"rule", r.index + 1}, {"dos", r.dos}, {"consequent", rule.output_term}});
  }
  ordered_json heights = ordered_json::object();
  for (const auto& t : rb.output().terms()) heights[t.name] = p.output_memberships.at(t.name);

  ordered_json inputs = ordered_json::object();
  for (const auto& v : rb.inputs()) inputs[v.name()] = p.inputs.at(v.name());

  AggregatedSet set{rb.output(), p.output_memberships};
  ordered_json curve = ordered_json::array();
  for (std::size_t k = 0; k < p.defuzz_resolution; ++k) {
    const double x = grid_point(rb.output().lo(), rb.output().hi(), k, p.defuzz_resolution);
    curve.push_back({x, set(x)});
  }

  return ordered_json{{"status", "ok"},
                      {"crisp", p.crisp},
                      {"unit", rb.output().unit()},
                      {"dominant_term", p.dominant_term(rb.output())},
                      {"fired_rules", std::move(fired)},
                      {"output_memberships", std::move(heights)},
                      {"defuzz_resolution", p.defuzz_resolution},
                      {"inputs", std::move(inputs)},
                      {"clamped_inputs", p.clamped_inputs},
                      {"fuzzified", fuzzified_json(p.fuzzified, rb.inputs())},
                      {"output_curve", std::move(curve)}};
}

inline ordered_json no_rule_fired_json(const RuleBase& rb, const Fuzzified& degrees) {
  return ordered_json{{"status", "no_rule_fired"},
                      {"message", "no rule covers these inputs"},
                      {"fuzzified", fuzzified_json(degrees, rb.inputs())}};
}

inline ordered_json side_json(const RuleBase& rb, const SideResult& s) {
  return s.fired() ? prediction_json(rb, *s.prediction) : no_rule_fired_json(rb, s.degrees_if_unfired);
}

inline ordered_json metrics_json(const RuleBase& rb, const std::map<std::string, double>& m) {
  ordered_json out = ordered_json::object();
  for (const auto& v : rb.inputs())
    if (auto it = m.find(v.name()); it != m.end()) out[v.name()] = it->second;
  return out;
}

inline ordered_json effects_json(const std::vector<EffectEntry>& effects) {
  ordered_json out = ordered_json::array();
  for (const auto& e : effects)
    out.push_back(ordered_json{{"process", e.process}, {"metric", e.metric}, {"delta", e.delta}});
  return out;
}

inline ordered_json gap_report_json(const RuleBase& rb, const GapAnalysisReport& r) {
  return ordered_json{{"processes", r.processes},
                      {"baseline", metrics_json(rb, r.baseline)},
                      {"adjusted_metrics", metrics_json(rb, r.adjusted_metrics)},
                      {"applied_effects", effects_json(r.applied_effects)},
                      {"as_is", side_json(rb, r.as_is)},
                      {"to_be", side_json(rb, r.to_be)},
                      {"cost_delta", r.cost_delta ? ordered_json(*r.cost_delta) : ordered_json(nullptr)}};
}

inline ordered_json sweep_json(const RuleBase& rb, const std::vector<SweepRow>& rows) {
  ordered_json out = ordered_json::array();
  for (const auto& row : rows) {
    const auto& r = row.report;
    auto cost = [](const SideResult& s) { return s.fired() ? ordered_json(s.prediction->crisp) : ordered_json(nullptr); };
    out.push_back(ordered_json{{"processes", r.processes},
                               {"as_is_cost", cost(r.as_is)},
                               {"to_be_cost", cost(r.to_be)},
                               {"to_be_status", r.to_be.fired() ? "ok" : "no_rule_fired"},
                               {"adjusted_metrics", metrics_json(rb, r.adjusted_metrics)},
                               {"cost_delta", r.cost_delta ? ordered_json(*r.cost_delta) : ordered_json(nullptr)}});
  }
  return ordered_json{{"rows", std::move(out)}};
}

inline ordered_json effect_summary_json(const EffectSummary& s) {
  ordered_json out = ordered_json::array();
  for (const auto& e : s.effects)
    out.push_back(ordered_json{{"node", e.node}, {"aggregate", e.aggregate}, {"direction", to_string(e.direction)}});
  return ordered_json{{"effects", std::move(out)}};
}

}  // namespace fcmgap
