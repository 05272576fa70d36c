#pragma once

// As-is / to-be gap analysis: shift baseline metrics by the effects of the
// selected processes, then predict cost on both sides.

#include <algorithm>
#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fcmgap/error.hpp"
#include "fcmgap/frm.hpp"
#include "fcmgap/inference.hpp"

namespace fcmgap {

struct EffectEntry {
  std::string process;
  std::string metric;
  double delta = 0.0;  // percentage points or minutes/day, in the metric's units

  friend bool operator==(const EffectEntry&, const EffectEntry&) = default;
};

struct EffectTable {
  std::string name;
  std::string frm;  // name of the relational map the entries refer to
  std::vector<EffectEntry> entries;

  friend bool operator==(const EffectTable&, const EffectTable&) = default;
};

/// Errors for entries naming unknown nodes or contradicting the relation sign.
inline std::vector<std::string> validate_effect_table(const EffectTable& table, const Frm& frm) {
  std::vector<std::string> errors;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < table.entries.size(); ++i) {
    const auto& e = table.entries[i];
    const std::string where = "effect table " + table.name + " entry " + std::to_string(i + 1);
    if (!frm.has_domain(e.process)) {
      errors.push_back(where + ": unknown process '" + e.process + "'");
      continue;
    }
    if (!frm.has_range(e.metric)) {
      errors.push_back(where + ": unknown metric '" + e.metric + "'");
      continue;
    }
    if (!seen.insert({e.process, e.metric}).second)
      errors.push_back(where + ": duplicate cell (" + e.process + ", " + e.metric + ")");
    const double rel = frm.at(e.process, e.metric);
    if (rel != 0.0 && e.delta != 0.0 && (rel > 0.0) != (e.delta > 0.0))
      errors.push_back(where + ": delta sign contradicts relation sign for (" + e.process + ", " + e.metric + ")");
  }
  return errors;
}

struct Scenario {
  std::map<std::string, double> baseline;  // metric -> crisp value
  std::vector<std::string> processes;
  EffectTable effects;
};

struct AdjustedMetrics {
  std::map<std::string, double> metrics;
  std::vector<EffectEntry> applied;
};

/// Checks process names, sign agreement, and that the baseline covers every
/// rule-base input within its range.
inline void validate_scenario(const Scenario& s, const Frm& frm, const RuleBase& rb) {
  for (const auto& p : s.processes)
    if (!frm.has_domain(p)) throw UnknownName("process", p, frm.domain());
  if (auto errs = validate_effect_table(s.effects, frm); !errs.empty()) throw ValidationError(errs.front());
  for (const auto& v : rb.inputs()) {
    auto it = s.baseline.find(v.name());
    if (it == s.baseline.end()) throw ValidationError("baseline lacks metric '" + v.name() + "'");
    if (!v.contains(it->second))
      throw ValidationError("baseline " + v.name() + " = " + std::to_string(it->second) + " outside [" +
                            std::to_string(v.lo()) + ", " + std::to_string(v.hi()) + "]");
  }
  for (const auto& [name, value] : s.baseline)
    if (!rb.find_input(name)) throw UnknownName("metric", name, rb.input_names());
}

/// baseline + sum of deltas of the selected processes (nonzero relation cells
/// only), clamped to each metric's range. Deltas sum before clamping.
inline AdjustedMetrics apply_process_deltas(const Scenario& s, const Frm& frm, const RuleBase& rb) {
  validate_scenario(s, frm, rb);
  std::set<std::string> selected(s.processes.begin(), s.processes.end());

  AdjustedMetrics out;
  std::map<std::string, double> shift;
  for (const auto& e : s.effects.entries) {
    if (!selected.count(e.process) || e.delta == 0.0) continue;
    if (frm.at(e.process, e.metric) == 0.0) continue;
    if (!s.baseline.count(e.metric)) continue;
    shift[e.metric] += e.delta;
    out.applied.push_back(e);
  }
  for (const auto& [name, value] : s.baseline) {
    const auto* var = rb.find_input(name);
    auto it = shift.find(name);
    out.metrics[name] = it == shift.end() ? value : var->clamp(value + it->second);
  }
  return out;
}

/// One side of a comparison: either a prediction or the no-coverage outcome.
struct SideResult {
  std::optional<CostPrediction> prediction;
  Fuzzified degrees_if_unfired;

  bool fired() const noexcept { return prediction.has_value(); }
};

inline SideResult evaluate_side(const RuleBase& rb, const std::map<std::string, double>& metrics,
                                const InferenceSettings& settings) {
  SideResult r;
  try {
    r.prediction = predict_cost(rb, metrics, settings);
  } catch (const NoRuleFired& e) {
    r.degrees_if_unfired = e.degrees();
  }
  return r;
}

struct GapAnalysisReport {
  std::vector<std::string> processes;
  std::map<std::string, double> baseline;
  SideResult as_is;
  SideResult to_be;
  std::map<std::string, double> adjusted_metrics;
  std::vector<EffectEntry> applied_effects;
  std::optional<double> cost_delta;  // to_be - as_is, when both sides fired
};

inline GapAnalysisReport compare(const Scenario& s, const Frm& frm, const RuleBase& rb,
                                 const InferenceSettings& settings = {}) {
  auto adjusted = apply_process_deltas(s, frm, rb);
  GapAnalysisReport report;
  report.processes = s.processes;
  report.baseline = s.baseline;
  report.as_is = evaluate_side(rb, s.baseline, settings);
  report.to_be = evaluate_side(rb, adjusted.metrics, settings);
  report.adjusted_metrics = std::move(adjusted.metrics);
  report.applied_effects = std::move(adjusted.applied);
  if (report.as_is.fired() && report.to_be.fired())
    report.cost_delta = report.to_be.prediction->crisp - report.as_is.prediction->crisp;
  return report;
}

struct SweepRow {
  std::uint32_t mask = 0;  // bit i set = domain node i selected
  GapAnalysisReport report;
};

/// Every subset of the relational map's domain, ranked by cost delta
/// (ascending; rows without a delta last; ties by mask). Evaluations run in
/// parallel when `parallel` is set; ordering does not depend on it.
inline std::vector<SweepRow> sweep(const std::map<std::string, double>& baseline, const EffectTable& effects,
                                   const Frm& frm, const RuleBase& rb, const InferenceSettings& settings = {},
                                   bool parallel = true) {
  const std::size_t n = frm.domain().size();
  if (n > 20) throw ValidationError("sweep supports at most 20 processes");
  const std::uint32_t count = std::uint32_t{1} << n;

  Scenario base{baseline, {}, effects};
  validate_scenario(base, frm, rb);

  auto run = [&](std::uint32_t mask) {
    Scenario s = base;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint32_t{1} << i)) s.processes.push_back(frm.domain()[i]);
    return SweepRow{mask, compare(s, frm, rb, settings)};
  };

  std::vector<SweepRow> rows;
  rows.reserve(count);
  if (parallel) {
    std::vector<std::future<SweepRow>> jobs;
    jobs.reserve(count);
    for (std::uint32_t m = 0; m < count; ++m) jobs.push_back(std::async(std::launch::async, run, m));
    for (auto& j : jobs) rows.push_back(j.get());
  } else {
    for (std::uint32_t m = 0; m < count; ++m) rows.push_back(run(m));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    const auto& da = a.report.cost_delta;
    const auto& db = b.report.cost_delta;
    if (da.has_value() != db.has_value()) return da.has_value();
    if (da && *da != *db) return *da < *db;
    return a.mask < b.mask;
  });
  return rows;
}

namespace itil {

inline constexpr double kDefaultTimeDelta = 180.0;    // minutes/day per improving process
inline constexpr double kDefaultPercentDelta = 25.0;  // percentage points per improving process

/// Placeholder magnitudes for every nonzero cell of the relation whose metric
/// is a fuzzy input: 180 min/day on time metrics, 25 points on percentages,
/// signed like the relation.
inline EffectTable default_effect_table(const Frm& frm, std::string frm_name = "itil-processes") {
  EffectTable t{"default", std::move(frm_name), {}};
  for (std::size_t i = 0; i < frm.domain().size(); ++i) {
    for (std::size_t j = 0; j < frm.range().size(); ++j) {
      const double rel = frm.relation()(i, j);
      const auto& metric = frm.range()[j];
      if (rel == 0.0 || metric == kRecording) continue;
      const double magnitude =
          (metric == kResponseTime || metric == kInterruptTime) ? kDefaultTimeDelta : kDefaultPercentDelta;
      t.entries.push_back({frm.domain()[i], metric, rel > 0.0 ? magnitude : -magnitude});
    }
  }
  return t;
}

}  // namespace itil

}  // namespace fcmgap
