#include "fcmgap/scenario.hpp"

#include <gtest/gtest.h>

#include "fcmgap/itil.hpp"

using namespace fcmgap;
using namespace fcmgap::itil;

namespace {

std::map<std::string, double> baseline(double interrupt, double response, double po, double auth) {
  return {{kInterruptTime, interrupt}, {kResponseTime, response}, {kProcessOrientation, po}, {kAuthorizedChanges, auth}};
}

EffectTable change_table() {
  return {"t", "itil-processes", {{kChange, kAuthorizedChanges, 40}, {kChange, kProcessOrientation, 30}}};
}

}  // namespace

TEST(ApplyDeltas, ChangeRaisesAuthAndProcessOrientation) {
  const Frm frm = itil_service_support_frm();
  const RuleBase rb = cost_rule_base();
  Scenario s{baseline(720, 720, 20, 0), {kChange}, change_table()};
  auto adj = apply_process_deltas(s, frm, rb);
  EXPECT_DOUBLE_EQ(adj.metrics.at(kAuthorizedChanges), 40);
  EXPECT_DOUBLE_EQ(adj.metrics.at(kProcessOrientation), 50);
  EXPECT_DOUBLE_EQ(adj.metrics.at(kInterruptTime), 720);
  EXPECT_DOUBLE_EQ(adj.metrics.at(kResponseTime), 720);
  EXPECT_EQ(adj.applied.size(), 2u);
}

TEST(ApplyDeltas, OvershootIsClamped) {
  const Frm frm = itil_service_support_frm();
  Scenario s{baseline(720, 720, 20, 90), {kChange}, change_table()};
  EXPECT_DOUBLE_EQ(apply_process_deltas(s, frm, cost_rule_base()).metrics.at(kAuthorizedChanges), 100);
}

TEST(ApplyDeltas, DeltasSumAcrossProcessesBeforeClamping) {
  const Frm frm = itil_service_support_frm();
  Scenario s{baseline(720, 720, 20, 0), {kChange, kAssetConfig}, default_effect_table(frm)};
  auto adj = apply_process_deltas(s, frm, cost_rule_base());
  EXPECT_DOUBLE_EQ(adj.metrics.at(kAuthorizedChanges), 2 * kDefaultPercentDelta);
  EXPECT_DOUBLE_EQ(adj.metrics.at(kProcessOrientation), 20 + 2 * kDefaultPercentDelta);
}

TEST(ApplyDeltas, EmptyProcessSetIsIdentity) {
  const Frm frm = itil_service_support_frm();
  const auto b = baseline(500, 300, 40, 60);
  Scenario s{b, {}, default_effect_table(frm)};
  auto adj = apply_process_deltas(s, frm, cost_rule_base());
  EXPECT_EQ(adj.metrics, b);
  EXPECT_TRUE(adj.applied.empty());
}

TEST(ApplyDeltas, OnlySelectedProcessesAndNonzeroCells) {
  const Frm frm = itil_service_support_frm();
  Scenario s{baseline(720, 720, 50, 50), {kProblem}, default_effect_table(frm)};
  auto adj = apply_process_deltas(s, frm, cost_rule_base());
  for (const auto& e : adj.applied) {
    EXPECT_EQ(e.process, kProblem);
    EXPECT_NE(frm.at(e.process, e.metric), 0.0);
  }
  EXPECT_DOUBLE_EQ(adj.metrics.at(kAuthorizedChanges), 50);
  EXPECT_DOUBLE_EQ(adj.metrics.at(kResponseTime), 720 - kDefaultTimeDelta);
}

TEST(ScenarioValidation, Errors) {
  const Frm frm = itil_service_support_frm();
  const RuleBase rb = cost_rule_base();
  Scenario unknown{baseline(720, 720, 50, 50), {"Foo"}, change_table()};
  EXPECT_THROW(apply_process_deltas(unknown, frm, rb), UnknownName);

  EffectTable wrong_sign{"t", "itil-processes", {{kChange, kAuthorizedChanges, -40}}};
  EXPECT_FALSE(validate_effect_table(wrong_sign, frm).empty());
  Scenario conflict{baseline(720, 720, 50, 50), {kChange}, wrong_sign};
  EXPECT_THROW(apply_process_deltas(conflict, frm, rb), ValidationError);

  EffectTable dup{"t", "itil-processes", {{kChange, kAuthorizedChanges, 10}, {kChange, kAuthorizedChanges, 20}}};
  EXPECT_FALSE(validate_effect_table(dup, frm).empty());

  Scenario outside{baseline(2000, 720, 50, 50), {}, change_table()};
  EXPECT_THROW(apply_process_deltas(outside, frm, rb), ValidationError);

  auto partial = baseline(720, 720, 50, 50);
  partial.erase(kResponseTime);
  EXPECT_THROW(apply_process_deltas(Scenario{partial, {}, change_table()}, frm, rb), ValidationError);
}

TEST(Compare, EmptyProcessSetHasZeroDelta) {
  const Frm frm = itil_service_support_frm();
  Scenario s{baseline(360, 360, 50, 75), {}, default_effect_table(frm)};
  auto r = compare(s, frm, cost_rule_base());
  ASSERT_TRUE(r.cost_delta.has_value());
  EXPECT_EQ(*r.cost_delta, 0.0);
  EXPECT_EQ(r.as_is.prediction->crisp, r.to_be.prediction->crisp);
}

TEST(Compare, ChangeScenarioDoesNotRaiseCost) {
  const Frm frm = itil_service_support_frm();
  Scenario s{baseline(1260, 1260, 0, 0), {kChange}, default_effect_table(frm)};
  auto r = compare(s, frm, cost_rule_base());
  ASSERT_TRUE(r.cost_delta.has_value());
  EXPECT_LE(*r.cost_delta, 0.0);
  EXPECT_LT(*r.cost_delta, 0.0);
}

TEST(Compare, SaturatedBaselineIsUnchanged) {
  const Frm frm = itil_service_support_frm();
  const auto best = baseline(0, 0, 100, 100);
  Scenario s{best, {kIncident, kProblem, kChange, kAssetConfig, kServiceDesk}, default_effect_table(frm)};
  auto r = compare(s, frm, cost_rule_base());
  EXPECT_EQ(r.adjusted_metrics, best);
  ASSERT_TRUE(r.cost_delta.has_value());
  EXPECT_EQ(*r.cost_delta, 0.0);
}

TEST(Compare, UncoveredSideReportsDegrees) {
  const Frm frm = itil_service_support_frm();
  Scenario s{baseline(0, 1440, 50, 50), {}, default_effect_table(frm)};
  auto r = compare(s, frm, cost_rule_base());
  EXPECT_FALSE(r.as_is.fired());
  EXPECT_FALSE(r.cost_delta.has_value());
  EXPECT_FALSE(r.as_is.degrees_if_unfired.empty());
}

TEST(Sweep, AllSubsetsRankedDeterministically) {
  const Frm frm = itil_service_support_frm();
  const RuleBase rb = cost_rule_base();
  const auto b = baseline(1260, 1260, 0, 0);
  auto rows = sweep(b, default_effect_table(frm), frm, rb);
  ASSERT_EQ(rows.size(), 32u);

  std::set<std::uint32_t> masks;
  for (const auto& r : rows) masks.insert(r.mask);
  EXPECT_EQ(masks.size(), 32u);

  auto empty = std::find_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.mask == 0; });
  ASSERT_NE(empty, rows.end());
  ASSERT_TRUE(empty->report.cost_delta.has_value());
  EXPECT_EQ(*empty->report.cost_delta, 0.0);

  bool seen_missing = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& d = rows[i].report.cost_delta;
    if (!d) {
      seen_missing = true;
      continue;
    }
    EXPECT_FALSE(seen_missing) << "rows with a delta must come first";
    if (i > 0 && rows[i - 1].report.cost_delta) {
      EXPECT_LE(*rows[i - 1].report.cost_delta, *d);
    }
  }

  auto serial = sweep(b, default_effect_table(frm), frm, rb, {}, false);
  ASSERT_EQ(serial.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(serial[i].mask, rows[i].mask);
    EXPECT_EQ(serial[i].report.cost_delta, rows[i].report.cost_delta);
  }
}

TEST(Sweep, SingleProcessNeverRaisesCostOnCoveredBaselines) {
  const Frm frm = itil_service_support_frm();
  const RuleBase rb = cost_rule_base();
  const auto table = default_effect_table(frm);
  int checks = 0;
  for (double t1 = 0; t1 <= 1440; t1 += 360)
    for (double t2 = 0; t2 <= 1440; t2 += 360)
      for (double po = 0; po <= 100; po += 25)
        for (double au = 0; au <= 100; au += 25)
          for (const auto& p : frm.domain()) {
            auto r = compare(Scenario{baseline(t1, t2, po, au), {p}, table}, frm, rb);
            if (!r.cost_delta) continue;
            ++checks;
            EXPECT_LE(*r.cost_delta, 1e-9) << p << " at " << t1 << "," << t2 << "," << po << "," << au;
          }
  EXPECT_GT(checks, 0);
}
