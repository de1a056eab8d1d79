#include <cmath>

#include <gtest/gtest.h>
#include <json.hpp>

#include "lwc/adversary.hpp"
#include "lwc/error.hpp"

namespace {

using lwc::AllocStrategy;
using lwc::AttackConfig;
using lwc::AttackKind;
using lwc::GcPolicy;

lwc::Scenario small_scenario(AllocStrategy strategy, std::vector<std::string> labels) {
  lwc::Scenario sc{8192, GcPolicy::kPlain, strategy, 17, {}};
  lwc::Handle h = 0;
  for (const auto& l : labels) {
    sc.ops.push_back({lwc::ScenarioOp::Kind::kAlloc, l, 20, 0});
    sc.ops.push_back({lwc::ScenarioOp::Kind::kFree, "", 0, ++h});
    sc.ops.push_back({lwc::ScenarioOp::Kind::kGc, "", 0, 0});
  }
  return sc;
}

bool within_band(const lwc::AttackReport& r) {
  return std::abs(r.success_rate - r.chance_baseline) <=
         lwc::three_sigma(r.chance_baseline, r.trials);
}

TEST(Attack, ConfigValidation) {
  AttackConfig cfg{AttackKind::kNmao, 0, 1, 1};
  EXPECT_THROW(cfg.validate(), lwc::InvalidArgument);
  cfg.trials = 1;
  cfg.guesses_per_trial = 0;
  EXPECT_THROW(cfg.validate(), lwc::InvalidArgument);
  EXPECT_EQ(lwc::parse_attack_kind("brute-force-session"), AttackKind::kBruteForceSession);
  EXPECT_THROW(lwc::parse_attack_kind("dos"), lwc::InvalidArgument);
}

TEST(Nmao, SequentialIsFullyPredictable) {
  const auto reports = lwc::run_scenario(small_scenario(AllocStrategy::kSequential, {"A_ON", "B_ON"}),
                                         {AttackKind::kNmao, 500, 3, 1});
  EXPECT_EQ(reports.unprotected_run.success_rate, 1.0);
  EXPECT_FALSE(reports.unprotected_run.is_protected);
  EXPECT_TRUE(reports.protected_run.is_protected);
}

TEST(Nmao, RandomizedNearChance) {
  lwc::ScenarioOverrides ov;
  ov.strategy = AllocStrategy::kRandomized;
  for (std::uint64_t guesses : {1u, 500u}) {
    const auto r = lwc::run_scenario(small_scenario(AllocStrategy::kSequential, {"A_ON", "B_ON"}),
                                     {AttackKind::kNmao, 10000, 5, guesses}, ov);
    EXPECT_TRUE(within_band(r.protected_run))
        << r.protected_run.success_rate << " vs " << r.protected_run.chance_baseline;
    EXPECT_LE(r.protected_run.success_rate, r.unprotected_run.success_rate + 1e-12);
  }
}

TEST(Nmao, BaselineFromGeometry) {
  lwc::HeapModel heap(2048, GcPolicy::kPlain, AllocStrategy::kSequential, lwc::scenario_key(0), 0);
  heap.allocate({"X", lwc::Bytes(99)});
  const auto r = lwc::nmao_attack(heap, heap.trace(), {AttackKind::kNmao, 10, 0, 1});
  // One free region of 1948 octets, object of 100 octets.
  EXPECT_DOUBLE_EQ(r.chance_baseline, 1.0 / 1849.0);
}

TEST(Nmao, EmptyTraceRejected) {
  lwc::HeapModel heap(2048, GcPolicy::kPlain, AllocStrategy::kSequential, lwc::scenario_key(0), 0);
  EXPECT_THROW(lwc::nmao_attack(heap, heap.trace(), {AttackKind::kNmao, 10, 0, 1}),
               lwc::InvalidArgument);
}

TEST(Ltb, SeparatesPolicies) {
  const auto sc = small_scenario(AllocStrategy::kSequential, {"LIGHT_ON", "LIGHT_OFF", "FAN_ON", "FAN_OFF"});
  const auto r = lwc::run_scenario(sc, {AttackKind::kLtb, 10000, 11, 1});
  EXPECT_EQ(r.unprotected_run.success_rate, 1.0);
  EXPECT_DOUBLE_EQ(r.protected_run.chance_baseline, 0.25);
  EXPECT_TRUE(within_band(r.protected_run)) << r.protected_run.success_rate;
}

TEST(Ltb, SingleLabelRejected) {
  const auto sc = small_scenario(AllocStrategy::kSequential, {"ONLY", "ONLY"});
  EXPECT_THROW(lwc::run_scenario(sc, {AttackKind::kLtb, 10, 0, 1}), lwc::InvalidArgument);
}

TEST(Scenario, ZeroOpsAndMissingFile) {
  lwc::Scenario empty{8192, GcPolicy::kPlain, AllocStrategy::kSequential, 0, {}};
  EXPECT_THROW(lwc::run_scenario(empty, {AttackKind::kLtb, 10, 0, 1}), lwc::InvalidArgument);
  EXPECT_THROW(lwc::run_scenario(std::filesystem::path("/no/such.json"), {AttackKind::kLtb, 10, 0, 1}),
               lwc::ScenarioFormat);
}

TEST(Report, JsonRoundTripAndDeterminism) {
  const auto sc = small_scenario(AllocStrategy::kRandomized, {"A_ON", "B_ON", "C_ON"});
  const AttackConfig cfg{AttackKind::kBruteForceSession, 300, 21, 1};
  const auto x = lwc::run_scenario(sc, cfg);
  const auto y = lwc::run_scenario(sc, cfg);
  EXPECT_EQ(x.protected_run.to_json(), y.protected_run.to_json());
  EXPECT_EQ(x.unprotected_run.to_json(), y.unprotected_run.to_json());

  const auto j = nlohmann::json::parse(x.protected_run.to_json());
  for (const char* key : {"kind", "trials", "successes", "success_rate", "chance_baseline", "protected"}) {
    EXPECT_TRUE(j.contains(key)) << key;
  }
  const auto back = lwc::AttackReport::from_json(x.protected_run.to_json());
  EXPECT_EQ(back.to_json(), x.protected_run.to_json());
  EXPECT_GT(back.chance_baseline, 0.0);
  EXPECT_LE(back.chance_baseline, 1.0);
}

TEST(Sigma, Formula) { EXPECT_DOUBLE_EQ(lwc::three_sigma(0.25, 10000), 3.0 * std::sqrt(0.25 * 0.75 / 10000)); }

}  // namespace
