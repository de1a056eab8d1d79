#pragma once

// Attack games against the simulated heap.
//
// NMAO: the attacker rebuilds the free-list geometry from the observed trace
// and guesses where the victim's next task object will land. The first guess
// is the lowest-address fit; further guesses are distinct feasible addresses
// drawn at random.
//
// LTB: after each task execution (allocate, release, collect) the attacker
// snapshots the heap and stores the region content as that label's exemplar.
// Held-out executions are then classified by longest common prefix against
// the exemplars, ties broken at random.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "lwc/heap.hpp"

namespace lwc {

enum class AttackKind { kNmao, kLtb, kBruteForceSession };

std::string_view to_string(AttackKind k);
AttackKind parse_attack_kind(std::string_view name);

struct AttackConfig {
  AttackKind kind = AttackKind::kLtb;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  std::uint64_t guesses_per_trial = 1;

  void validate() const;
};

struct AttackReport {
  AttackKind kind;
  std::uint64_t trials;
  std::uint64_t successes;
  double success_rate;
  double chance_baseline;
  bool is_protected;

  /// {kind, trials, successes, success_rate, chance_baseline, protected}
  std::string to_json() const;
  static AttackReport from_json(std::string_view text);
};

struct TaskExecution {
  std::string label;
  std::uint64_t payload_len = 0;
};

/// Three-sigma binomial band half-width for rate p over n trials.
double three_sigma(double p, std::uint64_t n);

AttackReport nmao_attack(const HeapModel& heap, const HeapTrace& trace, const AttackConfig& cfg);

AttackReport ltb_attack(const HeapModel& heap, std::span<const TaskExecution> executions,
                        const AttackConfig& cfg);

struct ScenarioReports {
  AttackReport protected_run;
  AttackReport unprotected_run;
};

struct ScenarioOverrides {
  std::optional<AllocStrategy> strategy;
};

/// Replays the scenario once with the plain policy and once with the encrypt
/// policy (same seed, same ops) and attacks both heaps.
ScenarioReports run_scenario(const Scenario& scenario, const AttackConfig& cfg,
                             const ScenarioOverrides& overrides = {});
ScenarioReports run_scenario(const std::filesystem::path& path, const AttackConfig& cfg,
                             const ScenarioOverrides& overrides = {});

/// Task executions implied by a scenario: its alloc ops in order.
std::vector<TaskExecution> executions_of(const Scenario& scenario);

}  // namespace lwc
