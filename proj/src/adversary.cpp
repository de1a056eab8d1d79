#include "lwc/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_set>

#include <json.hpp>

#include "lwc/error.hpp"

namespace lwc {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream));
}

// Free-list geometry as seen by an observer of the trace.
class ObservedFreeList {
 public:
  ObservedFreeList(std::uint64_t capacity, const HeapTrace& trace) {
    free_.emplace(0, capacity);
    for (const auto& e : trace.events) {
      switch (e.kind) {
        case EventKind::kAlloc: carve(e.address, e.length); break;
        case EventKind::kGc: give_back(e.address, e.length); break;
        case EventKind::kFree:
        case EventKind::kScan: break;
      }
    }
  }

  std::uint64_t feasible(std::uint64_t length) const {
    std::uint64_t total = 0;
    for (const auto& [addr, len] : free_) {
      if (len >= length) total += len - length + 1;
    }
    return total;
  }

  // index-th feasible start address in ascending order.
  std::uint64_t address_at(std::uint64_t index, std::uint64_t length) const {
    for (const auto& [addr, len] : free_) {
      if (len < length) continue;
      const auto slots = len - length + 1;
      if (index < slots) return addr + index;
      index -= slots;
    }
    throw std::logic_error("feasible address index out of range");
  }

 private:
  void carve(std::uint64_t address, std::uint64_t length) {
    auto it = free_.upper_bound(address);
    if (it == free_.begin()) throw InvalidArgument("trace allocates outside the free list");
    --it;
    const auto start = it->first;
    const auto end = it->first + it->second;
    if (address + length > end) throw InvalidArgument("trace allocates outside the free list");
    free_.erase(it);
    if (address > start) free_.emplace(start, address - start);
    if (address + length < end) free_.emplace(address + length, end - address - length);
  }

  void give_back(std::uint64_t address, std::uint64_t length) {
    auto next = free_.lower_bound(address);
    if (next != free_.begin()) {
      auto prev = std::prev(next);
      if (prev->first + prev->second == address) {
        address = prev->first;
        length += prev->second;
        free_.erase(prev);
      }
    }
    if (next != free_.end() && address + length == next->first) {
      length += next->second;
      free_.erase(next);
    }
    free_.emplace(address, length);
  }

  std::map<std::uint64_t, std::uint64_t> free_;
};

std::size_t common_prefix(std::span<const std::uint8_t> x, std::span<const std::uint8_t> y) {
  const auto n = std::min(x.size(), y.size());
  std::size_t i = 0;
  while (i < n && x[i] == y[i]) ++i;
  return i;
}

AttackReport make_report(AttackKind kind, std::uint64_t trials, std::uint64_t successes,
                         double baseline, bool is_protected) {
  return {kind, trials, successes, static_cast<double>(successes) / static_cast<double>(trials),
          baseline, is_protected};
}

}  // namespace

std::string_view to_string(AttackKind k) {
  switch (k) {
    case AttackKind::kNmao: return "nmao";
    case AttackKind::kLtb: return "ltb";
    case AttackKind::kBruteForceSession: return "brute-force-session";
  }
  return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
  if (name == "nmao") return AttackKind::kNmao;
  if (name == "ltb") return AttackKind::kLtb;
  if (name == "brute-force-session") return AttackKind::kBruteForceSession;
  throw InvalidArgument("unknown attack kind '" + std::string(name) + "'");
}

void AttackConfig::validate() const {
  if (trials < 1) throw InvalidArgument("attack trials must be >= 1");
  if (guesses_per_trial < 1) throw InvalidArgument("guesses_per_trial must be >= 1");
}

std::string AttackReport::to_json() const {
  nlohmann::ordered_json j;
  j["kind"] = to_string(kind);
  j["trials"] = trials;
  j["successes"] = successes;
  j["success_rate"] = success_rate;
  j["chance_baseline"] = chance_baseline;
  j["protected"] = is_protected;
  return j.dump();
}

AttackReport AttackReport::from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  return {parse_attack_kind(j.at("kind").get<std::string>()),
          j.at("trials").get<std::uint64_t>(),
          j.at("successes").get<std::uint64_t>(),
          j.at("success_rate").get<double>(),
          j.at("chance_baseline").get<double>(),
          j.at("protected").get<bool>()};
}

double three_sigma(double p, std::uint64_t n) {
  return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

AttackReport nmao_attack(const HeapModel& heap, const HeapTrace& trace, const AttackConfig& cfg) {
  cfg.validate();
  const auto last_alloc = std::find_if(trace.events.rbegin(), trace.events.rend(), [](const auto& e) {
    return e.kind == EventKind::kAlloc;
  });
  if (last_alloc == trace.events.rend()) {
    throw InvalidArgument("nmao_attack: trace has no allocations to learn from");
  }
  const auto length = last_alloc->length;
  const auto& label = last_alloc->label;

  const ObservedFreeList observed(heap.capacity(), trace);
  const auto feasible = observed.feasible(length);
  if (feasible == 0) throw InvalidArgument("nmao_attack: no room for another task object");
  const auto guesses = std::min(cfg.guesses_per_trial, feasible);

  std::mt19937_64 attacker(mix(cfg.seed, 1));
  std::uint64_t successes = 0;
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    // Index 0 is the lowest-address fit; the rest are distinct random picks.
    std::unordered_set<std::uint64_t> picks{0};
    std::uniform_int_distribution<std::uint64_t> dist(0, feasible - 1);
    while (picks.size() < guesses) picks.insert(dist(attacker));

    HeapModel victim = heap;
    victim.reseed_allocator(mix(cfg.seed, 1000 + t));
    const auto placed =
        victim.allocate({label, Bytes(length - label.size(), 0)}).address;
    for (auto idx : picks) {
      if (observed.address_at(idx, length) == placed) {
        ++successes;
        break;
      }
    }
  }
  const double baseline = static_cast<double>(guesses) / static_cast<double>(feasible);
  return make_report(cfg.kind, cfg.trials, successes, baseline,
                     heap.policy() == GcPolicy::kEncrypt);
}

AttackReport ltb_attack(const HeapModel& heap, std::span<const TaskExecution> executions,
                        const AttackConfig& cfg) {
  cfg.validate();
  std::vector<std::string> labels;
  std::map<std::string, std::uint64_t> payload_len;
  for (const auto& e : executions) {
    if (payload_len.emplace(e.label, e.payload_len).second) labels.push_back(e.label);
  }
  if (labels.size() < 2) throw InvalidArgument("ltb_attack: need at least 2 distinct task labels");

  HeapModel h = heap;
  std::mt19937_64 rng(mix(cfg.seed, 2));
  auto execute = [&](const std::string& label, std::uint64_t len) {
    Bytes payload(len);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    const auto alloc = h.allocate({label, std::move(payload)});
    h.release(alloc.handle);
    h.gc_collect();
    const auto snapshot = h.raw_scan();
    const auto first = snapshot.begin() + static_cast<std::ptrdiff_t>(alloc.address);
    return Bytes(first, first + static_cast<std::ptrdiff_t>(label.size() + len));
  };

  std::map<std::string, Bytes> exemplar;
  for (const auto& e : executions) exemplar[e.label] = execute(e.label, e.payload_len);

  const auto guesses = std::min<std::uint64_t>(cfg.guesses_per_trial, labels.size());
  std::uniform_int_distribution<std::size_t> pick_label(0, labels.size() - 1);
  std::uint64_t successes = 0;
  std::vector<std::pair<std::size_t, std::uint64_t>> ranked(labels.size());
  for (std::uint64_t t = 0; t < cfg.trials; ++t) {
    const auto truth = pick_label(rng);
    const auto observed = execute(labels[truth], payload_len[labels[truth]]);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ranked[i] = {common_prefix(observed, exemplar[labels[i]]), rng()};
    }
    std::vector<std::size_t> order(labels.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
      if (ranked[x].first != ranked[y].first) return ranked[x].first > ranked[y].first;
      return ranked[x].second < ranked[y].second;
    });
    if (std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(guesses), truth) !=
        order.begin() + static_cast<std::ptrdiff_t>(guesses)) {
      ++successes;
    }
  }
  const double baseline = static_cast<double>(guesses) / static_cast<double>(labels.size());
  return make_report(cfg.kind, cfg.trials, successes, baseline,
                     heap.policy() == GcPolicy::kEncrypt);
}

std::vector<TaskExecution> executions_of(const Scenario& scenario) {
  std::vector<TaskExecution> out;
  for (const auto& op : scenario.ops) {
    if (op.kind == ScenarioOp::Kind::kAlloc) out.push_back({op.label, op.payload_len});
  }
  return out;
}

ScenarioReports run_scenario(const Scenario& scenario, const AttackConfig& cfg,
                             const ScenarioOverrides& overrides) {
  cfg.validate();
  if (scenario.ops.empty()) throw InvalidArgument("scenario has no operations");
  const auto strategy = overrides.strategy.value_or(scenario.strategy);

  auto attack = [&](GcPolicy policy) {
    HeapModel heap(scenario.capacity, policy, strategy, scenario_key(scenario.seed), scenario.seed);
    replay(heap, scenario, scenario.seed);
    if (cfg.kind == AttackKind::kNmao) return nmao_attack(heap, heap.trace(), cfg);
    const auto execs = executions_of(scenario);
    return ltb_attack(heap, execs, cfg);
  };
  auto unprotected = attack(GcPolicy::kPlain);
  auto protected_run = attack(GcPolicy::kEncrypt);
  return {protected_run, unprotected};
}

ScenarioReports run_scenario(const std::filesystem::path& path, const AttackConfig& cfg,
                             const ScenarioOverrides& overrides) {
  return run_scenario(load_scenario(path), cfg, overrides);
}

}  // namespace lwc
