#pragma once

// Simulated task heap. Released objects sit in a pending-garbage set with
// their contents intact until gc_collect() runs; under the encrypt policy the
// collector overwrites each region with its one-time-key ciphertext before
// handing it back to the free list.

#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "lwc/otk.hpp"

namespace lwc {

enum class GcPolicy { kPlain, kEncrypt };
enum class AllocStrategy { kSequential, kRandomized };

std::string_view to_string(GcPolicy p);
std::string_view to_string(AllocStrategy s);
/// Throw InvalidArgument on unknown names.
GcPolicy parse_policy(std::string_view name);
AllocStrategy parse_strategy(std::string_view name);

using Handle = std::uint64_t;

inline constexpr std::size_t kMinHeapCapacity = 1024;
inline constexpr std::size_t kMaxTaskLabel = 64;

struct TaskObject {
  std::string label;
  Bytes payload;
};

struct Region {
  std::uint64_t address;
  std::uint64_t length;
  friend bool operator==(const Region&, const Region&) = default;
};

struct LiveObject {
  Region region;
  std::string label;
};

struct Allocation {
  Handle handle;
  std::uint64_t address;
};

enum class EventKind { kAlloc, kFree, kGc, kScan };
std::string_view to_string(EventKind k);

struct HeapEvent {
  std::uint64_t timestamp;
  EventKind kind;
  std::uint64_t address;
  std::uint64_t length;
  std::string label;  ///< alloc events only
};

struct HeapTrace {
  std::vector<HeapEvent> events;

  /// One JSON object per line: {"t","kind","address","length"[,"label"]}.
  std::string to_json_lines() const;
};

class HeapModel {
 public:
  /// Throws InvalidArgument if capacity < 1 KiB.
  HeapModel(std::size_t capacity, GcPolicy policy, AllocStrategy strategy, KeyMaterial key,
            std::uint64_t seed);

  /// Writes label || payload at the chosen address. Throws OutOfMemory when no
  /// free region fits and InvalidArgument for malformed labels.
  Allocation allocate(const TaskObject& task);

  /// Moves the object to pending garbage; contents stay readable.
  void release(Handle handle);

  /// Processes every pending region and returns how many there were.
  std::size_t gc_collect();

  /// Copy of the whole cell array; logged as a scan event.
  Bytes raw_scan();

  /// Number of start addresses at which an object of `length` octets fits.
  std::uint64_t feasible_addresses(std::uint64_t length) const;

  /// Reseeds only the allocation generator (nonces are unaffected).
  void reseed_allocator(std::uint64_t seed);

  /// Checks region disjointness and bounds; throws std::logic_error.
  void audit() const;
  void set_audit(bool enabled) { audit_ = enabled; }

  std::size_t capacity() const noexcept { return cells_.size(); }
  GcPolicy policy() const noexcept { return policy_; }
  AllocStrategy strategy() const noexcept { return strategy_; }
  const Bytes& cells() const noexcept { return cells_; }
  const std::map<Handle, LiveObject>& live() const noexcept { return live_; }
  std::vector<Region> free_regions() const;
  const std::vector<Region>& pending() const noexcept { return pending_; }
  const HeapTrace& trace() const noexcept { return trace_; }

 private:
  void record(EventKind kind, std::uint64_t address, std::uint64_t length, std::string label = {});
  void insert_free(Region r);
  void after_mutation() const;

  Bytes cells_;
  GcPolicy policy_;
  AllocStrategy strategy_;
  KeyMaterial key_;
  std::mt19937_64 alloc_rng_;
  NonceGenerator nonces_;
  std::map<std::uint64_t, std::uint64_t> free_;  // address -> length
  std::map<Handle, LiveObject> live_;
  std::vector<Region> pending_;
  HeapTrace trace_;
  Handle next_handle_ = 1;
  std::uint64_t clock_ = 0;
  bool audit_ = false;
};

/// Key used for scenario runs: 32 secret octets drawn from the seed, digest32 profile.
KeyMaterial scenario_key(std::uint64_t seed);

// ---- scenario files ---------------------------------------------------------

struct ScenarioOp {
  enum class Kind { kAlloc, kFree, kGc, kScan };
  Kind kind;
  std::string label;            ///< alloc
  std::uint64_t payload_len = 0;  ///< alloc
  Handle handle = 0;            ///< free; handles number allocations from 1
};

struct Scenario {
  std::size_t capacity;
  GcPolicy policy;
  AllocStrategy strategy;
  std::uint64_t seed;
  std::vector<ScenarioOp> ops;
};

/// Throws ScenarioFormat (with line number for syntax errors).
Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

/// Runs the ops against heap. Payload octets come from a generator seeded by
/// payload_seed, so identical inputs give identical cells.
void replay(HeapModel& heap, const Scenario& scenario, std::uint64_t payload_seed);

}  // namespace lwc
