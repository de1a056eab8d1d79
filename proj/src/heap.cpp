#include "lwc/heap.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lwc/error.hpp"

namespace lwc {

namespace {

constexpr std::uint64_t kNonceStream = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kKeyStream = 0xc2b2ae3d27d4eb4fULL;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioFormat("scenario: " + msg); }

bool overlaps(const Region& x, const Region& y) {
  return x.address < y.address + y.length && y.address < x.address + x.length;
}

}  // namespace

std::string_view to_string(GcPolicy p) { return p == GcPolicy::kPlain ? "plain" : "encrypt"; }

std::string_view to_string(AllocStrategy s) {
  return s == AllocStrategy::kSequential ? "sequential" : "randomized";
}

GcPolicy parse_policy(std::string_view name) {
  if (name == "plain") return GcPolicy::kPlain;
  if (name == "encrypt") return GcPolicy::kEncrypt;
  throw InvalidArgument("unknown policy '" + std::string(name) + "' (plain|encrypt)");
}

AllocStrategy parse_strategy(std::string_view name) {
  if (name == "sequential") return AllocStrategy::kSequential;
  if (name == "randomized") return AllocStrategy::kRandomized;
  throw InvalidArgument("unknown strategy '" + std::string(name) + "' (sequential|randomized)");
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::kAlloc: return "alloc";
    case EventKind::kFree: return "free";
    case EventKind::kGc: return "gc";
    case EventKind::kScan: return "scan";
  }
  return "?";
}

std::string HeapTrace::to_json_lines() const {
  std::string out;
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["t"] = e.timestamp;
    j["kind"] = to_string(e.kind);
    j["address"] = e.address;
    j["length"] = e.length;
    if (e.kind == EventKind::kAlloc) j["label"] = e.label;
    out += j.dump();
    out += '\n';
  }
  return out;
}

HeapModel::HeapModel(std::size_t capacity, GcPolicy policy, AllocStrategy strategy,
                     KeyMaterial key, std::uint64_t seed)
    : cells_(),
      policy_(policy),
      strategy_(strategy),
      key_(std::move(key)),
      alloc_rng_(seed),
      nonces_(seed ^ kNonceStream) {
  if (capacity < kMinHeapCapacity) {
    throw InvalidArgument("heap capacity " + std::to_string(capacity) + " below 1 KiB");
  }
  cells_.assign(capacity, 0);
  free_.emplace(0, capacity);
}

Allocation HeapModel::allocate(const TaskObject& task) {
  if (task.label.empty() || task.label.size() > kMaxTaskLabel) {
    throw InvalidArgument("task label must be 1..64 octets");
  }
  const std::uint64_t need = task.label.size() + task.payload.size();

  auto chosen = free_.end();
  std::uint64_t address = 0;
  if (strategy_ == AllocStrategy::kSequential) {
    chosen = std::find_if(free_.begin(), free_.end(),
                          [&](const auto& r) { return r.second >= need; });
    if (chosen != free_.end()) address = chosen->first;
  } else {
    const auto total = feasible_addresses(need);
    if (total > 0) {
      auto pick = std::uniform_int_distribution<std::uint64_t>(0, total - 1)(alloc_rng_);
      for (auto it = free_.begin(); it != free_.end(); ++it) {
        if (it->second < need) continue;
        const auto slots = it->second - need + 1;
        if (pick < slots) {
          chosen = it;
          address = it->first + pick;
          break;
        }
        pick -= slots;
      }
    }
  }
  if (chosen == free_.end()) {
    throw OutOfMemory("no free region of " + std::to_string(need) + " octets");
  }

  const Region region{chosen->first, chosen->second};
  free_.erase(chosen);
  if (address > region.address) free_.emplace(region.address, address - region.address);
  const auto end = address + need;
  if (end < region.address + region.length) free_.emplace(end, region.address + region.length - end);

  auto out = cells_.begin() + static_cast<std::ptrdiff_t>(address);
  out = std::copy(task.label.begin(), task.label.end(), out);
  std::copy(task.payload.begin(), task.payload.end(), out);

  const Handle h = next_handle_++;
  live_.emplace(h, LiveObject{{address, need}, task.label});
  record(EventKind::kAlloc, address, need, task.label);
  after_mutation();
  return {h, address};
}

void HeapModel::release(Handle handle) {
  const auto it = live_.find(handle);
  if (it == live_.end()) throw InvalidHandle("handle " + std::to_string(handle) + " is not live");
  pending_.push_back(it->second.region);
  record(EventKind::kFree, it->second.region.address, it->second.region.length);
  live_.erase(it);
  after_mutation();
}

std::size_t HeapModel::gc_collect() {
  const auto count = pending_.size();
  for (const auto& r : pending_) {
    if (policy_ == GcPolicy::kEncrypt) {
      const auto first = cells_.begin() + static_cast<std::ptrdiff_t>(r.address);
      const std::span<const std::uint8_t> plain(&*first, r.length);
      const auto env = encrypt(plain, key_, nonces_);
      std::copy(env.body.begin(), env.body.end(), first);
    }
    insert_free(r);
    record(EventKind::kGc, r.address, r.length);
  }
  pending_.clear();
  after_mutation();
  return count;
}

Bytes HeapModel::raw_scan() {
  record(EventKind::kScan, 0, cells_.size());
  return cells_;
}

std::uint64_t HeapModel::feasible_addresses(std::uint64_t length) const {
  std::uint64_t total = 0;
  for (const auto& [addr, len] : free_) {
    if (len >= length) total += len - length + 1;
  }
  return total;
}

void HeapModel::reseed_allocator(std::uint64_t seed) { alloc_rng_.seed(seed); }

std::vector<Region> HeapModel::free_regions() const {
  std::vector<Region> out;
  out.reserve(free_.size());
  for (const auto& [addr, len] : free_) out.push_back({addr, len});
  return out;
}

void HeapModel::audit() const {
  std::vector<Region> all;
  for (const auto& [h, obj] : live_) all.push_back(obj.region);
  all.insert(all.end(), pending_.begin(), pending_.end());
  for (const auto& [addr, len] : free_) all.push_back({addr, len});

  std::uint64_t sum = 0;
  for (const auto& r : all) {
    if (r.length == 0 || r.address + r.length > cells_.size()) {
      throw std::logic_error("heap region out of bounds at " + std::to_string(r.address));
    }
    sum += r.length;
  }
  std::sort(all.begin(), all.end(),
            [](const Region& x, const Region& y) { return x.address < y.address; });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (overlaps(all[i - 1], all[i])) {
      throw std::logic_error("heap regions overlap at " + std::to_string(all[i].address));
    }
  }
  if (sum > cells_.size()) throw std::logic_error("heap regions exceed capacity");
}

void HeapModel::record(EventKind kind, std::uint64_t address, std::uint64_t length,
                       std::string label) {
  trace_.events.push_back({clock_++, kind, address, length, std::move(label)});
}

void HeapModel::insert_free(Region r) {
  auto next = free_.lower_bound(r.address);
  if (next != free_.begin()) {
    auto prev = std::prev(next);
    if (prev->first + prev->second == r.address) {
      r.address = prev->first;
      r.length += prev->second;
      free_.erase(prev);
    }
  }
  if (next != free_.end() && r.address + r.length == next->first) {
    r.length += next->second;
    free_.erase(next);
  }
  free_.emplace(r.address, r.length);
}

void HeapModel::after_mutation() const {
  if (audit_) audit();
}

KeyMaterial scenario_key(std::uint64_t seed) {
  std::mt19937_64 gen(seed ^ kKeyStream);
  Bytes secret(32);
  for (auto& b : secret) b = static_cast<std::uint8_t>(gen());
  return KeyMaterial(std::move(secret), params_by_id("digest32"));
}

// ---- scenarios ----------------------------------------------------------------

Scenario parse_scenario(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte, json_text.size());
    const auto line = 1 + std::count(json_text.begin(), json_text.begin() + upto, '\n');
    throw ScenarioFormat("scenario parse error at line " + std::to_string(line) + ": " + e.what());
  }

  if (!doc.is_object()) fail("top level must be an object");
  for (const char* key : {"capacity", "policy", "strategy", "seed", "ops"}) {
    if (!doc.contains(key)) fail(std::string("missing field '") + key + "'");
  }
  if (!doc["capacity"].is_number_unsigned()) fail("capacity must be a non-negative integer");
  if (!doc["seed"].is_number_unsigned()) fail("seed must be a non-negative integer");
  if (!doc["policy"].is_string() || !doc["strategy"].is_string()) {
    fail("policy and strategy must be strings");
  }
  if (!doc["ops"].is_array()) fail("ops must be an array");

  Scenario sc;
  sc.capacity = doc["capacity"].get<std::size_t>();
  sc.seed = doc["seed"].get<std::uint64_t>();
  try {
    sc.policy = parse_policy(doc["policy"].get<std::string>());
    sc.strategy = parse_strategy(doc["strategy"].get<std::string>());
  } catch (const InvalidArgument& e) {
    fail(e.what());
  }

  std::size_t index = 0;
  for (const auto& op : doc["ops"]) {
    const auto where = "op #" + std::to_string(index++) + ": ";
    if (!op.is_object() || !op.contains("op") || !op["op"].is_string()) {
      fail(where + "needs a string field 'op'");
    }
    const auto name = op["op"].get<std::string>();
    ScenarioOp parsed{};
    if (name == "alloc") {
      parsed.kind = ScenarioOp::Kind::kAlloc;
      if (!op.contains("label") || !op["label"].is_string()) fail(where + "alloc needs 'label'");
      parsed.label = op["label"].get<std::string>();
      if (op.contains("payload_len")) {
        if (!op["payload_len"].is_number_unsigned()) fail(where + "payload_len must be unsigned");
        parsed.payload_len = op["payload_len"].get<std::uint64_t>();
      }
    } else if (name == "free") {
      parsed.kind = ScenarioOp::Kind::kFree;
      if (!op.contains("handle") || !op["handle"].is_number_unsigned()) {
        fail(where + "free needs an unsigned 'handle'");
      }
      parsed.handle = op["handle"].get<Handle>();
    } else if (name == "gc") {
      parsed.kind = ScenarioOp::Kind::kGc;
    } else if (name == "scan") {
      parsed.kind = ScenarioOp::Kind::kScan;
    } else {
      fail(where + "unknown op '" + name + "'");
    }
    sc.ops.push_back(std::move(parsed));
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioFormat("cannot open scenario file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void replay(HeapModel& heap, const Scenario& scenario, std::uint64_t payload_seed) {
  std::mt19937_64 payload_gen(payload_seed);
  for (const auto& op : scenario.ops) {
    switch (op.kind) {
      case ScenarioOp::Kind::kAlloc: {
        Bytes payload(op.payload_len);
        for (auto& b : payload) b = static_cast<std::uint8_t>(payload_gen());
        heap.allocate({op.label, std::move(payload)});
        break;
      }
      case ScenarioOp::Kind::kFree: heap.release(op.handle); break;
      case ScenarioOp::Kind::kGc: heap.gc_collect(); break;
      case ScenarioOp::Kind::kScan: heap.raw_scan(); break;
    }
  }
}

}  // namespace lwc
