#include "lwc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "lwc/adversary.hpp"
#include "lwc/bench.hpp"
#include "lwc/chf.hpp"
#include "lwc/error.hpp"
#include "lwc/heap.hpp"
#include "lwc/otk.hpp"

namespace lwc::cli {

namespace {

const char* const kCommandList = "commands: hash, encrypt, decrypt, simulate, attack, bench";

std::string command_name(Command c) {
  switch (c) {
    case Command::kHash: return "hash";
    case Command::kEncrypt: return "encrypt";
    case Command::kDecrypt: return "decrypt";
    case Command::kSimulate: return "simulate";
    case Command::kAttack: return "attack";
    case Command::kBench: return "bench";
  }
  return "?";
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (text.empty() || text[0] == '-' || text[0] == '+') throw std::invalid_argument(text);
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw UsageError(what + " must be an unsigned integer, got '" + text + "'",
                     "pass a decimal value such as 7");
  }
  return v;
}

std::vector<std::uint64_t> parse_sizes(const std::string& text) {
  std::vector<std::uint64_t> sizes;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) sizes.push_back(parse_u64(item, "--sizes entry"));
  if (sizes.empty()) throw UsageError("--sizes is empty", "example: --sizes 128,512");
  for (auto kb : sizes) {
    if (kb == 0) throw UsageError("--sizes entries must be >= 1", "example: --sizes 128,512");
  }
  return sizes;
}

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Bytes read_input(const std::string& path, std::istream& in) {
  std::string data;
  if (path == "-") {
    data = read_all(in);
  } else {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw InvalidArgument("cannot open input '" + path + "'");
    data = read_all(file);
  }
  return Bytes(data.begin(), data.end());
}

void write_output(const std::string& path, std::ostream& out, std::string_view data) {
  if (path == "-") {
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidArgument("cannot open output '" + path + "'");
  file.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!file) throw InvalidArgument("write to '" + path + "' failed");
}

std::string as_text(const Bytes& b) { return std::string(b.begin(), b.end()); }

const std::string* find(const CommandPlan& plan, const std::string& key) {
  const auto it = plan.options.find(key);
  return it == plan.options.end() ? nullptr : &it->second;
}

std::uint64_t seed_or(const CommandPlan& plan, std::uint64_t fallback) {
  const auto* s = find(plan, "seed");
  return s ? std::stoull(*s) : fallback;
}

std::filesystem::path resolve_scenario(const std::string& name) {
  const std::filesystem::path given(name);
  if (std::filesystem::exists(given)) return given;
  const auto bundled = std::filesystem::path(LWC_SCENARIO_DIR) / given;
  if (given.is_relative() && std::filesystem::exists(bundled)) return bundled;
  return given;
}

KeyMaterial load_key(const CommandPlan& plan, std::istream& in) {
  Bytes secret;
  if (const auto* hex = find(plan, "key")) {
    secret = from_hex(*hex);
  } else {
    const auto& path = plan.options.at("key-file");
    if (path == "-" && plan.input == "-") {
      throw InvalidArgument("--key-file - and standard-input data cannot both be used");
    }
    secret = read_input(path, in);
  }
  return KeyMaterial(std::move(secret), params_by_id(plan.options.at("params")));
}

int run_hash(const CommandPlan& plan, std::istream& in, std::ostream& out) {
  const auto& params = params_by_id(plan.options.at("params"));
  Nonce nonce{};
  if (const auto* hex = find(plan, "nonce")) {
    const auto raw = from_hex(*hex);
    std::copy(raw.begin(), raw.end(), nonce.begin());
  } else {
    nonce = NonceGenerator(seed_or(plan, 0)).next();
  }
  const auto message = read_input(plan.input, in);
  write_output(plan.output, out, hash(message, nonce, params).hex() + "\n");
  return kExitOk;
}

int run_encrypt(const CommandPlan& plan, std::istream& in, std::ostream& out) {
  const auto key = load_key(plan, in);
  const auto message = read_input(plan.input, in);
  NonceGenerator nonces(seed_or(plan, std::random_device{}()));
  write_output(plan.output, out, as_text(encode_envelope(encrypt(message, key, nonces))));
  return kExitOk;
}

int run_decrypt(const CommandPlan& plan, std::istream& in, std::ostream& out) {
  const auto key = load_key(plan, in);
  const auto wire = read_input(plan.input, in);
  write_output(plan.output, out, as_text(decrypt(decode_envelope(wire), key)));
  return kExitOk;
}

Scenario scenario_with_overrides(const CommandPlan& plan) {
  auto scenario = load_scenario(resolve_scenario(plan.options.at("scenario")));
  if (const auto* p = find(plan, "policy")) scenario.policy = parse_policy(*p);
  if (const auto* s = find(plan, "strategy")) scenario.strategy = parse_strategy(*s);
  if (find(plan, "seed")) scenario.seed = seed_or(plan, 0);
  return scenario;
}

int run_simulate(const CommandPlan& plan, std::ostream& out) {
  const auto scenario = scenario_with_overrides(plan);
  HeapModel heap(scenario.capacity, scenario.policy, scenario.strategy,
                 scenario_key(scenario.seed), scenario.seed);
  replay(heap, scenario, scenario.seed);
  write_output(plan.output, out, heap.trace().to_json_lines());
  return kExitOk;
}

int run_attack(const CommandPlan& plan, std::ostream& out) {
  const auto scenario = load_scenario(resolve_scenario(plan.options.at("scenario")));
  AttackConfig cfg;
  cfg.kind = parse_attack_kind(plan.options.at("kind"));
  cfg.trials = std::stoull(plan.options.at("trials"));
  cfg.guesses_per_trial = std::stoull(plan.options.at("guesses"));
  cfg.seed = seed_or(plan, 0);
  ScenarioOverrides overrides;
  if (const auto* s = find(plan, "strategy")) overrides.strategy = parse_strategy(*s);
  const auto reports = run_scenario(scenario, cfg, overrides);
  write_output(plan.output, out,
               reports.unprotected_run.to_json() + "\n" + reports.protected_run.to_json() + "\n");
  return kExitOk;
}

int run_bench(const CommandPlan& plan, std::istream& in, std::ostream& out) {
  const auto format = parse_format(plan.options.at("format"));
  BenchReport report;
  if (const auto* recorded = find(plan, "replay")) {
    report = replay_report(parse_report_json(as_text(read_input(*recorded, in))));
  } else {
    BenchOptions options;
    options.params_id = plan.options.at("params");
    options.seed = seed_or(plan, 0);
    const auto* sizes = find(plan, "sizes");
    report = run_suite(sizes ? parse_sizes(*sizes) : default_sizes_kb(),
                       std::stoull(plan.options.at("repeats")), options);
  }
  write_output(plan.output, out, render_report(report, format));
  return kExitOk;
}

}  // namespace

CommandPlan parse_args(const std::vector<std::string>& args) {
  if (args.empty()) throw UsageError("no command given", kCommandList);

  CLI::App app{"Lightweight elliptic-curve hashing, one-time-key encryption and heap GC simulation",
               "lwc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  std::map<std::string, std::string> opts;
  std::string input = "-";
  std::string output = "-";
  std::string seed;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Seed for every random choice (default: $LWC_SEED)");
    sub->add_option("-o,--output", output, "Output path, - for standard output");
  };
  auto params = [&](CLI::App* sub) {
    opts["params"] = "default";
    sub->add_option("--params", opts["params"], "Hash parameter set")
        ->check(CLI::IsMember(params_ids()));
  };
  auto keyed = [&](CLI::App* sub) {
    auto* k = sub->add_option("--key", opts["key"], "Secret as hex (>= 16 octets)");
    auto* f = sub->add_option("--key-file", opts["key-file"], "File holding the raw secret");
    k->excludes(f);
    sub->add_option("input", input, "Input path, - for standard input");
  };

  auto* hash_cmd = app.add_subcommand("hash", "Print the hex digest of a message");
  common(hash_cmd);
  params(hash_cmd);
  hash_cmd->add_option("input", input, "Input path, - for standard input");
  hash_cmd->add_option("--nonce", opts["nonce"], "16-octet nonce as 32 hex digits")
      ->check([](const std::string& v) -> std::string {
        if (v.size() != 32) return "nonce must be 32 hex digits";
        try {
          from_hex(v);
        } catch (const Error& e) {
          return e.what();
        }
        return {};
      });

  auto* enc_cmd = app.add_subcommand("encrypt", "Encrypt into an envelope");
  common(enc_cmd);
  params(enc_cmd);
  keyed(enc_cmd);

  auto* dec_cmd = app.add_subcommand("decrypt", "Decrypt an envelope");
  common(dec_cmd);
  params(dec_cmd);
  keyed(dec_cmd);

  auto* sim_cmd = app.add_subcommand("simulate", "Replay a heap scenario and print its trace");
  common(sim_cmd);
  sim_cmd->add_option("--scenario", opts["scenario"], "Scenario JSON (bundled names resolve)")
      ->required();
  sim_cmd->add_option("--policy", opts["policy"], "Override the GC policy")
      ->check(CLI::IsMember({"plain", "encrypt"}));
  sim_cmd->add_option("--strategy", opts["strategy"], "Override the allocation strategy")
      ->check(CLI::IsMember({"sequential", "randomized"}));

  auto* att_cmd = app.add_subcommand("attack", "Run an attack game against both GC policies");
  common(att_cmd);
  opts["trials"] = "10000";
  opts["guesses"] = "1";
  att_cmd->add_option("--kind", opts["kind"], "Attack game")
      ->required()
      ->check(CLI::IsMember({"nmao", "ltb", "brute-force-session"}));
  att_cmd->add_option("--scenario", opts["scenario"], "Scenario JSON (bundled names resolve)")
      ->required();
  att_cmd->add_option("--trials", opts["trials"], "Number of trials")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{100'000'000}));
  att_cmd->add_option("--guesses", opts["guesses"], "Guesses per trial")
      ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1'000'000}));
  att_cmd->add_option("--strategy", opts["strategy"], "Override the allocation strategy")
      ->check(CLI::IsMember({"sequential", "randomized"}));

  auto* bench_cmd = app.add_subcommand("bench", "Time the ciphers over a sweep of sizes");
  common(bench_cmd);
  params(bench_cmd);
  opts["repeats"] = "5";
  opts["format"] = "json";
  bench_cmd->add_option("--sizes", opts["sizes"], "Comma-separated sizes in KiB");
  bench_cmd->add_option("--repeats", opts["repeats"], "Timed runs per cell (>= 3)")
      ->check(CLI::Range(std::uint64_t{3}, std::uint64_t{100'000}));
  bench_cmd->add_option("--format", opts["format"], "Report format")
      ->check(CLI::IsMember({"json", "markdown-table"}));
  bench_cmd->add_option("--replay", opts["replay"], "Recompute a recorded JSON report");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front();
    throw HelpRequested(sub ? sub->help() : app.help());
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    const std::string hint = subs.empty() ? std::string(kCommandList)
                                          : "see 'lwc " + subs.front()->get_name() + " --help'";
    throw UsageError(e.what(), hint);
  }

  CommandPlan plan{};
  const auto* sub = app.get_subcommands().front();
  const auto& name = sub->get_name();
  for (auto c : {Command::kHash, Command::kEncrypt, Command::kDecrypt, Command::kSimulate,
                 Command::kAttack, Command::kBench}) {
    if (command_name(c) == name) plan.command = c;
  }

  // Keep only options the user set or that carry a default for this command.
  static const std::map<std::string, std::vector<std::string>> kDefaults = {
      {"hash", {"params"}},
      {"encrypt", {"params"}},
      {"decrypt", {"params"}},
      {"simulate", {}},
      {"attack", {"trials", "guesses"}},
      {"bench", {"params", "repeats", "format"}},
  };
  for (const auto* opt : sub->get_options()) {
    const auto key = opt->get_single_name();
    if (key == "help" || key == "seed" || key == "output" || key == "input") continue;
    if (opt->count() > 0) plan.options[key] = opts[key];
  }
  for (const auto& key : kDefaults.at(name)) plan.options.emplace(key, opts[key]);

  if (plan.command == Command::kEncrypt || plan.command == Command::kDecrypt) {
    if (!plan.options.count("key") && !plan.options.count("key-file")) {
      throw UsageError("one of --key or --key-file is required",
                       "see 'lwc " + name + " --help'");
    }
  }
  if (plan.command == Command::kBench) {
    if (plan.options.count("replay") && plan.options.count("sizes")) {
      throw UsageError("--replay and --sizes are mutually exclusive", "see 'lwc bench --help'");
    }
    if (const auto* s = find(plan, "sizes")) parse_sizes(*s);
  }

  if (!seed.empty()) {
    plan.options["seed"] = std::to_string(parse_u64(seed, "--seed"));
  } else if (const char* env = std::getenv("LWC_SEED"); env && *env) {
    plan.options["seed"] = std::to_string(parse_u64(env, "LWC_SEED"));
  }
  plan.input = input;
  plan.output = output;
  return plan;
}

int execute(const CommandPlan& plan, std::istream& in, std::ostream& out) {
  switch (plan.command) {
    case Command::kHash: return run_hash(plan, in, out);
    case Command::kEncrypt: return run_encrypt(plan, in, out);
    case Command::kDecrypt: return run_decrypt(plan, in, out);
    case Command::kSimulate: return run_simulate(plan, out);
    case Command::kAttack: return run_attack(plan, out);
    case Command::kBench: return run_bench(plan, in, out);
  }
  return kExitUsage;
}

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CommandPlan plan;
  try {
    plan = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return kExitOk;
  } catch (const UsageError& e) {
    err << "lwc: " << e.what() << "\n" << e.hint() << "\n";
    return kExitUsage;
  }
  try {
    return execute(plan, in, out);
  } catch (const Error& e) {
    err << "lwc: " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace lwc::cli
