#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "lwc/cli.hpp"

namespace {

namespace fs = std::filesystem;
using lwc::cli::Command;

struct Result {
  int status;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args, const std::string& stdin_data = "") {
  std::istringstream in(stdin_data);
  std::ostringstream out;
  std::ostringstream err;
  const int status = lwc::cli::run(args, in, out, err);
  return {status, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    unsetenv("LWC_SEED");
    dir_ = fs::temp_directory_path() /
           ("lwc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& data) const {
    std::ofstream(path(name), std::ios::binary) << data;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(path(name), std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  fs::path dir_;
};

const std::string kKey = "00112233445566778899aabbccddeeff";

TEST_F(Cli, ParseHappyPath) {
  const auto plan = lwc::cli::parse_args({"hash", "--params", "digest32", "file.bin"});
  EXPECT_EQ(plan.command, Command::kHash);
  EXPECT_EQ(plan.options.at("params"), "digest32");
  EXPECT_EQ(plan.input, "file.bin");
  EXPECT_EQ(plan.output, "-");
}

TEST_F(Cli, ParseRejects) {
  EXPECT_THROW(lwc::cli::parse_args({"hash", "--bogus"}), lwc::cli::UsageError);
  try {
    lwc::cli::parse_args({});
    FAIL();
  } catch (const lwc::cli::UsageError& e) {
    EXPECT_NE(e.hint().find("hash"), std::string::npos);
    EXPECT_NE(e.hint().find("bench"), std::string::npos);
  }
  EXPECT_THROW(lwc::cli::parse_args({"frobnicate"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"hash", "--params", "sha256"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"hash", "--seed", "-3"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"hash", "--nonce", "abcd"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"encrypt", "x"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"encrypt", "--key", "aa", "--key-file", "k", "x"}),
               lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"attack", "--scenario", "x.json"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"bench", "--repeats", "2"}), lwc::cli::UsageError);
  EXPECT_THROW(lwc::cli::parse_args({"bench", "--sizes", "128,,512"}), lwc::cli::UsageError);
}

TEST_F(Cli, SeedPrecedence) {
  EXPECT_EQ(lwc::cli::parse_args({"hash"}).options.count("seed"), 0u);
  setenv("LWC_SEED", "12", 1);
  EXPECT_EQ(lwc::cli::parse_args({"hash"}).options.at("seed"), "12");
  EXPECT_EQ(lwc::cli::parse_args({"hash", "--seed", "5"}).options.at("seed"), "5");
  setenv("LWC_SEED", "nope", 1);
  EXPECT_THROW(lwc::cli::parse_args({"hash"}), lwc::cli::UsageError);
  unsetenv("LWC_SEED");
}

TEST_F(Cli, ExitStatusMatrix) {
  write("msg.txt", "hello");
  write("junk.env", "not an envelope");
  write("bad.json", "{ nope");
  const std::vector<std::pair<std::vector<std::string>, int>> cases = {
      {{}, 2},
      {{"hash", "--bogus"}, 2},
      {{"nonsense"}, 2},
      {{"hash", "--help"}, 0},
      {{"hash", path("msg.txt")}, 0},
      {{"hash", path("missing.txt")}, 1},
      {{"encrypt", "--key", kKey, "--seed", "1", path("msg.txt"), "-o", path("m.env")}, 0},
      {{"encrypt", "--key", "abcd", path("msg.txt")}, 1},
      {{"encrypt", "--key", "xyz0", path("msg.txt")}, 1},
      {{"decrypt", "--key", kKey, path("junk.env")}, 1},
      {{"simulate", "--scenario", "home-automation.json"}, 0},
      {{"simulate", "--scenario", path("bad.json")}, 1},
      {{"simulate", "--scenario", path("none.json")}, 1},
      {{"simulate", "--scenario", "home-automation.json", "--policy", "shred"}, 2},
      {{"attack", "--kind", "ltb", "--scenario", "home-automation.json", "--trials", "50"}, 0},
      {{"attack", "--kind", "ltb", "--scenario", "home-automation.json", "--trials", "0"}, 2},
      {{"attack", "--kind", "replay", "--scenario", "home-automation.json"}, 2},
      {{"bench", "--replay", path("bad.json")}, 1},
  };
  for (const auto& [args, want] : cases) {
    const auto r = run(args);
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    EXPECT_EQ(r.status, want) << joined << "\nstderr: " << r.err;
    if (want != 0) EXPECT_FALSE(r.err.empty()) << joined;
    if (want == 2) EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 2) << r.err;
  }
}

TEST_F(Cli, HashStdinAndFileAgree) {
  write("msg.txt", "turn on the fan");
  const auto a = run({"hash", "--params", "digest32", path("msg.txt")});
  const auto b = run({"hash", "--params", "digest32"}, "turn on the fan");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.size(), 65u);
  const auto c = run({"hash", "--params", "digest32", "--nonce", std::string(32, '0'), path("msg.txt")});
  const auto d = run({"hash", "--params", "digest32", "--nonce", std::string(31, '0') + "1", path("msg.txt")});
  EXPECT_NE(c.out, d.out);
  EXPECT_EQ(run({"hash", path("msg.txt")}).out.size(), 2 * 96 + 1u);
}

TEST_F(Cli, EncryptDecryptRoundTrip) {
  std::string data;
  for (int i = 0; i < 5000; ++i) data.push_back(static_cast<char>(i * 31));
  write("plain.bin", data);
  write("key.bin", std::string(20, '\x5a'));
  ASSERT_EQ(run({"encrypt", "--key-file", path("key.bin"), path("plain.bin"), "-o", path("c.env")}).status, 0);
  ASSERT_EQ(run({"decrypt", "--key-file", path("key.bin"), path("c.env"), "-o", path("out.bin")}).status, 0);
  EXPECT_EQ(read("out.bin"), data);
  EXPECT_EQ(read("c.env").substr(0, 4), "LWC1");

  // Unseeded encryptions draw fresh nonces.
  ASSERT_EQ(run({"encrypt", "--key-file", path("key.bin"), path("plain.bin"), "-o", path("c2.env")}).status, 0);
  EXPECT_NE(read("c.env"), read("c2.env"));
}

TEST_F(Cli, WritesOnlyDeclaredOutput) {
  write("msg.txt", "x");
  const auto before = std::distance(fs::directory_iterator(dir_), fs::directory_iterator());
  const auto r = run({"encrypt", "--key", kKey, "--seed", "3", path("msg.txt"), "-o", path("o.env")});
  ASSERT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(std::distance(fs::directory_iterator(dir_), fs::directory_iterator()), before + 1);
}

TEST_F(Cli, SeededCommandsAreDeterministic) {
  write("msg.txt", "deterministic");
  const std::vector<std::vector<std::string>> cmds = {
      {"hash", "--seed", "4", path("msg.txt")},
      {"encrypt", "--key", kKey, "--seed", "4", path("msg.txt")},
      {"simulate", "--scenario", "gc-100-tasks.json", "--seed", "4", "--strategy", "randomized"},
      {"attack", "--kind", "nmao", "--scenario", "home-automation.json", "--trials", "200", "--seed", "4",
       "--strategy", "randomized"},
  };
  for (const auto& c : cmds) {
    const auto x = run(c);
    const auto y = run(c);
    EXPECT_EQ(x.status, 0) << c[0] << ": " << x.err;
    EXPECT_EQ(x.out, y.out) << c[0];
  }
}

TEST_F(Cli, AttackPrintsBothRuns) {
  const auto r = run({"attack", "--kind", "ltb", "--scenario", "home-automation.json", "--trials", "100",
                      "--seed", "7"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto nl = r.out.find('\n');
  EXPECT_NE(r.out.substr(0, nl).find("\"protected\":false"), std::string::npos);
  EXPECT_NE(r.out.substr(nl).find("\"protected\":true"), std::string::npos);
}

TEST_F(Cli, BenchMarkdownShape) {
  const auto r = run({"bench", "--sizes", "1,2", "--repeats", "3", "--format", "markdown-table"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
  EXPECT_NE(r.out.find("| 1 |"), std::string::npos);
  EXPECT_NE(r.out.find("| 2 |"), std::string::npos);
  EXPECT_NE(r.out.find("| Average Time |"), std::string::npos);
}

TEST_F(Cli, BenchReplayIsExact) {
  ASSERT_EQ(run({"bench", "--sizes", "1", "--repeats", "3", "-o", path("rec.json")}).status, 0);
  const auto x = run({"bench", "--replay", path("rec.json")});
  const auto y = run({"bench", "--replay", path("rec.json")});
  ASSERT_EQ(x.status, 0) << x.err;
  EXPECT_EQ(x.out, y.out);
  EXPECT_EQ(x.out, read("rec.json"));
}

}  // namespace
