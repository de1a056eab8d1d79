#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lwc::cli {

enum class Command { kHash, kEncrypt, kDecrypt, kSimulate, kAttack, kBench };

struct CommandPlan {
  Command command;
  std::map<std::string, std::string> options;  ///< validated, long names without dashes
  std::string input = "-";                     ///< "-" is standard input
  std::string output = "-";                    ///< "-" is standard output
};

/// Bad command line. `hint` is a one-line suggestion for the user.
class UsageError : public std::runtime_error {
 public:
  UsageError(const std::string& what, std::string hint)
      : std::runtime_error(what), hint_(std::move(hint)) {}
  const std::string& hint() const noexcept { return hint_; }

 private:
  std::string hint_;
};

/// --help was requested; what() is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// argv without the program name. Throws UsageError or HelpRequested.
CommandPlan parse_args(const std::vector<std::string>& args);

/// Runs a validated plan. Domain errors propagate as lwc::Error.
int execute(const CommandPlan& plan, std::istream& in, std::ostream& out);

/// parse_args + execute with the exit-status contract applied.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace lwc::cli
