#pragma once

// Encryption/decryption timing harness. Each sample is an end-minus-start
// delta on the steady clock; a record keeps the median of its samples after
// two discarded warmup runs.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace lwc {

enum class Algorithm { kEccHashOtk, kAesSha1, kRsaSha1 };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view name);
const std::vector<Algorithm>& all_algorithms();

struct TimingRecord {
  Algorithm algorithm;
  std::uint64_t heap_kb;
  double e_t_us;
  double d_t_us;
  std::uint64_t repeats;
  std::vector<double> e_samples_us;
  std::vector<double> d_samples_us;

  friend bool operator==(const TimingRecord&, const TimingRecord&) = default;
};

struct AlgorithmAverage {
  Algorithm algorithm;
  double e_t_us;
  double d_t_us;

  friend bool operator==(const AlgorithmAverage&, const AlgorithmAverage&) = default;
};

struct BenchReport {
  std::string environment;
  std::vector<std::uint64_t> sizes_kb;
  std::uint64_t repeats = 0;
  std::vector<TimingRecord> rows;
  std::vector<AlgorithmAverage> averages;

  const TimingRecord& row(Algorithm a, std::uint64_t kb) const;
  const AlgorithmAverage& average(Algorithm a) const;

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

struct BenchOptions {
  std::string params_id = "default";
  std::uint64_t seed = 0;
};

enum class ReportFormat { kJson, kMarkdownTable };
ReportFormat parse_format(std::string_view name);

inline constexpr int kWarmupRuns = 2;

std::vector<std::uint64_t> default_sizes_kb();

double median(std::vector<double> samples);
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Medians recomputed from recorded samples (replay mode).
TimingRecord record_from_samples(Algorithm algorithm, std::uint64_t heap_kb,
                                 std::vector<double> e_samples_us,
                                 std::vector<double> d_samples_us);

/// Requires payload_kb >= 1 and repeats >= 3.
TimingRecord time_cipher(Algorithm algorithm, std::uint64_t payload_kb, std::uint64_t repeats,
                         const BenchOptions& options = {});

/// Builds averages (column means in row order) around the given rows.
BenchReport assemble_report(std::vector<TimingRecord> rows, std::vector<std::uint64_t> sizes_kb,
                            std::uint64_t repeats, std::string environment);

/// Cartesian sweep algorithms x sizes, run strictly serially.
BenchReport run_suite(const std::vector<std::uint64_t>& sizes_kb, std::uint64_t repeats,
                      const BenchOptions& options = {});

/// Rebuilds every record from its samples.
BenchReport replay_report(const BenchReport& recorded);

std::string render_report(const BenchReport& report, ReportFormat format);
BenchReport parse_report_json(std::string_view text);

std::string machine_descriptor();

}  // namespace lwc
