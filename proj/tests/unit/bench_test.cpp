#include <cmath>

#include <gtest/gtest.h>

#include "lwc/bench.hpp"
#include "lwc/error.hpp"

namespace {

using lwc::Algorithm;

TEST(Bench, TimeCipherPreconditions) {
  EXPECT_THROW(lwc::time_cipher(Algorithm::kAesSha1, 0, 3), lwc::InvalidArgument);
  EXPECT_THROW(lwc::time_cipher(Algorithm::kAesSha1, 1, 2), lwc::InvalidArgument);
  EXPECT_THROW(lwc::parse_algorithm("des"), lwc::InvalidArgument);
}

TEST(Bench, RecordsArePositive) {
  for (auto a : lwc::all_algorithms()) {
    const auto r = lwc::time_cipher(a, 4, 3);
    EXPECT_GT(r.e_t_us, 0.0) << lwc::to_string(a);
    EXPECT_GT(r.d_t_us, 0.0);
    EXPECT_EQ(r.repeats, 3u);
    EXPECT_EQ(r.e_samples_us.size(), 3u);
    EXPECT_EQ(r.e_t_us, lwc::median(r.e_samples_us));
  }
}

TEST(Bench, ProposedCostGrowsWithSize) {
  const auto small = lwc::time_cipher(Algorithm::kEccHashOtk, 1, 3);
  const auto large = lwc::time_cipher(Algorithm::kEccHashOtk, 64, 3);
  EXPECT_GT(large.e_t_us, small.e_t_us);
}

TEST(Bench, MedianAndSpearman) {
  EXPECT_EQ(lwc::median({3, 1, 2}), 2);
  EXPECT_EQ(lwc::median({4, 1, 2, 3}), 2.5);
  EXPECT_DOUBLE_EQ(lwc::spearman({1, 2, 3, 4}, {10, 20, 30, 40}), 1.0);
  EXPECT_DOUBLE_EQ(lwc::spearman({1, 2, 3, 4}, {4, 3, 2, 1}), -1.0);
  EXPECT_DOUBLE_EQ(lwc::spearman({1, 2, 3}, {1, 1, 2}), std::sqrt(3.0) / 2.0);
  EXPECT_THROW(lwc::spearman({1}, {1}), lwc::InvalidArgument);
}

lwc::BenchReport synthetic() {
  std::vector<lwc::TimingRecord> rows;
  double base = 1.0;
  for (auto a : lwc::all_algorithms()) {
    for (std::uint64_t kb : {128u, 512u}) {
      rows.push_back(lwc::record_from_samples(a, kb, {base, base + 2, base + 1},
                                              {base + 0.5, base + 0.25, base + 0.75}));
      base += 1.5;
    }
  }
  return lwc::assemble_report(rows, {128, 512}, 3, "test machine");
}

TEST(Report, AveragesAreColumnMeans) {
  const auto r = synthetic();
  ASSERT_EQ(r.averages.size(), 3u);
  for (auto a : lwc::all_algorithms()) {
    EXPECT_EQ(r.average(a).e_t_us, (r.row(a, 128).e_t_us + r.row(a, 512).e_t_us) / 2.0);
  }
}

TEST(Report, SingleSizeAverageIsTheRow) {
  const auto row = lwc::record_from_samples(Algorithm::kAesSha1, 128, {5, 6, 7}, {1, 2, 3});
  const auto r = lwc::assemble_report({row}, {128}, 3, "");
  EXPECT_EQ(r.average(Algorithm::kAesSha1).e_t_us, 6.0);
  EXPECT_EQ(r.average(Algorithm::kAesSha1).d_t_us, 2.0);
}

TEST(Report, JsonRoundTripAndReplay) {
  const auto r = synthetic();
  const auto json = lwc::render_report(r, lwc::ReportFormat::kJson);
  EXPECT_EQ(lwc::parse_report_json(json), r);
  EXPECT_EQ(lwc::replay_report(r), r);
  EXPECT_THROW(lwc::parse_report_json("{}"), lwc::InvalidArgument);
}

TEST(Report, MarkdownShape) {
  const auto md = lwc::render_report(synthetic(), lwc::ReportFormat::kMarkdownTable);
  const auto header = md.substr(0, md.find('\n'));
  for (auto a : lwc::all_algorithms()) {
    EXPECT_NE(header.find(std::string(lwc::to_string(a))), std::string::npos);
  }
  EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 5);
  EXPECT_NE(md.find("| 512 |"), std::string::npos);
  EXPECT_NE(md.find("| Average Time |"), std::string::npos);
}

TEST(Report, EmptyRejected) {
  EXPECT_THROW(lwc::render_report(lwc::BenchReport{}, lwc::ReportFormat::kJson), lwc::InvalidArgument);
  EXPECT_THROW(lwc::run_suite({}, 3), lwc::InvalidArgument);
}

}  // namespace
