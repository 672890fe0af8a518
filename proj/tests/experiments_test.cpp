#include <cstdint>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "fplay/experiments.hpp"
#include "fplay/io.hpp"
#include "fplay/random.hpp"

namespace {

using namespace fplay;

TEST(GenerateMatrix, IdentityAndDegenerateUniform) {
  SplitMix64 rng(1);
  const auto id = generate_matrix(MatrixFamily::identity(), 3, rng);
  EXPECT_EQ(id.structure(), Structure::kIdentity);
  EXPECT_EQ(id.n(), 3);

  const auto degenerate = generate_matrix(MatrixFamily::diagonal_uniform(1, 1), 4, rng);
  EXPECT_EQ(degenerate.structure(), Structure::kIdentity);
}

TEST(GenerateMatrix, GaussianDeterministicPerStream) {
  auto r1 = SplitMix64::for_run(42, 0);
  auto r2 = SplitMix64::for_run(42, 0);
  const auto a1 = generate_matrix(MatrixFamily::gaussian(), 10, r1);
  const auto a2 = generate_matrix(MatrixFamily::gaussian(), 10, r2);
  EXPECT_EQ(a1.entries(), a2.entries());

  auto r3 = SplitMix64::for_run(42, 1);
  const auto a3 = generate_matrix(MatrixFamily::gaussian(), 10, r3);
  EXPECT_NE(a1.entries(), a3.entries());
}

TEST(GenerateMatrix, RejectsBadParameters) {
  SplitMix64 rng(2);
  EXPECT_THROW(generate_matrix(MatrixFamily::diagonal_uniform(0, 1), 3, rng), ConfigError);
  EXPECT_THROW(generate_matrix(MatrixFamily::identity(), 0, rng), ConfigError);
}

TEST(RandomQuantizedDiagonal, EntriesInRangeAndQuantized) {
  SplitMix64 rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_quantized_diagonal(5, 0.5, 2.0, 16, rng);
    EXPECT_EQ(a.scale(), 16);
    for (int i = 0; i < 5; ++i) {
      EXPECT_GE(a.diag_at(i), 8);   // 0.5 * 16
      EXPECT_LE(a.diag_at(i), 32);  // 2.0 * 16
    }
  }
}

TEST(RecordingGrid, DenseThenStrided) {
  const auto grid = recording_grid(2000);
  EXPECT_EQ(grid.front(), 1);
  EXPECT_EQ(grid.back(), 2000);
  // dense through 1000, then multiples of 10
  EXPECT_TRUE(std::find(grid.begin(), grid.end(), 999) != grid.end());
  EXPECT_TRUE(std::find(grid.begin(), grid.end(), 1001) == grid.end());
  EXPECT_TRUE(std::find(grid.begin(), grid.end(), 1010) != grid.end());
}

TEST(RunBatch, SingleIdentityRunReproducesHandTrace) {
  ExperimentConfig cfg;
  cfg.n = 2;
  cfg.runs = 1;
  cfg.rounds = 10;
  cfg.family = MatrixFamily::identity();
  const auto batch = run_batch(cfg);
  const std::vector<double> expect{1, 1, 2, 2, 2, 2, 2, 2, 2, 2};
  ASSERT_EQ(batch.curve.size(), expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) {
    EXPECT_DOUBLE_EQ(batch.curve[k].max_gap, expect[k]) << "t=" << batch.curve[k].t;
    EXPECT_DOUBLE_EQ(batch.curve[k].max_gap_sq_over_t,
                     expect[k] * expect[k] / static_cast<double>(batch.curve[k].t));
  }
}

TEST(RunBatch, MaxGapCurveNondecreasingForFP) {
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.runs = 8;
  cfg.rounds = 500;
  cfg.seed = 5;
  cfg.family = MatrixFamily::gaussian();
  const auto batch = run_batch(cfg, 2);
  for (std::size_t k = 1; k < batch.curve.size(); ++k) {
    ASSERT_GE(batch.curve[k].max_gap, batch.curve[k - 1].max_gap - 1e-12);
  }
  for (const auto& s : batch.summaries) EXPECT_FALSE(s.failed) << s.error;
}

TEST(RunBatch, ByteIdenticalCsvAcrossThreadCounts) {
  ExperimentConfig cfg;
  cfg.n = 5;
  cfg.runs = 12;
  cfg.rounds = 800;
  cfg.seed = 77;
  cfg.family = MatrixFamily::gaussian();
  const auto serial = run_batch(cfg, 1);
  const auto parallel = run_batch(cfg, 8);
  std::ostringstream a, b;
  write_curve_csv(a, serial.curve);
  write_curve_csv(b, parallel.curve);
  EXPECT_EQ(a.str(), b.str());
  ASSERT_EQ(serial.summaries.size(), parallel.summaries.size());
  for (std::size_t k = 0; k < serial.summaries.size(); ++k) {
    EXPECT_EQ(serial.summaries[k].final_gap, parallel.summaries[k].final_gap);
  }
}

TEST(RunBatch, RejectsBadConfig) {
  ExperimentConfig cfg;
  cfg.runs = 0;
  EXPECT_THROW(run_batch(cfg), ConfigError);
}

}  // namespace
