#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "fplay/dynamics.hpp"
#include "fplay/errors.hpp"
#include "fplay/matrix.hpp"
#include "fplay/random.hpp"

namespace fplay {

struct MatrixFamily {
  enum class Kind { kGaussian, kDiagonalUniform, kIdentity } kind = Kind::kGaussian;
  double mean = 0.0;
  double stddev = 1.0;
  double lo = 0.5;
  double hi = 2.0;

  static MatrixFamily gaussian(double mean = 0.0, double stddev = 1.0) {
    return {Kind::kGaussian, mean, stddev, 0, 0};
  }
  static MatrixFamily diagonal_uniform(double lo, double hi) {
    return {Kind::kDiagonalUniform, 0, 0, lo, hi};
  }
  static MatrixFamily identity() { return {Kind::kIdentity, 0, 0, 0, 0}; }
};

struct ExperimentConfig {
  int n = 10;
  int runs = 100;
  std::int64_t rounds = 10000;
  MatrixFamily family;
  std::uint64_t seed = 0;
  Dynamic dynamic = Dynamic::kFP;
  std::optional<TieBreak> tiebreak;               // default: identity order
  std::optional<std::pair<int, int>> start;       // vertex indices, 1-based; default (1,1)
  std::string output_path;
};

// Deterministic given the RNG stream; Gaussian entries are i.i.d.
inline Matrix<double> generate_matrix(const MatrixFamily& family, int n, SplitMix64& rng) {
  if (n < 1) throw ConfigError("matrix size must be >= 1");
  switch (family.kind) {
    case MatrixFamily::Kind::kIdentity:
      return Matrix<double>::identity(n);
    case MatrixFamily::Kind::kDiagonalUniform: {
      if (!(family.lo > 0) || family.hi < family.lo) {
        throw ConfigError("diagonal-uniform range must satisfy 0 < lo <= hi");
      }
      std::vector<double> d(static_cast<std::size_t>(n));
      for (auto& v : d) v = family.lo + (family.hi - family.lo) * rng.next_double();
      return Matrix<double>::diagonal(std::move(d));
    }
    case MatrixFamily::Kind::kGaussian: {
      if (!(family.stddev >= 0)) throw ConfigError("gaussian stddev must be nonnegative");
      std::vector<double> e(static_cast<std::size_t>(n) * n);
      for (auto& v : e) v = family.mean + family.stddev * rng.next_gaussian();
      return Matrix<double>::general(n, std::move(e));
    }
  }
  throw ConfigError("unknown matrix family");
}

// Random diagonal matrix with entries in [lo, hi] quantized to 1/denom, as
// an exact-mode matrix scaled by denom.
inline Matrix<std::int64_t> random_quantized_diagonal(int n, double lo, double hi,
                                                      std::int64_t denom, SplitMix64& rng) {
  const auto klo = static_cast<std::int64_t>(std::llround(lo * static_cast<double>(denom)));
  const auto khi = static_cast<std::int64_t>(std::llround(hi * static_cast<double>(denom)));
  if (klo < 1 || khi < klo) throw ConfigError("bad quantized diagonal range");
  std::vector<std::int64_t> d(static_cast<std::size_t>(n));
  for (auto& v : d) v = klo + rng.next_index(static_cast<int>(khi - klo + 1));
  return Matrix<std::int64_t>::diagonal(std::move(d), denom);
}

struct CurvePoint {
  std::int64_t t = 0;
  double max_gap = 0.0;          // max over runs of psi(x_t, y_t)
  double max_gap_sq_over_t = 0.0;
};

struct RunSummary {
  int run = 0;
  double final_gap = 0.0;              // psi(x_t, y_t) at the last round
  double max_gap_over_sqrt_t = 0.0;    // max over t >= 100 of psi/sqrt(t)
  double max_gap = 0.0;                // max over all recorded t
  bool failed = false;
  std::string error;
};

struct BatchResult {
  std::vector<RunSummary> summaries;
  std::vector<CurvePoint> curve;
  std::vector<std::int64_t> recorded_t;
};

// Recording grid: every round up to 10^3, then every 10th.
inline std::vector<std::int64_t> recording_grid(std::int64_t rounds) {
  std::vector<std::int64_t> grid;
  for (std::int64_t t = 1; t <= rounds; ++t) {
    if (t <= 1000 || t % 10 == 0) grid.push_back(t);
  }
  return grid;
}

// Runs `config.runs` independent traces (embarrassingly parallel) and
// aggregates the pointwise maximum gap. Aggregation is a reduction in
// run-index order, so results are byte-identical across thread counts.
inline BatchResult run_batch(const ExperimentConfig& config, int threads = 1) {
  if (config.runs < 1 || config.rounds < 1) throw ConfigError("runs and rounds must be >= 1");
  const std::vector<std::int64_t> grid = recording_grid(config.rounds);
  std::vector<std::vector<double>> per_run(static_cast<std::size_t>(config.runs));
  std::vector<RunSummary> summaries(static_cast<std::size_t>(config.runs));

  auto one_run = [&](int run) {
    RunSummary& summary = summaries[static_cast<std::size_t>(run)];
    summary.run = run;
    try {
      SplitMix64 rng = SplitMix64::for_run(config.seed, static_cast<std::uint64_t>(run));
      const Matrix<double> a = generate_matrix(config.family, config.n, rng);
      TieBreak rule = config.tiebreak.value_or(TieBreak::identity(config.n));
      rule.validate(config.n);
      const auto [si, sj] = config.start.value_or(std::make_pair(1, 1));
      std::vector<double> x0(static_cast<std::size_t>(config.n), 0.0);
      std::vector<double> y0(static_cast<std::size_t>(config.n), 0.0);
      x0[static_cast<std::size_t>(si - 1)] = 1.0;
      y0[static_cast<std::size_t>(sj - 1)] = 1.0;
      const double tol = 1e-9 * (1.0 + a.max_abs_entry());
      State<double> s = State<double>::make(config.dynamic, a, std::move(x0), std::move(y0), tol);
      std::vector<double>& gaps = per_run[static_cast<std::size_t>(run)];
      gaps.reserve(grid.size());
      std::size_t g = 0;
      for (std::int64_t t = 1; t <= config.rounds; ++t) {
        const Round<double> rec = step(s, a, rule);
        if (g < grid.size() && grid[g] == t) {
          gaps.push_back(rec.psi);
          ++g;
        }
        summary.final_gap = rec.psi;
        summary.max_gap = std::max(summary.max_gap, rec.psi);
        if (t >= 100) {
          summary.max_gap_over_sqrt_t =
              std::max(summary.max_gap_over_sqrt_t, rec.psi / std::sqrt(static_cast<double>(t)));
        }
      }
    } catch (const std::exception& e) {
      summary.failed = true;
      summary.error = e.what();
    }
  };

  if (threads <= 1) {
    for (int run = 0; run < config.runs; ++run) one_run(run);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (int run = next.fetch_add(1); run < config.runs; run = next.fetch_add(1)) {
          one_run(run);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  BatchResult out;
  out.summaries = std::move(summaries);
  out.recorded_t = grid;
  out.curve.resize(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mx = 0.0;
    for (int run = 0; run < config.runs; ++run) {
      const auto& gaps = per_run[static_cast<std::size_t>(run)];
      if (g < gaps.size()) mx = std::max(mx, gaps[g]);
    }
    out.curve[g] = CurvePoint{grid[g], mx, mx * mx / static_cast<double>(grid[g])};
  }
  return out;
}

}  // namespace fplay
