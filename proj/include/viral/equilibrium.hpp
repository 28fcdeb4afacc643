#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "viral/inflow.hpp"
#include "viral/model.hpp"
#include "viral/simulation.hpp"

namespace viral {

// Cell index of observation (s, k): index_of(s) * (K + 1) + k.
constexpr int observation_cell(int K, Signal s, int k) { return index_of(s) * (K + 1) + k; }

struct PosteriorCell {
  double belief = 0.5;        // P(state = +1 | s, k), smoothed
  double se = 0.0;            // run-clustered standard error
  std::int64_t count = 0;     // raw samples of (s, k)
  std::int64_t mirror_count = 0;  // raw samples of (-s, K - k)
  bool low_confidence = true;
};

struct PosteriorTable {
  int K = 0;
  std::int64_t runs = 0;
  std::int64_t n = 0;  // horizon the positions were drawn from
  std::vector<PosteriorCell> cells;  // by observation_cell

  const PosteriorCell& at(Signal s, int k) const { return cells.at(observation_cell(K, s, k)); }
  double belief(Signal s, int k) const { return at(s, k).belief; }
};

// Per-cell moments of per-run observation counts, kept per stratum of the
// early platform state. Sums of integers are held exactly, so merging in any
// order gives identical tables.
class PosteriorAccumulator {
 public:
  explicit PosteriorAccumulator(int K = 0, int strata = 1);
  void add_run(const std::vector<std::int64_t>& counts, int stratum = 0);
  void merge(const PosteriorAccumulator& other);
  // With stratum_probs empty the runs are pooled; otherwise each stratum mean
  // is weighted by its exact probability (post-stratification), merging
  // adjacent strata until each holds at least min_stratum_runs runs.
  PosteriorTable table(std::int64_t n, double smoothing, std::int64_t low_confidence_below,
                       const std::vector<double>& stratum_probs = {}, std::int64_t min_stratum_runs = 10) const;
  std::int64_t runs() const;

 private:
  int K_;
  int strata_;
  std::vector<std::int64_t> runs_;  // per stratum
  // [stratum][cell]; cross = count(s,k) * count(-s,K-k)
  std::vector<double> sum_, sum_sq_, sum_cross_;
};

// Exact distribution of the positive popularity share after the first T
// arrivals, binned into `bins` equal cells of [0, 1]. Requires iota = 0.
std::vector<double> early_share_distribution(const Strategy& sigma, const ModelParams& params, std::int64_t T,
                                             int bins);
int share_bin(double share, int bins);

struct PosteriorOptions {
  std::int64_t runs = 2000;
  std::uint64_t base_seed = 1;
  int threads = 0;
  // Positions drawn per run, uniformly with replacement from {K+1..n};
  // 0 records every position, the exact uniform-position average.
  std::int64_t positions_per_run = 0;
  double smoothing = 1.0;
  std::int64_t low_confidence_below = 100;
  // Post-stratify runs by their popularity share at this arrival, with
  // exact stratum probabilities; 0 (or iota > 0) pools runs instead.
  std::int64_t stratify_time = 200;
  int strata = 64;
  BasinOptions basin;  // steady-state classification of each run
};

// Beliefs of an agent at a uniformly random position, estimated under
// state +1 through the symmetry identity
// P(+1 | s, k) = f(s, k) / (f(s, k) + f(-s, K - k)). Requires a
// state-symmetric strategy.
PosteriorTable empirical_posteriors(const Strategy& sigma, const ModelParams& params, const PosteriorOptions& opts);
// Same simulations, one table per horizon (each <= params.n, increasing).
std::vector<PosteriorTable> empirical_posteriors(const Strategy& sigma, const ModelParams& params,
                                                 const std::vector<std::int64_t>& horizons,
                                                 const PosteriorOptions& opts);
// Single-threaded reference for the above.
std::vector<PosteriorTable> empirical_posteriors_serial(const Strategy& sigma, const ModelParams& params,
                                                        const std::vector<std::int64_t>& horizons,
                                                        const PosteriorOptions& opts);

struct PosteriorEstimates {
  std::vector<PosteriorTable> by_horizon;
  // Beliefs as the number of agents grows: each run is carried by the flow
  // to a steady state x*, whose observation frequencies
  // P(s | +1) Binom(K, lambda x* + (1 - lambda) q)(k) it then contributes.
  PosteriorTable steady_state;
  std::vector<FixedPointReport> fixed_points;
  std::vector<double> basin_share;  // stratified share of runs per fixed point
};

// Both estimates from one set of runs of params.n arrivals.
PosteriorEstimates estimate_posteriors(const Strategy& sigma, const ModelParams& params,
                                       const std::vector<std::int64_t>& horizons, const PosteriorOptions& opts,
                                       bool parallel = true);

struct BestResponseOptions {
  double indifference_se = 2.0;  // |belief - 1/2| within this many SE counts as indifferent
};

struct BestResponse {
  Strategy strategy;
  std::vector<bool> indifferent;  // by observation_cell
};

// Shares as many positive stories as feasible when the belief favors +1,
// as few as feasible when it favors -1, and follows the private signal when
// indifferent.
BestResponse best_response(const PosteriorTable& beliefs, const ModelParams& params,
                           const BestResponseOptions& opts = {});

struct CellMismatch {
  Signal s;
  int k;
  double belief;
  double se;
};

// Cells where a pure sigma differs from the best response to the table,
// ignoring indifferent cells.
std::vector<CellMismatch> self_consistency_violations(const Strategy& sigma, const PosteriorTable& beliefs,
                                                      const ModelParams& params,
                                                      const BestResponseOptions& opts = {});

/// One-parameter strategy family with a designated pivotal observation whose
/// belief gap decides indifference.
struct StrategyFamily {
  std::string name;
  std::function<Strategy(double)> make;
  Signal pivot_s = Signal::positive;
  int pivot_k = 0;
};

// Majority rule except at (s=+1, k=pivot): with probability p share min(C, k)
// positive stories (the feed's minority plus majority filler) instead of the
// majority choice; mirrored at (s=-1, K-pivot). Pivot defaults to K/2 - 1,
// the feed outweighing the signal by two stories (even K only).
StrategyFamily deviation_family(int K, int C, std::optional<int> pivot = std::nullopt);

// Cell (s=+1, k < K/2) whose belief under the table is nearest 1/2.
int auto_detect_pivot(const PosteriorTable& beliefs);

// A family that ignores p, mostly for testing.
StrategyFamily constant_family(const Strategy& sigma, Signal pivot_s, int pivot_k);

struct MixingSolution {
  std::vector<double> p_grid;
  std::vector<double> gaps;    // belief at the pivot minus 1/2
  std::vector<double> gap_se;
  std::optional<double> p_hat;  // empty: no interior indifference
  std::optional<double> p_hat_se;
  std::int64_t n = 0;
  std::int64_t runs = 0;
};

// Uses the same base seed for every p so that gaps differ by the strategy
// only; p_hat linearly interpolates the first sign change of the gap.
MixingSolution solve_mixing_equilibrium(const StrategyFamily& family, const ModelParams& params,
                                        const std::vector<double>& p_grid, const PosteriorOptions& opts);

MixingSolution mixing_from_gaps(std::vector<double> p_grid, std::vector<double> gaps, std::vector<double> gap_se,
                                std::int64_t n, std::int64_t runs);

struct LimitEstimate {
  std::vector<MixingSolution> by_n;  // one per schedule entry
  std::optional<double> limit;       // mean p_hat over the last quartile
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  bool plateau = false;
  // Indifference under steady-state beliefs, from the same runs.
  MixingSolution steady_state;
};

struct LimitOptions {
  double plateau_tol = 0.03;  // max spread of p_hat over the last quartile
};

// Each p is simulated once to the largest horizon, with tables taken at
// every schedule entry.
LimitEstimate estimate_limit_equilibrium(const StrategyFamily& family, const ModelParams& params,
                                         const std::vector<std::int64_t>& n_schedule,
                                         const std::vector<double>& p_grid, const PosteriorOptions& opts,
                                         const LimitOptions& limit_opts = {});

// Evenly spaced grid of count points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

}  // namespace viral
