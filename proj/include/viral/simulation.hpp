#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viral/inflow.hpp"
#include "viral/model.hpp"
#include "viral/objective.hpp"
#include "viral/philox.hpp"

namespace viral {

// Which story realization is correct. Signals match it with probability q;
// reported accuracies are relative to it. Positive is the default, and the
// negative orientation exists for mirror experiments.
enum class TrueState { positive, negative };

/// Sufficient statistic of the platform: story counts and total popularity
/// scores by realization.
struct PlatformState {
  std::int64_t count_pos = 0;
  std::int64_t count_neg = 0;
  std::int64_t score_pos = 0;
  std::int64_t score_neg = 0;
  std::int64_t t = 0;          // arrivals so far, bots included
  std::int64_t bots = 0;
  std::int64_t idle_bots = 0;  // bots that found no incorrect story to push

  // Share of popularity / posted stories held by positive stories.
  double score_share() const { return static_cast<double>(score_pos) / static_cast<double>(score_pos + score_neg); }
  double count_share() const { return static_cast<double>(count_pos) / static_cast<double>(count_pos + count_neg); }

  // Same shares relative to the correct realization.
  double accuracy(TrueState truth = TrueState::positive) const;
  double posted_accuracy(TrueState truth = TrueState::positive) const;

  friend bool operator==(const PlatformState&, const PlatformState&) = default;
};

// Throws NumericalError naming the violated count or score identity.
void check_invariants(const PlatformState& st, const ModelParams& params);

// Probability that one feed slot shows a positive story.
double feed_positive_probability(const PlatformState& st, const ModelParams& params);
// Number of positive stories in a K-story feed, by inversion of u.
int sample_feed_count(const PlatformState& st, const ModelParams& params, double u);

// Draws z ~ sigma(s, k); pure cells consume no randomness.
class StrategySampler {
 public:
  explicit StrategySampler(const Strategy& sigma);
  int draw(Signal s, int k, PhiloxStream& rng) const;
  const Strategy& strategy() const { return sigma_; }

 private:
  Strategy sigma_;
  int K_;
  int C_;
  std::vector<int> pure_;         // z for pure cells, -1 otherwise
  std::vector<double> cumulative_;  // (C+1) per cell
};

enum class ArrivalKind { initial_post, agent, bot, idle_bot };

struct StepRecord {
  ArrivalKind kind = ArrivalKind::initial_post;
  Signal s = Signal::positive;
  int k = -1;  // feed count, agents only
  int z = -1;  // positive stories shared, agents only
};

StepRecord advance(PlatformState& st, const StrategySampler& sampler, const ModelParams& params,
                   PhiloxStream& rng, TrueState truth = TrueState::positive);

// Runs params.n arrivals from an empty platform, calling
// observer(before, record, after) after every arrival.
template <class Observer>
PlatformState simulate(const StrategySampler& sampler, const ModelParams& params, std::uint64_t seed,
                       TrueState truth, Observer&& observer) {
  PlatformState st;
  PhiloxStream rng(seed, kDynamicsStream);
  for (std::int64_t i = 0; i < params.n; ++i) {
    const PlatformState before = st;
    const StepRecord rec = advance(st, sampler, params, rng, truth);
    observer(before, rec, st);
  }
  return st;
}

struct PathPoint {
  std::int64_t t;
  double x;
  double z;

  friend bool operator==(const PathPoint&, const PathPoint&) = default;
};

struct BasinOptions {
  // A run is committed once x is farther than margin from every fixed point
  // except the one its flow leads to; 0 classifies the final state as is.
  double margin = 0.05;
  // Extra arrivals allowed past the horizon, as a multiple of n.
  std::int64_t max_extension = 10;
};

struct SimulationOptions {
  TrueState truth = TrueState::positive;
  int path_points = 0;            // log-spaced samples of (x, z); 0 disables
  double classify_radius = 0.08;  // farther than this from every steady state = unassigned
  bool check_every_step = false;  // assert state identities after each arrival
  BasinOptions basin;
};

struct RunResult {
  std::uint64_t seed = 0;
  double final_x = 0.0;
  double final_z = 0.0;
  std::optional<std::size_t> assigned_fixed_point;
  // Steady state the deterministic flow carries the run to, once committed.
  std::optional<std::size_t> basin;
  std::vector<PathPoint> path;
  PlatformState state;

  friend bool operator==(const RunResult&, const RunResult&) = default;
};

// Nearest fixed point that is stable from at least one side, within radius.
std::optional<std::size_t> assign_fixed_point(double x, std::span<const FixedPointReport> fps, double radius);

// Fixed point reached by following the sign of (1 - iota) phi(x) - x from x:
// the next fixed point to the right when it is positive, to the left when
// negative. Empty when fps is empty.
std::optional<std::size_t> flow_fixed_point(double x, const InflowFunction& phi, std::span<const FixedPointReport> fps);

// Basin of a run that reached state st after params.n arrivals. Runs that are
// not yet committed continue on the extension stream of seed until they are
// or the extension budget runs out.
std::optional<std::size_t> committed_basin(PlatformState st, const StrategySampler& sampler, const ModelParams& params,
                                           std::uint64_t seed, TrueState truth, const InflowFunction& phi,
                                           std::span<const FixedPointReport> fps, const BasinOptions& opts);

// Sorted distinct arrival indices t in [1, n] at which the path is sampled.
std::vector<std::int64_t> log_spaced_times(std::int64_t n, int points);

// Without fixed points (fps empty) runs stay unassigned.
RunResult run_trajectory(const StrategySampler& sampler, const ModelParams& params, std::uint64_t seed,
                         const SimulationOptions& opts = {}, std::span<const FixedPointReport> fps = {});
RunResult run_trajectory(const Strategy& sigma, const ModelParams& params, std::uint64_t seed,
                         const SimulationOptions& opts = {}, std::span<const FixedPointReport> fps = {});

struct ObjectiveAggregate {
  std::string name;
  double mean = 0.0;
  double se = 0.0;
  double ci_lo = 0.0;  // mean -/+ 1.96 se
  double ci_hi = 0.0;
};

struct EnsembleStats {
  std::int64_t runs = 0;
  std::vector<FixedPointReport> fixed_points;
  std::vector<double> frequency;     // per fixed point
  std::vector<double> frequency_se;  // sqrt(p (1 - p) / runs)
  std::vector<double> cluster_mean;  // mean final_x of assigned runs, NaN when empty
  double unassigned = 0.0;
  // Share of runs whose final_x flows to each fixed point.
  std::vector<double> basin_frequency;
  std::vector<double> basin_se;
  double mean_x = 0.0;
  double mean_z = 0.0;
  // E f(x(n)) over final accuracies.
  std::vector<ObjectiveAggregate> objectives;
  // E f(x*) with x* the steady state of each run's basin: the large-n limit.
  std::vector<ObjectiveAggregate> steady_state_objectives;

  // Mass on informative / misleading steady states, within the radius.
  double informative_frequency() const;
  double misleading_frequency() const;
  // Same by basin.
  double informative_basin_frequency() const;
  double misleading_basin_frequency() const;
};

struct EnsembleOptions {
  std::int64_t runs = 1000;
  std::uint64_t base_seed = 1;
  int threads = 0;  // 0 = OpenMP default
  SimulationOptions sim;
  std::vector<Objective> objectives;
  bool keep_runs = true;
};

struct EnsembleResult {
  EnsembleStats stats;
  std::vector<RunResult> runs;  // in run order; empty unless keep_runs
};

// Run i uses seed run_seed(base_seed, i). Results do not depend on the thread
// count: runs are stored by index and reduced serially in run order.
EnsembleResult run_ensemble(const Strategy& sigma, const ModelParams& params, const EnsembleOptions& opts);
// Single-threaded reference with identical output.
EnsembleResult run_ensemble_serial(const Strategy& sigma, const ModelParams& params, const EnsembleOptions& opts);

EnsembleStats summarize_runs(std::span<const RunResult> runs, std::span<const FixedPointReport> fps,
                             const std::vector<Objective>& objectives);

// Resolves the thread count for OpenMP regions (0 = runtime default).
int resolve_threads(int requested);

}  // namespace viral
