#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "viral/errors.hpp"

namespace viral {

inline constexpr int kMaxFeedSize = 64;

enum class Signal : int { negative = -1, positive = 1 };

constexpr int index_of(Signal s) { return s == Signal::positive ? 1 : 0; }
constexpr Signal opposite(Signal s) {
  return s == Signal::positive ? Signal::negative : Signal::positive;
}
constexpr int sign_of(Signal s) { return static_cast<int>(s); }

/// Environment of the sharing game.
///
/// Agents earn a fixed utility for every shared story that matches the state.
/// That utility is a positive scale factor with no effect on which sharing
/// choice is optimal, so it is normalized to 1 and not stored.
struct ModelParams {
  double q = 0.55;       // story precision, in (1/2, 1)
  int K = 7;             // news-feed size
  int C = 3;             // sharing capacity, 2C <= K
  double lambda = 1.0;   // virality weight, in [0, 1]
  std::int64_t n = 20000;  // agents, n > K
  double iota = 0.0;     // manipulation (bot) rate, in [0, 1)

  void validate() const;
  ModelParams with_lambda(double l) const;
  ModelParams with_iota(double i) const;
  ModelParams with_n(std::int64_t agents) const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

// Validates only the (q, K, C) part, which is all the analytic layer needs
// for the critical virality weight.
void validate_environment(double q, int K, int C);

// Feasible range of "positive stories shared" when the feed shows k positives.
constexpr int min_positive_shared(int K, int C, int k) { return C - (K - k) > 0 ? C - (K - k) : 0; }
constexpr int max_positive_shared(int C, int k) { return k < C ? k : C; }

/// Mixed sharing strategy: for each private signal s and feed count k (number
/// of positive stories among K), a distribution over z in {0..C}, the number
/// of positive stories shared.
class Strategy {
 public:
  // rows[s][k] is the probability vector over z, with s indexed by index_of().
  using Rows = std::vector<std::vector<double>>;

  // Validates feasibility and normalization. Vectors within 1e-12 of summing
  // to one are renormalized; larger deviations or mass outside the feasible
  // support throw ParameterError.
  static Strategy from_rows(int K, int C, const Rows& negative, const Rows& positive);

  // Pure strategy from the chosen z per cell.
  static Strategy pure(int K, int C, const std::vector<int>& z_negative,
                       const std::vector<int>& z_positive);

  int K() const { return K_; }
  int C() const { return C_; }

  std::span<const double> distribution(Signal s, int k) const;
  double probability(Signal s, int k, int z) const;
  // Mean number of positive stories shared; k outside [0, K] throws.
  double expectation(Signal s, int k) const;

  // sigma(s,k)(z) == sigma(-s,K-k)(C-z) for all entries, within tol.
  bool is_state_symmetric(double tol = 0.0) const;
  // Relabels positive and negative stories.
  Strategy mirrored() const;

  friend bool operator==(const Strategy&, const Strategy&) = default;

 private:
  Strategy(int K, int C) : K_(K), C_(C) {}
  std::size_t offset(Signal s, int k) const {
    return (static_cast<std::size_t>(index_of(s)) * (K_ + 1) + k) * (C_ + 1);
  }
  void finalize();

  int K_ = 0;
  int C_ = 0;
  std::vector<double> probs_;
  std::vector<double> means_;
};

// How the majority rule resolves the one-vote-margin cell that is an exact
// tie in evidence when lambda = 0 and K is odd (feed majority of one story
// against the private signal).
enum class MajorityTieBreak {
  feed,    // follow the feed majority (the standard rule)
  signal,  // follow the private signal in that cell
};

// Share C copies of the feed-majority realization; an even split is broken in
// favor of the private signal.
Strategy majority_rule(const ModelParams& params, MajorityTieBreak tie = MajorityTieBreak::feed);
Strategy majority_rule(int K, int C, MajorityTieBreak tie = MajorityTieBreak::feed);

double strategy_expectation(const Strategy& sigma, Signal s, int k);

// Probability that a single feed slot shows a correct story: lambda x + (1 - lambda) z,
// where z defaults to the story precision q.
double sampling_accuracy(double x, const ModelParams& params, std::optional<double> z = std::nullopt);

}  // namespace viral
