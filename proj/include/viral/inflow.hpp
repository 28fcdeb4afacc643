#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "viral/model.hpp"
#include "viral/polynomial.hpp"

namespace viral {

/// Inflow accuracy of a fixed strategy: the expected fraction of each
/// arrival's C+1 new popularity points that lands on correct stories, scaled
/// by (1 - iota) when a fraction iota of arrivals are bots.
///
/// The feed's sampling accuracy is lambda*x + (1-lambda)*z where z, the
/// fraction of posted stories that are correct, defaults to q.
class InflowFunction {
 public:
  InflowFunction(const Strategy& sigma, const ModelParams& params);

  double operator()(double x) const { return at(x, q_); }
  double at(double x, double z) const;
  // d/dx of operator()(x).
  double derivative(double x) const;
  // (1 - iota) phi(x) - x; its zeros are the steady-state candidates.
  double excess(double x) const { return (*this)(x) - x; }
  double excess_derivative(double x) const { return derivative(x) - 1.0; }

  // excess(x) as a polynomial in x (degree <= K).
  Polynomial excess_polynomial() const;

  const ModelParams& params() const { return params_; }
  std::span<const double> share_weights() const { return weights_; }

 private:
  ModelParams params_;
  double q_;
  std::vector<double> weights_;  // q E[sigma(+1,k)] + (1-q) E[sigma(-1,k)]
};

double inflow_accuracy(const Strategy& sigma, const ModelParams& params, double x,
                       std::optional<double> z = std::nullopt);

enum class Stability { stable_both, touch_left_stable, touch_right_stable, unstable };
enum class SteadyLabel { strictly_informative, informative_boundary, strictly_misleading, misleading_boundary };

const char* to_string(Stability s);
const char* to_string(SteadyLabel l);

// Both boundary labels satisfy the weak inequalities of both classes.
constexpr bool is_misleading(SteadyLabel l) { return l != SteadyLabel::strictly_informative; }
constexpr bool is_informative(SteadyLabel l) { return l != SteadyLabel::strictly_misleading; }
// Reached with positive probability: stable from at least one side.
constexpr bool is_attainable(Stability s) { return s != Stability::unstable; }

struct FixedPointReport {
  double x = 0.0;
  double residual = 0.0;
  double sampling_accuracy = 0.0;
  Stability stability = Stability::unstable;
  SteadyLabel label = SteadyLabel::strictly_informative;
};

struct FixedPointOptions {
  int grid = 4096;                 // uniform evaluation points on [0, 1]
  double root_tol = 1e-10;         // residual bound for accepted roots
  double stability_eps = 1e-6;     // probe offset for one-sided sign tests
  double cluster_radius = 1e-5;    // roots closer than this shrink the probe offset
  double boundary_tol = 1e-9;      // |sampling accuracy - 1/2| labeled boundary
  bool certify_with_sturm = false;
};

// All fixed points of (1 - iota) phi(x) = x on [0, 1], ascending.
std::vector<FixedPointReport> fixed_points(const Strategy& sigma, const ModelParams& params,
                                           const FixedPointOptions& opts = {});
std::vector<FixedPointReport> fixed_points(const InflowFunction& phi, const FixedPointOptions& opts = {});

SteadyLabel classify_label(double sampling_accuracy, double boundary_tol = 1e-9);

// Minimum of excess over [lo, hi] with its location, from a uniform grid and
// derivative bisection around each discrete local minimum.
struct ExcessMinimum {
  double x;
  double value;
};
ExcessMinimum min_excess(const InflowFunction& phi, double lo, double hi, int grid = 4096);

struct CriticalOptions {
  double tol = 1e-10;  // final bracket width in lambda
  int grid = 4096;
  int spot_checks = 8;
};

struct CriticalWeightResult {
  double lambda_star = std::numeric_limits<double>::infinity();
  double bracket_width = 0.0;
  std::optional<double> witness_x;
  bool finite() const { return lambda_star != std::numeric_limits<double>::infinity(); }
};

// Smallest lambda at which the majority rule's inflow function has a fixed
// point in [0, 1/2], found by bisection on the predicate min excess <= 0.
CriticalWeightResult critical_virality(double q, int K, int C, const CriticalOptions& opts = {});

struct EnvironmentPoint {
  double q;
  int K;
  int C;
};

enum class StaticsDirection { q_up, c_down, k_minus_2, k_plus_1_odd, k_minus_1_odd };
const char* to_string(StaticsDirection d);

struct StaticsEntry {
  EnvironmentPoint point;
  CriticalWeightResult result;
  double lower_bound;  // 1 - 1/(2q)
  bool lower_bound_ok;
};

// lambda*(changed) >= lambda*(base), strict when lambda*(base) is finite.
struct StaticsCheck {
  StaticsDirection direction;
  std::size_t base;
  std::size_t changed;
  double base_value;
  double changed_value;
  bool direction_ok;
  bool strict_ok;
  bool flagged() const { return !direction_ok || !strict_ok; }
};

struct StaticsTable {
  std::vector<StaticsEntry> entries;
  std::vector<StaticsCheck> checks;
  bool all_ok() const;
};

StaticsTable comparative_statics_table(std::span<const EnvironmentPoint> grid,
                                       const CriticalOptions& opts = {});

struct ManipulationBound {
  double iota_bound = 1.0;
  bool region_empty = true;
  double region_upper = 0.0;  // largest x with lambda x + (1-lambda) q <= 1/2
  double argmax_x = 0.0;
  double max_ratio = 0.0;
  bool boundary_maximizer = false;
};

struct ManipulationOptions {
  double grid_step = 1e-5;
  double refine_tol = 1e-10;
};

// 1 - max x / phi_maj(x) over the misleading region, at params.lambda.
ManipulationBound manipulation_bound(const ModelParams& params, const ManipulationOptions& opts = {});

}  // namespace viral
