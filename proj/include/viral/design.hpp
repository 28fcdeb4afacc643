#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "viral/inflow.hpp"
#include "viral/model.hpp"
#include "viral/objective.hpp"
#include "viral/simulation.hpp"

namespace viral {

struct EquilibriumEntry {
  Strategy strategy;
  std::string label;  // e.g. "majority" or "deviation:p=0.32"
};

/// Equilibrium strategy per virality weight. Below the critical weight the
/// majority rule is used; at or above it a strategy must be supplied.
class EquilibriumCatalog {
 public:
  // Computes the critical weight for (q, K, C).
  explicit EquilibriumCatalog(const ModelParams& env);
  EquilibriumCatalog(const ModelParams& env, double lambda_star);

  // Explicit strategy at one weight; overrides the majority rule there too.
  void supply(double lambda, Strategy sigma, std::string label);

  // Throws EquilibriumUnresolved for lambda >= lambda* without a supplied entry.
  EquilibriumEntry at(double lambda) const;
  bool resolved(double lambda) const;
  double lambda_star() const { return lambda_star_; }

 private:
  ModelParams env_;
  double lambda_star_;
  std::map<double, EquilibriumEntry> supplied_;
};

enum class PayoffEstimator {
  steady_state,  // E f(x*) over the steady states runs are carried to
  final_state,   // E f(x(n)) at the simulated horizon
};

std::string to_string(PayoffEstimator e);
PayoffEstimator payoff_estimator_from_string(const std::string& name);

struct PayoffEstimate {
  std::string objective;
  PayoffEstimator estimator = PayoffEstimator::steady_state;
  double lambda = 0.0;
  std::string equilibrium;
  std::int64_t runs = 0;
  double estimate = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
};

struct PayoffOptions {
  std::int64_t runs = 2000;
  std::uint64_t base_seed = 1;
  int threads = 0;
};

// Both estimators for each objective at params.lambda, from one ensemble.
std::vector<PayoffEstimate> platform_payoff(const std::vector<Objective>& objectives, const ModelParams& params,
                                            const EquilibriumCatalog& catalog, const PayoffOptions& opts);

struct DesignReport {
  ModelParams params;
  double lambda_star = 0.0;
  std::vector<double> lambda_grid;
  std::vector<std::string> equilibria;  // per grid point
  std::vector<PayoffEstimate> estimates;
  PayoffEstimator primary = PayoffEstimator::steady_state;
  // Per objective, by the primary estimator.
  std::map<std::string, double> argmax;
  // argmax >= lambda* - grid step, the structural prediction for increasing f.
  std::map<std::string, bool> argmax_at_critical;

  std::vector<PayoffEstimate> for_objective(const std::string& name, PayoffEstimator e) const;
};

// Grid points at or above lambda* need a supplied equilibrium.
DesignReport optimize_lambda(const std::vector<Objective>& objectives, const ModelParams& params,
                             const std::vector<double>& lambda_grid, const EquilibriumCatalog& catalog,
                             const PayoffOptions& opts, PayoffEstimator primary = PayoffEstimator::steady_state);

struct RobustnessOptions {
  std::int64_t runs = 500;
  std::uint64_t base_seed = 1;
  int threads = 0;
  double agreement_tol = 0.03;    // ensemble cluster mean vs fixed point
  double threshold_offset = 1e-6;  // probe just above the bound
};

struct RobustnessPoint {
  double iota = 0.0;
  std::vector<FixedPointReport> fixed_points;
  int misleading = 0;
  std::optional<double> informative_x;  // largest informative fixed point
  std::vector<double> frequency;        // ensemble, per fixed point
  std::vector<double> cluster_mean;     // NaN for empty clusters
  double max_cluster_gap = 0.0;         // over nonempty clusters
  double unassigned = 0.0;
};

struct RobustnessReport {
  ModelParams params;
  ManipulationBound bound;
  std::vector<RobustnessPoint> points;
  bool no_misleading_below_bound = true;
  bool informative_nonincreasing = true;
  bool clusters_agree = true;
  // Fixed points at bound + threshold_offset (bound < 1 only).
  std::optional<double> threshold_iota;
  int misleading_at_threshold = 0;
  std::string diagnosis;
};

// Requires params.lambda < lambda*; runs the majority rule with bots at each
// grid rate (ensembles skipped when opts.runs == 0).
RobustnessReport robustness_report(const ModelParams& params, const std::vector<double>& iota_grid,
                                   const RobustnessOptions& opts);

}  // namespace viral
