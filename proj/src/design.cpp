#include "viral/design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace viral {

EquilibriumCatalog::EquilibriumCatalog(const ModelParams& env)
    : EquilibriumCatalog(env, critical_virality(env.q, env.K, env.C).lambda_star) {}

EquilibriumCatalog::EquilibriumCatalog(const ModelParams& env, double lambda_star)
    : env_(env), lambda_star_(lambda_star) {
  validate_environment(env.q, env.K, env.C);
}

void EquilibriumCatalog::supply(double lambda, Strategy sigma, std::string label) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("supplied equilibrium needs lambda in [0, 1]");
  if (sigma.K() != env_.K || sigma.C() != env_.C)
    throw ParameterError("supplied equilibrium has the wrong feed size or capacity");
  supplied_.insert_or_assign(lambda, EquilibriumEntry{std::move(sigma), std::move(label)});
}

bool EquilibriumCatalog::resolved(double lambda) const {
  for (const auto& [l, e] : supplied_)
    if (std::abs(l - lambda) <= 1e-9) return true;
  return lambda < lambda_star_;
}

EquilibriumEntry EquilibriumCatalog::at(double lambda) const {
  for (const auto& [l, e] : supplied_)
    if (std::abs(l - lambda) <= 1e-9) return e;
  if (lambda < lambda_star_) return {majority_rule(env_.K, env_.C), "majority"};
  std::ostringstream os;
  os << "equilibrium unresolved at lambda=" << lambda << " (critical weight " << lambda_star_
     << "); supply a strategy for this weight";
  throw EquilibriumUnresolved(os.str());
}

std::string to_string(PayoffEstimator e) { return e == PayoffEstimator::steady_state ? "steady_state" : "final_state"; }

PayoffEstimator payoff_estimator_from_string(const std::string& name) {
  if (name == "steady_state") return PayoffEstimator::steady_state;
  if (name == "final_state") return PayoffEstimator::final_state;
  throw ParameterError("unknown payoff estimator '" + name + "' (expected steady_state or final_state)");
}

std::vector<PayoffEstimate> platform_payoff(const std::vector<Objective>& objectives, const ModelParams& params,
                                            const EquilibriumCatalog& catalog, const PayoffOptions& opts) {
  params.validate();
  if (objectives.empty()) throw ParameterError("no objective to evaluate");
  const auto eq = catalog.at(params.lambda);
  EnsembleOptions eo;
  eo.runs = opts.runs;
  eo.base_seed = opts.base_seed;
  eo.threads = opts.threads;
  eo.objectives = objectives;
  eo.keep_runs = false;
  const auto res = run_ensemble(eq.strategy, params, eo);
  std::vector<PayoffEstimate> out;
  for (std::size_t j = 0; j < objectives.size(); ++j) {
    for (auto e : {PayoffEstimator::steady_state, PayoffEstimator::final_state}) {
      const auto& aggs = e == PayoffEstimator::steady_state ? res.stats.steady_state_objectives : res.stats.objectives;
      if (j >= aggs.size()) continue;
      const auto& a = aggs[j];
      out.push_back({objectives[j].name(), e, params.lambda, eq.label, res.stats.runs, a.mean, a.ci_lo, a.ci_hi});
    }
  }
  return out;
}

std::vector<PayoffEstimate> DesignReport::for_objective(const std::string& name, PayoffEstimator e) const {
  std::vector<PayoffEstimate> out;
  for (const auto& est : estimates)
    if (est.objective == name && est.estimator == e) out.push_back(est);
  return out;
}

DesignReport optimize_lambda(const std::vector<Objective>& objectives, const ModelParams& params,
                             const std::vector<double>& lambda_grid, const EquilibriumCatalog& catalog,
                             const PayoffOptions& opts, PayoffEstimator primary) {
  if (lambda_grid.empty()) throw ParameterError("lambda grid is empty");
  for (double l : lambda_grid)
    if (!(l >= 0.0 && l <= 1.0)) throw ParameterError("lambda grid must lie in [0, 1]");
  // Resolve every point before spending time on ensembles.
  for (double l : lambda_grid) catalog.at(l);

  DesignReport rep;
  rep.params = params;
  rep.lambda_star = catalog.lambda_star();
  rep.lambda_grid = lambda_grid;
  rep.primary = primary;
  for (double l : lambda_grid) {
    const auto est = platform_payoff(objectives, params.with_lambda(l), catalog, opts);
    rep.equilibria.push_back(catalog.at(l).label);
    rep.estimates.insert(rep.estimates.end(), est.begin(), est.end());
  }

  std::vector<double> sorted = lambda_grid;
  std::sort(sorted.begin(), sorted.end());
  double step = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) step = std::max(step, sorted[i] - sorted[i - 1]);
  for (const auto& f : objectives) {
    const auto rows = rep.for_objective(f.name(), primary);
    if (rows.empty()) continue;
    const auto best = std::max_element(rows.begin(), rows.end(),
                                       [](const auto& a, const auto& b) { return a.estimate < b.estimate; });
    rep.argmax[f.name()] = best->lambda;
    rep.argmax_at_critical[f.name()] = best->lambda >= rep.lambda_star - step - 1e-12;
  }
  return rep;
}

RobustnessReport robustness_report(const ModelParams& params, const std::vector<double>& iota_grid,
                                   const RobustnessOptions& opts) {
  params.validate();
  const auto crit = critical_virality(params.q, params.K, params.C);
  if (params.lambda >= crit.lambda_star) {
    std::ostringstream os;
    os << "robustness analysis needs lambda below the critical weight " << crit.lambda_star
       << "; the manipulation bound says nothing above it";
    throw ParameterError(os.str());
  }
  if (iota_grid.empty()) throw ParameterError("manipulation grid is empty");
  for (std::size_t i = 0; i < iota_grid.size(); ++i) {
    if (!(iota_grid[i] >= 0.0 && iota_grid[i] < 1.0)) throw ParameterError("manipulation rates must lie in [0, 1)");
    if (i > 0 && iota_grid[i] <= iota_grid[i - 1]) throw ParameterError("manipulation grid must increase");
  }

  RobustnessReport rep;
  rep.params = params;
  rep.bound = manipulation_bound(params);
  const Strategy maj = majority_rule(params.K, params.C);
  std::optional<double> prev_x;
  for (double iota : iota_grid) {
    const ModelParams p = params.with_iota(iota);
    RobustnessPoint pt;
    pt.iota = iota;
    pt.fixed_points = fixed_points(maj, p);
    for (const auto& fp : pt.fixed_points) {
      if (is_misleading(fp.label)) ++pt.misleading;
      if (is_informative(fp.label)) pt.informative_x = fp.x;
    }
    if (iota < rep.bound.iota_bound && pt.misleading > 0) rep.no_misleading_below_bound = false;
    if (pt.informative_x) {
      if (prev_x && *pt.informative_x > *prev_x + 1e-9) rep.informative_nonincreasing = false;
      prev_x = pt.informative_x;
    }
    if (opts.runs > 0) {
      EnsembleOptions eo;
      eo.runs = opts.runs;
      eo.base_seed = opts.base_seed;
      eo.threads = opts.threads;
      eo.keep_runs = false;
      const auto res = run_ensemble(maj, p, eo);
      pt.frequency = res.stats.frequency;
      pt.cluster_mean = res.stats.cluster_mean;
      pt.unassigned = res.stats.unassigned;
      for (std::size_t i = 0; i < pt.fixed_points.size(); ++i)
        if (!std::isnan(pt.cluster_mean[i]))
          pt.max_cluster_gap = std::max(pt.max_cluster_gap, std::abs(pt.cluster_mean[i] - pt.fixed_points[i].x));
      if (pt.max_cluster_gap > opts.agreement_tol) rep.clusters_agree = false;
    }
    rep.points.push_back(std::move(pt));
  }

  std::ostringstream diag;
  if (rep.bound.region_empty) {
    diag << "no misleading region at this lambda: sampling accuracy exceeds 1/2 everywhere";
  } else if (rep.bound.iota_bound <= 0.0) {
    diag << "bound is zero: a misleading fixed point exists without manipulation";
  } else {
    const double t = std::min(rep.bound.iota_bound + opts.threshold_offset, 1.0 - 1e-12);
    rep.threshold_iota = t;
    for (const auto& fp : fixed_points(maj, params.with_iota(t)))
      if (is_misleading(fp.label)) ++rep.misleading_at_threshold;
    diag << "x/phi(x) is maximized over the misleading region at x=" << rep.bound.argmax_x << ", "
         << (rep.bound.boundary_maximizer ? "on its boundary" : "in its interior") << "; ";
    if (rep.misleading_at_threshold > 0)
      diag << "a misleading fixed point appears just above the bound, so the bound is tight";
    else if (rep.bound.boundary_maximizer)
      diag << "no misleading fixed point just above the bound: the maximizer sits where sampling accuracy is "
              "exactly 1/2, so the first crossing is a boundary state";
    else
      diag << "no misleading fixed point just above the bound";
  }
  rep.diagnosis = diag.str();
  return rep;
}

}  // namespace viral
