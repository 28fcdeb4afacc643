#include "viral/equilibrium.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>

#include "viral/binomial.hpp"
#include "viral/philox.hpp"
#include "viral/simulation.hpp"

namespace viral {

PosteriorAccumulator::PosteriorAccumulator(int K, int strata)
    : K_(K),
      strata_(strata),
      runs_(strata, 0),
      sum_(static_cast<std::size_t>(strata) * 2 * (K + 1), 0.0),
      sum_sq_(sum_.size(), 0.0),
      sum_cross_(sum_.size(), 0.0) {
  if (strata < 1) throw ParameterError("posterior accumulator needs at least one stratum");
}

std::int64_t PosteriorAccumulator::runs() const {
  std::int64_t r = 0;
  for (auto v : runs_) r += v;
  return r;
}

void PosteriorAccumulator::add_run(const std::vector<std::int64_t>& counts, int stratum) {
  if (stratum < 0 || stratum >= strata_) throw ParameterError("stratum index out of range");
  const int cells = 2 * (K_ + 1);
  const std::size_t base = static_cast<std::size_t>(stratum) * cells;
  for (int c = 0; c < cells; ++c) {
    const int s = c / (K_ + 1), k = c % (K_ + 1);
    const int mirror = (1 - s) * (K_ + 1) + (K_ - k);
    const auto a = static_cast<double>(counts[c]);
    sum_[base + c] += a;
    sum_sq_[base + c] += a * a;
    sum_cross_[base + c] += a * static_cast<double>(counts[mirror]);
  }
  ++runs_[stratum];
}

void PosteriorAccumulator::merge(const PosteriorAccumulator& other) {
  if (other.K_ != K_ || other.strata_ != strata_) throw ParameterError("posterior accumulators differ in shape");
  for (std::size_t c = 0; c < sum_.size(); ++c) {
    sum_[c] += other.sum_[c];
    sum_sq_[c] += other.sum_sq_[c];
    sum_cross_[c] += other.sum_cross_[c];
  }
  for (int h = 0; h < strata_; ++h) runs_[h] += other.runs_[h];
}

PosteriorTable PosteriorAccumulator::table(std::int64_t n, double smoothing, std::int64_t low_confidence_below,
                                           const std::vector<double>& stratum_probs,
                                           std::int64_t min_stratum_runs) const {
  const bool stratified = !stratum_probs.empty();
  if (stratified && stratum_probs.size() != static_cast<std::size_t>(strata_))
    throw ParameterError("stratum probabilities do not match the accumulator");
  const int cells = 2 * (K_ + 1);

  // Groups of adjacent strata, each with enough runs for a variance.
  struct Group {
    double prob = 0.0;
    std::int64_t runs = 0;
    std::vector<double> s, ss, sx;
  };
  std::vector<Group> groups;
  const auto fresh = [&] {
    Group g;
    g.s.assign(cells, 0.0);
    g.ss.assign(cells, 0.0);
    g.sx.assign(cells, 0.0);
    return g;
  };
  Group cur = fresh();
  for (int h = 0; h < strata_; ++h) {
    cur.prob += stratified ? stratum_probs[h] : 0.0;
    cur.runs += runs_[h];
    const std::size_t base = static_cast<std::size_t>(h) * cells;
    for (int c = 0; c < cells; ++c) {
      cur.s[c] += sum_[base + c];
      cur.ss[c] += sum_sq_[base + c];
      cur.sx[c] += sum_cross_[base + c];
    }
    if (stratified && cur.runs >= min_stratum_runs) {
      groups.push_back(cur);
      cur = fresh();
    }
  }
  if (!stratified || groups.empty()) {
    if (!stratified) cur.prob = 1.0;
    groups.push_back(cur);
  } else if (cur.runs > 0 || cur.prob > 0.0) {
    Group& last = groups.back();
    last.prob += cur.prob;
    last.runs += cur.runs;
    for (int c = 0; c < cells; ++c) {
      last.s[c] += cur.s[c];
      last.ss[c] += cur.ss[c];
      last.sx[c] += cur.sx[c];
    }
  }

  PosteriorTable t;
  t.K = K_;
  t.runs = runs();
  t.n = n;
  t.cells.resize(cells);
  const double m = static_cast<double>(t.runs);
  for (int c = 0; c < cells; ++c) {
    const int s = c / (K_ + 1), k = c % (K_ + 1);
    const int mirror = (1 - s) * (K_ + 1) + (K_ - k);
    PosteriorCell& cell = t.cells[c];
    double rawA = 0.0, rawM = 0.0, EA = 0.0, EB = 0.0;
    for (const auto& g : groups) {
      rawA += g.s[c];
      rawM += g.s[mirror];
      if (g.runs == 0) continue;
      EA += g.prob * g.s[c] / static_cast<double>(g.runs);
      EB += g.prob * (g.s[c] + g.s[mirror]) / static_cast<double>(g.runs);
    }
    cell.count = static_cast<std::int64_t>(rawA);
    cell.mirror_count = static_cast<std::int64_t>(rawM);
    cell.low_confidence = cell.count < low_confidence_below;
    cell.belief = (m * EA + smoothing) / (m * EB + 2.0 * smoothing);
    if (EB <= 0.0 || t.runs < 2) {
      cell.se = 0.5;
      continue;
    }
    // Linearized ratio estimator clustered by run: residual a - R (a + a'),
    // with within-group variances when stratified.
    const double R = EA / EB;
    double var = 0.0;
    for (const auto& g : groups) {
      const double mg = static_cast<double>(g.runs);
      if (mg < 2.0) continue;
      const double sa = g.s[c], sm = g.s[mirror];
      const double saa = g.ss[c], sam = g.sx[c], smm = g.ss[mirror];
      const double se = sa - R * (sa + sm);
      const double see = saa - 2.0 * R * (saa + sam) + R * R * (saa + 2.0 * sam + smm);
      const double s2 = std::max(0.0, (see - se * se / mg) / (mg - 1.0));
      var += g.prob * g.prob * s2 / mg;
    }
    cell.se = std::sqrt(var) / EB;
  }
  return t;
}

int share_bin(double share, int bins) {
  const int b = static_cast<int>(share * bins);
  return std::clamp(b, 0, bins - 1);
}

std::vector<double> early_share_distribution(const Strategy& sigma, const ModelParams& params, std::int64_t T,
                                             int bins) {
  params.validate();
  if (params.iota != 0.0) throw ParameterError("early-state distribution assumes no bots");
  if (T < params.K || T > params.n) throw ParameterError("stratification time must lie in [K, n]");
  if (bins < 1) throw ParameterError("stratification needs at least one bin");
  const int K = params.K, C = params.C;
  const std::int64_t maxS = K + (T - K) * (C + 1);
  const std::size_t W = static_cast<std::size_t>(maxS + 1);
  // prob[cp * W + sp]: positive story count and positive score.
  std::vector<double> prob(static_cast<std::size_t>(T + 1) * W, 0.0), next(prob.size(), 0.0);
  prob[0] = 1.0;
  std::vector<double> pmf(K + 1);
  for (std::int64_t t = 0; t < T; ++t) {
    std::fill(next.begin(), next.end(), 0.0);
    const std::int64_t S = t <= K ? t : K + (t - K) * (C + 1);
    for (std::int64_t cp = 0; cp <= t; ++cp) {
      for (std::int64_t sp = cp; sp <= S; ++sp) {
        const double w = prob[cp * W + sp];
        if (w == 0.0) continue;
        if (t < K) {
          next[(cp + 1) * W + sp + 1] += w * params.q;
          next[cp * W + sp] += w * (1.0 - params.q);
          continue;
        }
        const double theta = params.lambda * static_cast<double>(sp) / static_cast<double>(S) +
                             (1.0 - params.lambda) * static_cast<double>(cp) / static_cast<double>(t);
        binomial_pmf(K, theta, pmf);
        for (Signal s : {Signal::positive, Signal::negative}) {
          const double ps = s == Signal::positive ? params.q : 1.0 - params.q;
          const std::int64_t up = s == Signal::positive ? 1 : 0;
          for (int k = 0; k <= K; ++k) {
            const double wk = w * ps * pmf[k];
            if (wk == 0.0) continue;
            const auto dist = sigma.distribution(s, k);
            for (int z = 0; z <= C; ++z)
              if (dist[z] > 0.0) next[(cp + up) * W + sp + z + up] += wk * dist[z];
          }
        }
      }
    }
    std::swap(prob, next);
  }
  std::vector<double> out(bins, 0.0);
  for (std::int64_t cp = 0; cp <= T; ++cp)
    for (std::int64_t sp = 0; sp <= maxS; ++sp) {
      const double w = prob[cp * W + sp];
      if (w != 0.0) out[share_bin(static_cast<double>(sp) / static_cast<double>(maxS), bins)] += w;
    }
  return out;
}

namespace {

struct Stratification {
  std::int64_t time = 0;  // 0: pooled
  int bins = 1;
  std::vector<double> probs;
};

struct RunSummary {
  int stratum = 0;
  PlatformState final_state;
};

// Observation counts at each horizon for one run.
RunSummary record_run(const StrategySampler& sampler, const ModelParams& params, std::uint64_t seed,
               const std::vector<std::int64_t>& horizons, std::int64_t positions_per_run,
               const Stratification& strat, std::vector<std::vector<std::int64_t>>& out) {
  const int K = params.K;
  const int cells = 2 * (K + 1);
  for (auto& v : out) v.assign(cells, 0);
  RunSummary sum;
  const auto note_stratum = [&](const PlatformState& after) {
    if (after.t == strat.time) sum.stratum = share_bin(after.score_share(), strat.bins);
  };
  if (positions_per_run == 0) {
    std::vector<std::int64_t> counts(cells, 0);
    std::size_t next = 0;
    const auto st = simulate(sampler, params, seed, TrueState::positive,
                             [&](const PlatformState&, const StepRecord& rec, const PlatformState& after) {
                               if (rec.kind == ArrivalKind::agent) ++counts[observation_cell(K, rec.s, rec.k)];
                               note_stratum(after);
                               while (next < horizons.size() && after.t == horizons[next]) out[next++] = counts;
                             });
    sum.final_state = st;
    return sum;
  }
  std::vector<std::int16_t> seq(static_cast<std::size_t>(params.n), -1);
  const auto st = simulate(sampler, params, seed, TrueState::positive,
           [&](const PlatformState&, const StepRecord& rec, const PlatformState& after) {
             if (rec.kind == ArrivalKind::agent)
               seq[after.t - 1] = static_cast<std::int16_t>(observation_cell(K, rec.s, rec.k));
             note_stratum(after);
           });
  for (std::size_t j = 0; j < horizons.size(); ++j) {
    PhiloxStream pos(seed, kPositionStream + j);
    const auto span = static_cast<double>(horizons[j] - K);
    for (std::int64_t i = 0; i < positions_per_run; ++i) {
      const auto t = K + 1 + std::min(static_cast<std::int64_t>(pos.uniform53() * span), horizons[j] - K - 1);
      const int cell = seq[t - 1];
      if (cell >= 0) ++out[j][cell];
    }
  }
  sum.final_state = st;
  return sum;
}

// Groups adjacent strata until each holds min_runs runs; returns the group of
// each stratum.
std::vector<int> group_strata(const std::vector<std::int64_t>& runs, std::int64_t min_runs) {
  std::vector<int> group(runs.size(), 0);
  int g = 0;
  std::int64_t acc = 0;
  for (std::size_t h = 0; h < runs.size(); ++h) {
    group[h] = g;
    acc += runs[h];
    if (acc >= min_runs && h + 1 < runs.size()) {
      ++g;
      acc = 0;
    }
  }
  // A short final group joins its predecessor.
  if (acc < min_runs && g > 0)
    for (auto& v : group)
      if (v == g) v = g - 1;
  return group;
}

PosteriorTable steady_state_table(const ModelParams& params, const std::vector<FixedPointReport>& fps,
                                  const std::vector<std::int64_t>& basin_counts, const Stratification& strat,
                                  double smoothing_weight, std::int64_t low_confidence_below,
                                  std::vector<double>& basin_share) {
  const int K = params.K, H = strat.bins;
  const std::size_t B = fps.size();
  const int cells = 2 * (K + 1);
  std::vector<std::int64_t> runs(H, 0);
  for (int h = 0; h < H; ++h)
    for (std::size_t b = 0; b < B; ++b) runs[h] += basin_counts[h * B + b];
  const bool stratified = !strat.probs.empty();
  const auto group = stratified ? group_strata(runs, 10) : std::vector<int>(H, 0);
  const int G = group.empty() ? 1 : group.back() + 1;
  std::vector<double> gprob(G, 0.0);
  std::vector<std::int64_t> gruns(G, 0);
  std::vector<std::vector<double>> gshare(G, std::vector<double>(B, 0.0));
  for (int h = 0; h < H; ++h) {
    gprob[group[h]] += stratified ? strat.probs[h] : 1.0;
    gruns[group[h]] += runs[h];
    for (std::size_t b = 0; b < B; ++b) gshare[group[h]][b] += static_cast<double>(basin_counts[h * B + b]);
  }
  basin_share.assign(B, 0.0);
  double total_prob = 0.0;
  for (int g = 0; g < G; ++g) {
    if (gruns[g] == 0) continue;
    total_prob += gprob[g];
    for (std::size_t b = 0; b < B; ++b) {
      gshare[g][b] /= static_cast<double>(gruns[g]);
      basin_share[b] += gprob[g] * gshare[g][b];
    }
  }
  for (auto& v : basin_share) v /= total_prob;

  // Observation frequencies at each steady state, under state +1.
  std::vector<std::vector<double>> freq(B, std::vector<double>(cells, 0.0));
  std::vector<double> pmf(K + 1);
  for (std::size_t b = 0; b < B; ++b) {
    binomial_pmf(K, params.lambda * fps[b].x + (1.0 - params.lambda) * params.q, pmf);
    for (int k = 0; k <= K; ++k) {
      freq[b][observation_cell(K, Signal::positive, k)] = params.q * pmf[k];
      freq[b][observation_cell(K, Signal::negative, k)] = (1.0 - params.q) * pmf[k];
    }
  }

  PosteriorTable t;
  t.K = K;
  t.n = 0;
  for (auto r : runs) t.runs += r;
  t.cells.resize(cells);
  for (int c = 0; c < cells; ++c) {
    const int s = c / (K + 1), k = c % (K + 1);
    const int mirror = (1 - s) * (K + 1) + (K - k);
    double A = 0.0, M = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      A += basin_share[b] * freq[b][c];
      M += basin_share[b] * freq[b][mirror];
    }
    PosteriorCell& cell = t.cells[c];
    // Pseudo-counts on the scale of one run's worth of observations.
    const double eps = smoothing_weight / static_cast<double>(std::max<std::int64_t>(t.runs, 1) * params.n);
    cell.belief = (A + eps) / (A + M + 2.0 * eps);
    cell.count = t.runs;
    cell.mirror_count = t.runs;
    cell.low_confidence = t.runs < low_confidence_below;
    if (A + M <= 0.0) {
      cell.se = 0.5;
      continue;
    }
    // Delta method over the stratified multinomial basin shares.
    std::vector<double> v(B);
    for (std::size_t b = 0; b < B; ++b) v[b] = (freq[b][c] * M - A * freq[b][mirror]) / ((A + M) * (A + M));
    double var = 0.0;
    for (int g = 0; g < G; ++g) {
      if (gruns[g] == 0) continue;
      double e1 = 0.0, e2 = 0.0;
      for (std::size_t b = 0; b < B; ++b) {
        e1 += gshare[g][b] * v[b];
        e2 += gshare[g][b] * v[b] * v[b];
      }
      const double w = gprob[g] / total_prob;
      var += w * w * std::max(0.0, e2 - e1 * e1) / static_cast<double>(gruns[g]);
    }
    cell.se = std::sqrt(var);
  }
  return t;
}

PosteriorEstimates posteriors_impl(const Strategy& sigma, const ModelParams& params,
                                   const std::vector<std::int64_t>& horizons, const PosteriorOptions& opts,
                                   bool parallel) {
  params.validate();
  if (!sigma.is_state_symmetric(1e-12))
    throw ParameterError("empirical posteriors need a state-symmetric strategy");
  if (opts.runs < 2) throw ParameterError("empirical posteriors need at least two runs");
  if (opts.positions_per_run < 0) throw ParameterError("positions_per_run must be nonnegative");
  if (horizons.empty()) throw ParameterError("posterior horizons are empty");
  for (std::size_t j = 0; j < horizons.size(); ++j) {
    if (horizons[j] <= params.K || horizons[j] > params.n)
      throw ParameterError("posterior horizon must lie in (K, n]");
    if (j > 0 && horizons[j] <= horizons[j - 1]) throw ParameterError("posterior horizons must increase");
  }
  ModelParams sim = params.with_n(horizons.back());
  const StrategySampler sampler(sigma);
  const std::size_t H = horizons.size();
  const InflowFunction phi(sigma, sim);
  const auto fps = fixed_points(phi);
  const std::size_t B = fps.size();

  Stratification strat;
  if (opts.stratify_time > 0 && params.iota == 0.0) {
    if (opts.strata < 1) throw ParameterError("stratification needs at least one stratum");
    strat.time = std::clamp<std::int64_t>(opts.stratify_time, params.K, horizons.front());
    strat.bins = opts.strata;
    strat.probs = early_share_distribution(sigma, sim, strat.time, strat.bins);
  }
  std::vector<PosteriorAccumulator> total(H, PosteriorAccumulator(params.K, strat.bins));
  std::vector<std::int64_t> basins(static_cast<std::size_t>(strat.bins) * B, 0);

  const auto body = [&](std::vector<PosteriorAccumulator>& acc, std::vector<std::int64_t>& basin,
                        std::vector<std::vector<std::int64_t>>& counts, std::int64_t i) {
    const auto seed = run_seed(opts.base_seed, static_cast<std::uint64_t>(i));
    const auto run = record_run(sampler, sim, seed, horizons, opts.positions_per_run, strat, counts);
    for (std::size_t j = 0; j < H; ++j) acc[j].add_run(counts[j], run.stratum);
    if (const auto b = committed_basin(run.final_state, sampler, sim, seed, TrueState::positive, phi, fps, opts.basin))
      ++basin[run.stratum * B + *b];
  };

  if (parallel) {
    std::exception_ptr error;
#pragma omp parallel num_threads(resolve_threads(opts.threads))
    {
      std::vector<PosteriorAccumulator> local(H, PosteriorAccumulator(params.K, strat.bins));
      std::vector<std::int64_t> local_basins(basins.size(), 0);
      std::vector<std::vector<std::int64_t>> counts(H);
#pragma omp for schedule(dynamic, 8)
      for (std::int64_t i = 0; i < opts.runs; ++i) {
        try {
          body(local, local_basins, counts, i);
        } catch (...) {
#pragma omp critical(viral_posterior_error)
          if (!error) error = std::current_exception();
        }
      }
#pragma omp critical(viral_posterior_merge)
      {
        for (std::size_t j = 0; j < H; ++j) total[j].merge(local[j]);
        for (std::size_t c = 0; c < basins.size(); ++c) basins[c] += local_basins[c];
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    std::vector<std::vector<std::int64_t>> counts(H);
    for (std::int64_t i = 0; i < opts.runs; ++i) body(total, basins, counts, i);
  }

  PosteriorEstimates out;
  for (std::size_t j = 0; j < H; ++j)
    out.by_horizon.push_back(total[j].table(horizons[j], opts.smoothing, opts.low_confidence_below, strat.probs));
  out.steady_state =
      steady_state_table(sim, fps, basins, strat, opts.smoothing, opts.low_confidence_below, out.basin_share);
  out.fixed_points = fps;
  return out;
}

}  // namespace

PosteriorTable empirical_posteriors(const Strategy& sigma, const ModelParams& params, const PosteriorOptions& opts) {
  return posteriors_impl(sigma, params, {params.n}, opts, true).by_horizon.front();
}

std::vector<PosteriorTable> empirical_posteriors(const Strategy& sigma, const ModelParams& params,
                                                 const std::vector<std::int64_t>& horizons,
                                                 const PosteriorOptions& opts) {
  return posteriors_impl(sigma, params, horizons, opts, true).by_horizon;
}

std::vector<PosteriorTable> empirical_posteriors_serial(const Strategy& sigma, const ModelParams& params,
                                                        const std::vector<std::int64_t>& horizons,
                                                        const PosteriorOptions& opts) {
  return posteriors_impl(sigma, params, horizons, opts, false).by_horizon;
}

PosteriorEstimates estimate_posteriors(const Strategy& sigma, const ModelParams& params,
                                       const std::vector<std::int64_t>& horizons, const PosteriorOptions& opts,
                                       bool parallel) {
  return posteriors_impl(sigma, params, horizons, opts, parallel);
}

namespace {

struct CellChoice {
  int z;
  bool indifferent;
};

CellChoice choose(const PosteriorCell& cell, Signal s, int k, int K, int C, double tol_se) {
  const int z_hi = max_positive_shared(C, k);
  const int z_lo = min_positive_shared(K, C, k);
  const double d = cell.belief - 0.5;
  if (std::abs(d) <= tol_se * cell.se) return {s == Signal::positive ? z_hi : z_lo, true};
  return {d > 0 ? z_hi : z_lo, false};
}

}  // namespace

BestResponse best_response(const PosteriorTable& beliefs, const ModelParams& params, const BestResponseOptions& opts) {
  const int K = params.K, C = params.C;
  if (beliefs.K != K || beliefs.cells.size() != static_cast<std::size_t>(2 * (K + 1)))
    throw ParameterError("posterior table does not cover every observation");
  std::vector<int> zneg(K + 1), zpos(K + 1);
  std::vector<bool> indiff(2 * (K + 1), false);
  for (Signal s : {Signal::negative, Signal::positive})
    for (int k = 0; k <= K; ++k) {
      const auto ch = choose(beliefs.at(s, k), s, k, K, C, opts.indifference_se);
      (s == Signal::positive ? zpos : zneg)[k] = ch.z;
      indiff[observation_cell(K, s, k)] = ch.indifferent;
    }
  return {Strategy::pure(K, C, zneg, zpos), indiff};
}

std::vector<CellMismatch> self_consistency_violations(const Strategy& sigma, const PosteriorTable& beliefs,
                                                      const ModelParams& params, const BestResponseOptions& opts) {
  const auto br = best_response(beliefs, params, opts);
  std::vector<CellMismatch> out;
  for (Signal s : {Signal::negative, Signal::positive})
    for (int k = 0; k <= params.K; ++k) {
      if (br.indifferent[observation_cell(params.K, s, k)]) continue;
      const int z = static_cast<int>(std::lround(br.strategy.expectation(s, k)));
      if (sigma.probability(s, k, z) < 1.0 - 1e-12) {
        const auto& cell = beliefs.at(s, k);
        out.push_back({s, k, cell.belief, cell.se});
      }
    }
  return out;
}

StrategyFamily deviation_family(int K, int C, std::optional<int> pivot) {
  const Strategy maj = majority_rule(K, C);
  if (!pivot) {
    if (K % 2 != 0) throw ParameterError("default pivot needs even K; pass a pivot or auto-detect one");
    pivot = K / 2 - 1;
  }
  const int pk = *pivot;
  if (pk < 0 || 2 * pk >= K) throw ParameterError("pivot must satisfy 0 <= k < K/2");
  StrategyFamily fam;
  fam.name = "deviation";
  fam.pivot_s = Signal::positive;
  fam.pivot_k = pk;
  fam.make = [maj, K, C, pk](double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("mixing probability must lie in [0, 1]");
    Strategy::Rows neg(K + 1, std::vector<double>(C + 1, 0.0)), pos = neg;
    for (int k = 0; k <= K; ++k)
      for (int z = 0; z <= C; ++z) {
        neg[k][z] = maj.probability(Signal::negative, k, z);
        pos[k][z] = maj.probability(Signal::positive, k, z);
      }
    const int z_dev = std::min(C, pk);
    const int z_maj = static_cast<int>(std::lround(maj.expectation(Signal::positive, pk)));
    pos[pk].assign(C + 1, 0.0);
    pos[pk][z_dev] += p;
    pos[pk][z_maj] += 1.0 - p;
    neg[K - pk].assign(C + 1, 0.0);
    neg[K - pk][C - z_dev] += p;
    neg[K - pk][C - z_maj] += 1.0 - p;
    return Strategy::from_rows(K, C, neg, pos);
  };
  return fam;
}

int auto_detect_pivot(const PosteriorTable& beliefs) {
  int best = 0;
  double best_d = 2.0;
  for (int k = 0; 2 * k < beliefs.K; ++k) {
    const double d = std::abs(beliefs.belief(Signal::positive, k) - 0.5);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

StrategyFamily constant_family(const Strategy& sigma, Signal pivot_s, int pivot_k) {
  return {"constant", [sigma](double) { return sigma; }, pivot_s, pivot_k};
}

MixingSolution mixing_from_gaps(std::vector<double> p_grid, std::vector<double> gaps, std::vector<double> gap_se,
                                std::int64_t n, std::int64_t runs) {
  MixingSolution sol;
  sol.n = n;
  sol.runs = runs;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] == 0.0) {
      sol.p_hat = p_grid[i];
      sol.p_hat_se = 0.0;
      break;
    }
    if (i + 1 < gaps.size() && (gaps[i] > 0) != (gaps[i + 1] > 0) && gaps[i + 1] != 0.0) {
      const double slope = (gaps[i + 1] - gaps[i]) / (p_grid[i + 1] - p_grid[i]);
      sol.p_hat = p_grid[i] - gaps[i] / slope;
      sol.p_hat_se = 0.5 * (gap_se[i] + gap_se[i + 1]) / std::abs(slope);
      break;
    }
  }
  sol.p_grid = std::move(p_grid);
  sol.gaps = std::move(gaps);
  sol.gap_se = std::move(gap_se);
  return sol;
}

MixingSolution solve_mixing_equilibrium(const StrategyFamily& family, const ModelParams& params,
                                        const std::vector<double>& p_grid, const PosteriorOptions& opts) {
  auto est = estimate_limit_equilibrium(family, params, {params.n}, p_grid, opts);
  return est.by_n.front();
}

LimitEstimate estimate_limit_equilibrium(const StrategyFamily& family, const ModelParams& params,
                                         const std::vector<std::int64_t>& n_schedule,
                                         const std::vector<double>& p_grid, const PosteriorOptions& opts,
                                         const LimitOptions& limit_opts) {
  if (p_grid.empty()) throw ParameterError("mixing grid is empty");
  if (n_schedule.empty()) throw ParameterError("agent schedule is empty");
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (p_grid[i] <= p_grid[i - 1]) throw ParameterError("mixing grid must increase");
  const ModelParams sim = params.with_n(std::max(params.n, n_schedule.back()));
  const std::size_t H = n_schedule.size();
  std::vector<std::vector<double>> gaps(H), ses(H);
  std::vector<double> ss_gaps, ss_ses;
  std::int64_t runs = 0;
  for (double p : p_grid) {
    const auto est = estimate_posteriors(family.make(p), sim, n_schedule, opts);
    for (std::size_t j = 0; j < H; ++j) {
      const auto& cell = est.by_horizon[j].at(family.pivot_s, family.pivot_k);
      gaps[j].push_back(cell.belief - 0.5);
      ses[j].push_back(cell.se);
    }
    const auto& cell = est.steady_state.at(family.pivot_s, family.pivot_k);
    ss_gaps.push_back(cell.belief - 0.5);
    ss_ses.push_back(cell.se);
    runs = est.by_horizon.front().runs;
  }
  LimitEstimate est;
  for (std::size_t j = 0; j < H; ++j)
    est.by_n.push_back(mixing_from_gaps(p_grid, gaps[j], ses[j], n_schedule[j], runs));
  est.steady_state = mixing_from_gaps(p_grid, ss_gaps, ss_ses, 0, runs);

  const std::size_t first = std::min(H - 1, static_cast<std::size_t>(std::floor(0.75 * static_cast<double>(H))));
  std::vector<double> tail;
  double se_sum = 0.0;
  for (std::size_t j = first; j < H; ++j)
    if (est.by_n[j].p_hat) {
      tail.push_back(*est.by_n[j].p_hat);
      se_sum += est.by_n[j].p_hat_se.value_or(0.0);
    }
  if (!tail.empty()) {
    const double c = static_cast<double>(tail.size());
    double mean = 0.0;
    for (double v : tail) mean += v;
    mean /= c;
    double var = 0.0;
    for (double v : tail) var += (v - mean) * (v - mean);
    const double sd_mean = tail.size() > 1 ? std::sqrt(var / (c - 1.0) / c) : 0.0;
    const double half = 1.96 * std::max(sd_mean, se_sum / c);
    est.limit = mean;
    est.ci_lo = mean - half;
    est.ci_hi = mean + half;
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    est.plateau = tail.size() == H - first && *hi - *lo <= limit_opts.plateau_tol;
  }
  return est;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 1) throw ParameterError("grid needs at least one point");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  for (int i = 0; i < count; ++i) g[i] = lo + (hi - lo) * i / (count - 1);
  g.back() = hi;
  return g;
}

}  // namespace viral
