#include "viral/simulation.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "viral/binomial.hpp"

namespace viral {

double PlatformState::accuracy(TrueState truth) const {
  const double share = score_share();
  return truth == TrueState::positive ? share : 1.0 - share;
}

double PlatformState::posted_accuracy(TrueState truth) const {
  const double share = count_share();
  return truth == TrueState::positive ? share : 1.0 - share;
}

void check_invariants(const PlatformState& st, const ModelParams& params) {
  const auto fail = [&](const char* what) {
    std::ostringstream os;
    os << "platform state identity violated at t=" << st.t << ": " << what;
    throw NumericalError(os.str());
  };
  if (st.score_pos < st.count_pos || st.score_neg < st.count_neg) fail("score below story count");
  const std::int64_t K = params.K;
  if (st.t <= K) {
    if (st.count_pos + st.count_neg != st.t || st.score_pos + st.score_neg != st.t || st.bots != 0)
      fail("initial posts");
    return;
  }
  if (st.count_pos + st.count_neg != K + (st.t - K - st.bots)) fail("story count");
  if (st.score_pos + st.score_neg != K + (st.t - K - st.idle_bots) * (params.C + 1)) fail("total score");
}

double feed_positive_probability(const PlatformState& st, const ModelParams& params) {
  return params.lambda * st.score_share() + (1.0 - params.lambda) * st.count_share();
}

int sample_feed_count(const PlatformState& st, const ModelParams& params, double u) {
  if (st.t < params.K) throw SequencingError("feed requested before K stories were posted");
  return sample_binomial(params.K, feed_positive_probability(st, params), u);
}

StrategySampler::StrategySampler(const Strategy& sigma) : sigma_(sigma), K_(sigma.K()), C_(sigma.C()) {
  const int cells = 2 * (K_ + 1);
  pure_.assign(cells, -1);
  cumulative_.assign(static_cast<std::size_t>(cells) * (C_ + 1), 0.0);
  for (Signal s : {Signal::negative, Signal::positive}) {
    for (int k = 0; k <= K_; ++k) {
      const int cell = index_of(s) * (K_ + 1) + k;
      const auto dist = sigma.distribution(s, k);
      double acc = 0.0;
      int support = 0, last = 0;
      for (int z = 0; z <= C_; ++z) {
        acc += dist[z];
        cumulative_[cell * (C_ + 1) + z] = acc;
        if (dist[z] > 0.0) {
          ++support;
          last = z;
        }
      }
      cumulative_[cell * (C_ + 1) + last] = 1.0;
      for (int z = last + 1; z <= C_; ++z) cumulative_[cell * (C_ + 1) + z] = 1.0;
      if (support == 1) pure_[cell] = last;
    }
  }
}

int StrategySampler::draw(Signal s, int k, PhiloxStream& rng) const {
  const int cell = index_of(s) * (K_ + 1) + k;
  if (pure_[cell] >= 0) return pure_[cell];
  const double u = rng.uniform();
  const double* cum = cumulative_.data() + cell * (C_ + 1);
  int z = 0;
  while (u >= cum[z]) ++z;
  return z;
}

StepRecord advance(PlatformState& st, const StrategySampler& sampler, const ModelParams& params,
                   PhiloxStream& rng, TrueState truth) {
  StepRecord rec;
  const Signal correct = truth == TrueState::positive ? Signal::positive : Signal::negative;
  const auto post = [&](Signal s, std::int64_t shared_pos) {
    const std::int64_t shared_neg = st.t < params.K ? 0 : params.C - shared_pos;
    if (s == Signal::positive) {
      ++st.count_pos;
      st.score_pos += shared_pos + 1;
      st.score_neg += shared_neg;
    } else {
      ++st.count_neg;
      st.score_pos += shared_pos;
      st.score_neg += shared_neg + 1;
    }
  };

  if (st.t < params.K) {
    rec.s = rng.bernoulli(params.q) ? correct : opposite(correct);
    post(rec.s, 0);
    ++st.t;
    return rec;
  }
  if (params.iota > 0.0 && rng.bernoulli(params.iota)) {
    // Bots add C+1 points to incorrect stories, if any exist.
    ++st.bots;
    std::int64_t& target_count = correct == Signal::positive ? st.count_neg : st.count_pos;
    std::int64_t& target_score = correct == Signal::positive ? st.score_neg : st.score_pos;
    if (target_count > 0) {
      target_score += params.C + 1;
      rec.kind = ArrivalKind::bot;
    } else {
      ++st.idle_bots;
      rec.kind = ArrivalKind::idle_bot;
    }
    ++st.t;
    return rec;
  }
  rec.kind = ArrivalKind::agent;
  rec.s = rng.bernoulli(params.q) ? correct : opposite(correct);
  rec.k = sample_feed_count(st, params, rng.uniform());
  rec.z = sampler.draw(rec.s, rec.k, rng);
  post(rec.s, rec.z);
  ++st.t;
  return rec;
}

std::optional<std::size_t> assign_fixed_point(double x, std::span<const FixedPointReport> fps, double radius) {
  std::optional<std::size_t> best;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < fps.size(); ++i) {
    if (!is_attainable(fps[i].stability)) continue;
    const double d = std::abs(x - fps[i].x);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  if (best_d > radius) return std::nullopt;
  return best;
}

std::optional<std::size_t> flow_fixed_point(double x, const InflowFunction& phi, std::span<const FixedPointReport> fps) {
  if (fps.empty()) return std::nullopt;
  const double g = phi.excess(x);
  if (g > 0.0) {
    for (std::size_t i = 0; i < fps.size(); ++i)
      if (fps[i].x > x) return i;
    return fps.size() - 1;
  }
  if (g < 0.0) {
    for (std::size_t i = fps.size(); i-- > 0;)
      if (fps[i].x < x) return i;
    return 0;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < fps.size(); ++i)
    if (std::abs(fps[i].x - x) < std::abs(fps[best].x - x)) best = i;
  return best;
}

namespace {

bool committed(double x, std::size_t target, std::span<const FixedPointReport> fps, double margin) {
  for (std::size_t i = 0; i < fps.size(); ++i)
    if (i != target && std::abs(fps[i].x - x) <= margin) return false;
  return true;
}

}  // namespace

std::optional<std::size_t> committed_basin(PlatformState st, const StrategySampler& sampler, const ModelParams& params,
                                           std::uint64_t seed, TrueState truth, const InflowFunction& phi,
                                           std::span<const FixedPointReport> fps, const BasinOptions& opts) {
  if (fps.empty()) return std::nullopt;
  auto basin = flow_fixed_point(st.accuracy(truth), phi, fps);
  if (opts.margin <= 0.0 || committed(st.accuracy(truth), *basin, fps, opts.margin)) return basin;
  PhiloxStream rng(seed, kExtensionStream);
  const std::int64_t stop = st.t + opts.max_extension * params.n;
  while (st.t < stop) {
    for (int i = 0; i < 64; ++i) advance(st, sampler, params, rng, truth);
    const double x = st.accuracy(truth);
    basin = flow_fixed_point(x, phi, fps);
    if (committed(x, *basin, fps, opts.margin)) break;
  }
  return basin;
}

std::vector<std::int64_t> log_spaced_times(std::int64_t n, int points) {
  std::vector<std::int64_t> ts;
  if (points <= 0 || n <= 0) return ts;
  if (points == 1) return {n};
  const double ln = std::log(static_cast<double>(n));
  for (int i = 0; i < points; ++i) {
    auto t = static_cast<std::int64_t>(std::llround(std::exp(ln * i / (points - 1))));
    t = std::clamp<std::int64_t>(t, 1, n);
    if (ts.empty() || t > ts.back()) ts.push_back(t);
  }
  if (ts.back() != n) ts.push_back(n);
  return ts;
}

RunResult run_trajectory(const StrategySampler& sampler, const ModelParams& params, std::uint64_t seed,
                         const SimulationOptions& opts, std::span<const FixedPointReport> fps) {
  RunResult res;
  res.seed = seed;
  const auto times = log_spaced_times(params.n, opts.path_points);
  std::size_t next = 0;
  const bool check = opts.check_every_step;
  res.state = simulate(sampler, params, seed, opts.truth,
                       [&](const PlatformState&, const StepRecord&, const PlatformState& after) {
                         if (check) check_invariants(after, params);
                         if (next < times.size() && after.t == times[next]) {
                           res.path.push_back({after.t, after.accuracy(opts.truth), after.posted_accuracy(opts.truth)});
                           ++next;
                         }
                       });
  res.final_x = res.state.accuracy(opts.truth);
  res.final_z = res.state.posted_accuracy(opts.truth);
  res.assigned_fixed_point = assign_fixed_point(res.final_x, fps, opts.classify_radius);
  if (!fps.empty())
    res.basin = committed_basin(res.state, sampler, params, seed, opts.truth, InflowFunction(sampler.strategy(), params),
                                fps, opts.basin);
  return res;
}

RunResult run_trajectory(const Strategy& sigma, const ModelParams& params, std::uint64_t seed,
                         const SimulationOptions& opts, std::span<const FixedPointReport> fps) {
  params.validate();
  return run_trajectory(StrategySampler(sigma), params, seed, opts, fps);
}

double EnsembleStats::informative_frequency() const {
  double f = 0.0;
  for (std::size_t i = 0; i < fixed_points.size(); ++i)
    if (fixed_points[i].label != SteadyLabel::strictly_misleading) f += frequency[i];
  return f;
}

double EnsembleStats::misleading_frequency() const {
  double f = 0.0;
  for (std::size_t i = 0; i < fixed_points.size(); ++i)
    if (is_misleading(fixed_points[i].label)) f += frequency[i];
  return f;
}

double EnsembleStats::informative_basin_frequency() const {
  double f = 0.0;
  for (std::size_t i = 0; i < fixed_points.size(); ++i)
    if (fixed_points[i].label != SteadyLabel::strictly_misleading) f += basin_frequency[i];
  return f;
}

double EnsembleStats::misleading_basin_frequency() const {
  double f = 0.0;
  for (std::size_t i = 0; i < fixed_points.size(); ++i)
    if (is_misleading(fixed_points[i].label)) f += basin_frequency[i];
  return f;
}

EnsembleStats summarize_runs(std::span<const RunResult> runs, std::span<const FixedPointReport> fps,
                             const std::vector<Objective>& objectives) {
  EnsembleStats st;
  st.runs = static_cast<std::int64_t>(runs.size());
  st.fixed_points.assign(fps.begin(), fps.end());
  const double m = static_cast<double>(runs.size());
  std::vector<double> count(fps.size(), 0.0), xsum(fps.size(), 0.0);
  double unassigned = 0.0, sx = 0.0, sz = 0.0;
  std::vector<double> f1(objectives.size(), 0.0), f2(objectives.size(), 0.0);
  std::vector<double> g1(objectives.size(), 0.0), g2(objectives.size(), 0.0);
  std::vector<double> basin(fps.size(), 0.0);
  for (const auto& r : runs) {
    if (r.basin) {
      basin[*r.basin] += 1.0;
      for (std::size_t j = 0; j < objectives.size(); ++j) {
        const double v = objectives[j](fps[*r.basin].x);
        g1[j] += v;
        g2[j] += v * v;
      }
    }
    if (r.assigned_fixed_point) {
      count[*r.assigned_fixed_point] += 1.0;
      xsum[*r.assigned_fixed_point] += r.final_x;
    } else {
      unassigned += 1.0;
    }
    sx += r.final_x;
    sz += r.final_z;
    for (std::size_t j = 0; j < objectives.size(); ++j) {
      const double v = objectives[j](r.final_x);
      f1[j] += v;
      f2[j] += v * v;
    }
  }
  for (std::size_t i = 0; i < fps.size(); ++i) {
    const double p = m > 0 ? count[i] / m : 0.0;
    st.frequency.push_back(p);
    st.frequency_se.push_back(m > 0 ? std::sqrt(p * (1.0 - p) / m) : 0.0);
    st.cluster_mean.push_back(count[i] > 0 ? xsum[i] / count[i] : std::numeric_limits<double>::quiet_NaN());
    const double b = m > 0 ? basin[i] / m : 0.0;
    st.basin_frequency.push_back(b);
    st.basin_se.push_back(m > 0 ? std::sqrt(b * (1.0 - b) / m) : 0.0);
  }
  st.unassigned = m > 0 ? unassigned / m : 0.0;
  st.mean_x = m > 0 ? sx / m : 0.0;
  st.mean_z = m > 0 ? sz / m : 0.0;
  const auto aggregate = [](const std::string& name, double s1, double s2, double cnt) {
    ObjectiveAggregate a;
    a.name = name;
    a.mean = cnt > 0 ? s1 / cnt : 0.0;
    const double var = cnt > 1 ? std::max(0.0, (s2 - cnt * a.mean * a.mean) / (cnt - 1)) : 0.0;
    a.se = cnt > 0 ? std::sqrt(var / cnt) : 0.0;
    a.ci_lo = a.mean - 1.96 * a.se;
    a.ci_hi = a.mean + 1.96 * a.se;
    return a;
  };
  double classified = 0.0;
  for (double b : basin) classified += b;
  for (std::size_t j = 0; j < objectives.size(); ++j) {
    st.objectives.push_back(aggregate(objectives[j].name(), f1[j], f2[j], m));
    if (!fps.empty()) st.steady_state_objectives.push_back(aggregate(objectives[j].name(), g1[j], g2[j], classified));
  }
  return st;
}

int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

namespace {

EnsembleResult ensemble_impl(const Strategy& sigma, const ModelParams& params, const EnsembleOptions& opts,
                             bool parallel) {
  params.validate();
  if (opts.runs < 1) throw ParameterError("ensemble needs at least one run");
  const auto fps = fixed_points(sigma, params);
  const StrategySampler sampler(sigma);
  std::vector<RunResult> runs(static_cast<std::size_t>(opts.runs));
  const auto one = [&](std::int64_t i) {
    runs[i] = run_trajectory(sampler, params, run_seed(opts.base_seed, static_cast<std::uint64_t>(i)), opts.sim, fps);
  };
  if (parallel) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 8) num_threads(resolve_threads(opts.threads))
    for (std::int64_t i = 0; i < opts.runs; ++i) {
      try {
        one(i);
      } catch (...) {
#pragma omp critical(viral_ensemble_error)
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (std::int64_t i = 0; i < opts.runs; ++i) one(i);
  }
  EnsembleResult res;
  res.stats = summarize_runs(runs, fps, opts.objectives);
  if (opts.keep_runs) res.runs = std::move(runs);
  return res;
}

}  // namespace

EnsembleResult run_ensemble(const Strategy& sigma, const ModelParams& params, const EnsembleOptions& opts) {
  return ensemble_impl(sigma, params, opts, true);
}

EnsembleResult run_ensemble_serial(const Strategy& sigma, const ModelParams& params, const EnsembleOptions& opts) {
  return ensemble_impl(sigma, params, opts, false);
}

}  // namespace viral
