#include <doctest.h>

#include <cmath>

#include "viral/binomial.hpp"
#include "viral/equilibrium.hpp"
#include "viral/inflow.hpp"
#include "viral/simulation.hpp"

using namespace viral;

namespace {

ModelParams env(double q, int K, int C, double lambda, std::int64_t n) {
  ModelParams p;
  p.q = q;
  p.K = K;
  p.C = C;
  p.lambda = lambda;
  p.n = n;
  return p;
}

}  // namespace

TEST_CASE("accumulator pooling and merge order") {
  const int K = 2;
  PosteriorAccumulator a(K), b(K), ab(K), ba(K);
  // cells: (-1,0) (-1,1) (-1,2) (+1,0) (+1,1) (+1,2)
  a.add_run({1, 0, 2, 0, 3, 1});
  a.add_run({0, 1, 0, 2, 1, 0});
  b.add_run({4, 0, 1, 1, 0, 2});
  ab.merge(a);
  ab.merge(b);
  ba.merge(b);
  ba.merge(a);
  const auto t1 = ab.table(10, 1.0, 5), t2 = ba.table(10, 1.0, 5);
  for (std::size_t c = 0; c < t1.cells.size(); ++c) {
    CHECK(t1.cells[c].belief == t2.cells[c].belief);
    CHECK(t1.cells[c].se == t2.cells[c].se);
  }
  // (+1, 1) pairs with (-1, 1): 4 against 1, plus one pseudo-count each.
  CHECK(t1.belief(Signal::positive, 1) == doctest::Approx(5.0 / 7.0));
  CHECK(t1.at(Signal::positive, 1).count == 4);
  CHECK(t1.at(Signal::positive, 1).mirror_count == 1);
  CHECK(t1.at(Signal::positive, 1).low_confidence);
  // (+1, 0) pairs with (-1, 2): 3 against 3.
  CHECK(t1.belief(Signal::positive, 0) == doctest::Approx(0.5));
  CHECK(t1.runs == 3);
  CHECK_THROWS_AS(a.add_run({0, 0, 0, 0, 0, 0}, 1), ParameterError);
}

TEST_CASE("early share distribution matches simulation") {
  const auto p = env(0.51, 6, 3, 1.0, 20000);
  const auto fam = deviation_family(6, 3);
  const auto sigma = fam.make(0.32);
  const int T = 200, bins = 16;
  const auto probs = early_share_distribution(sigma, p, T, bins);
  double total = 0.0;
  for (double v : probs) total += v;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  const StrategySampler sampler(sigma);
  const int N = 20000;
  std::vector<double> obs(bins, 0.0);
  for (int r = 0; r < N; ++r) {
    const auto st = simulate(sampler, p.with_n(T), run_seed(99, r), TrueState::positive, [](auto&, auto&, auto&) {});
    obs[share_bin(st.score_share(), bins)] += 1.0;
  }
  double chi2 = 0.0;
  int df = -1;
  for (int b = 0; b < bins; ++b) {
    const double e = N * probs[b];
    if (e < 5.0) continue;
    chi2 += (obs[b] - e) * (obs[b] - e) / e;
    ++df;
  }
  REQUIRE(df >= 8);
  // Loose 0.999 quantile: df + 3.3 sqrt(2 df) + 5.
  CHECK(chi2 < df + 3.3 * std::sqrt(2.0 * df) + 5.0);
  CHECK_THROWS_AS(early_share_distribution(sigma, p.with_iota(0.1), T, bins), ParameterError);
}

TEST_CASE("posteriors need a symmetric strategy") {
  Strategy::Rows neg = {{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, pos = neg;
  const auto s = Strategy::from_rows(2, 1, neg, pos);
  PosteriorOptions o;
  o.runs = 10;
  CHECK_THROWS_AS(empirical_posteriors(s, env(0.6, 2, 1, 0.5, 100), o), ParameterError);
}

TEST_CASE("parallel and serial posteriors agree exactly") {
  const auto p = env(0.55, 7, 3, 0.9, 3000);
  PosteriorOptions o;
  o.runs = 200;
  o.base_seed = 4;
  const std::vector<std::int64_t> hs = {1000, 3000};
  const auto ser = empirical_posteriors_serial(majority_rule(7, 3), p, hs, o);
  for (int threads : {1, 3}) {
    o.threads = threads;
    const auto par = empirical_posteriors(majority_rule(7, 3), p, hs, o);
    for (std::size_t j = 0; j < hs.size(); ++j)
      for (std::size_t c = 0; c < ser[j].cells.size(); ++c) {
        CHECK(par[j].cells[c].belief == ser[j].cells[c].belief);
        CHECK(par[j].cells[c].se == ser[j].cells[c].se);
      }
  }
  o.threads = 0;
  const auto a = estimate_posteriors(majority_rule(7, 3), p, hs, o, true);
  const auto b = estimate_posteriors(majority_rule(7, 3), p, hs, o, false);
  CHECK(a.basin_share == b.basin_share);
}

TEST_CASE("stratified and pooled estimates agree") {
  const auto p = env(0.51, 6, 3, 1.0, 5000);
  PosteriorOptions strat, pooled;
  strat.runs = pooled.runs = 2000;
  pooled.stratify_time = 0;
  const auto sigma = deviation_family(6, 3).make(0.3);
  const auto a = empirical_posteriors(sigma, p, strat);
  const auto b = empirical_posteriors(sigma, p, pooled);
  for (int k = 0; k <= 6; ++k) {
    const auto& ca = a.at(Signal::positive, k);
    const auto& cb = b.at(Signal::positive, k);
    if (cb.count < 1000) continue;
    CHECK(std::abs(ca.belief - cb.belief) < 3.0 * cb.se + 1e-9);
    CHECK(ca.se <= cb.se * 1.05);
  }
}

TEST_CASE("sampled positions estimate the all-positions table") {
  const auto p = env(0.55, 7, 3, 0.6, 5000);
  PosteriorOptions all, sampled;
  all.runs = sampled.runs = 400;
  sampled.positions_per_run = 50;
  const auto a = empirical_posteriors(majority_rule(7, 3), p, all);
  const auto b = empirical_posteriors(majority_rule(7, 3), p, sampled);
  for (int k = 2; k <= 5; ++k)
    CHECK(std::abs(a.belief(Signal::positive, k) - b.belief(Signal::positive, k)) <
          4.0 * b.at(Signal::positive, k).se + 1e-3);
}

TEST_CASE("steady-state beliefs with a unique steady state") {
  const auto p = env(0.55, 7, 3, 0.6, 3000);
  PosteriorOptions o;
  o.runs = 100;
  const auto est = estimate_posteriors(majority_rule(7, 3), p, {3000}, o);
  REQUIRE(est.fixed_points.size() == 1);
  CHECK(est.basin_share[0] == doctest::Approx(1.0));
  const double theta = 0.6 * est.fixed_points[0].x + 0.4 * 0.55;
  for (int k = 0; k <= 7; ++k) {
    // Closed form q b(k) / (q b(k) + (1 - q) b(K - k)), with the pseudo-counts.
    const double bk = binomial_pmf(7, theta, k), bm = binomial_pmf(7, theta, 7 - k);
    const double eps = o.smoothing / (100.0 * 3000.0);
    const double want = (0.55 * bk + eps) / (0.55 * bk + 0.45 * bm + 2.0 * eps);
    CHECK(est.steady_state.belief(Signal::positive, k) == doctest::Approx(want).epsilon(1e-6));
    CHECK(est.steady_state.at(Signal::positive, k).se == doctest::Approx(0.0));
  }
}

TEST_CASE("majority rule is a best response below the critical weight") {
  PosteriorOptions o;
  o.runs = 1000;
  for (double lambda : {0.3, 0.6}) {
    const auto p = env(0.55, 7, 3, lambda, 20000);
    const auto t = empirical_posteriors(majority_rule(7, 3), p, o);
    CHECK(self_consistency_violations(majority_rule(7, 3), t, p).empty());
    const auto br = best_response(t, p);
    CHECK(br.strategy == majority_rule(7, 3));
  }
}

TEST_CASE("majority rule is not a best response at full virality") {
  PosteriorOptions o;
  o.runs = 1000;
  const auto p = env(0.51, 6, 3, 1.0, 20000);
  const auto t = empirical_posteriors(majority_rule(6, 3), p, o);
  const auto v = self_consistency_violations(majority_rule(6, 3), t, p);
  CHECK_FALSE(v.empty());
}

TEST_CASE("deviation family") {
  const auto fam = deviation_family(6, 3);
  CHECK(fam.pivot_k == 2);
  CHECK(fam.pivot_s == Signal::positive);
  CHECK(fam.make(0.0) == majority_rule(6, 3));
  const auto s = fam.make(0.4);
  CHECK(s.is_state_symmetric(1e-15));
  CHECK(s.probability(Signal::positive, 2, 2) == doctest::Approx(0.4));
  CHECK(s.probability(Signal::positive, 2, 0) == doctest::Approx(0.6));
  CHECK(s.probability(Signal::negative, 4, 1) == doctest::Approx(0.4));
  for (int k = 0; k <= 6; ++k)
    if (k != 2) CHECK(s.expectation(Signal::positive, k) == majority_rule(6, 3).expectation(Signal::positive, k));
  CHECK_THROWS_AS(deviation_family(7, 3), ParameterError);
  CHECK(deviation_family(7, 3, 2).pivot_k == 2);
  CHECK_THROWS_AS(fam.make(1.5), ParameterError);
}

TEST_CASE("pivot detection") {
  PosteriorTable t;
  t.K = 6;
  t.cells.resize(14);
  for (int k = 0; k <= 6; ++k) t.cells[observation_cell(6, Signal::positive, k)].belief = 0.1 + 0.13 * k;
  CHECK(auto_detect_pivot(t) == 2);  // 0.36 is closest to 1/2 among k < 3
}

TEST_CASE("mixing root by interpolation") {
  const auto m = mixing_from_gaps({0.0, 0.1, 0.2}, {0.02, 0.01, -0.01}, {0.001, 0.001, 0.001}, 500, 10);
  REQUIRE(m.p_hat);
  CHECK(*m.p_hat == doctest::Approx(0.15));
  CHECK(*m.p_hat_se == doctest::Approx(0.001 / 0.2));
  CHECK_FALSE(mixing_from_gaps({0.0, 0.1}, {0.02, 0.01}, {0.0, 0.0}, 1, 1).p_hat);
  CHECK(*mixing_from_gaps({0.0, 0.1}, {0.0, 0.01}, {0.0, 0.0}, 1, 1).p_hat == 0.0);
}

TEST_CASE("limit estimate plumbing") {
  const auto p = env(0.55, 7, 3, 0.6, 2000);
  PosteriorOptions o;
  o.runs = 50;
  const auto fam = constant_family(majority_rule(7, 3), Signal::positive, 2);
  const auto est = estimate_limit_equilibrium(fam, p, {500, 1000, 2000}, {0.0, 0.5, 1.0}, o);
  CHECK(est.by_n.size() == 3);
  CHECK(est.by_n[2].n == 2000);
  CHECK_FALSE(est.limit);  // a constant family has no indifference point
  CHECK(est.steady_state.gaps.size() == 3);
  CHECK(linear_grid(0.0, 0.4, 5) == std::vector<double>{0.0, 0.1, 0.2, 0.30000000000000004, 0.4});
}
