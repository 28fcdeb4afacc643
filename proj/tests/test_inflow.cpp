#include <doctest.h>

#include <cmath>
#include <random>
#include <tuple>

#include "oracles.hpp"
#include "viral/inflow.hpp"

using namespace viral;

namespace {

ModelParams env(double q, int K, int C, double lambda, double iota = 0.0) {
  ModelParams p;
  p.q = q;
  p.K = K;
  p.C = C;
  p.lambda = lambda;
  p.iota = iota;
  return p;
}

// Sign changes of the brute-force excess on a uniform grid.
int grid_crossings(const Strategy& s, const ModelParams& p, int points) {
  int count = 0;
  double prev = oracle::inflow_bruteforce(s, p, 0.0);
  for (int i = 1; i <= points; ++i) {
    const double x = static_cast<double>(i) / points;
    const double g = oracle::inflow_bruteforce(s, p, x) - x;
    if ((g > 0) != (prev > 0)) ++count;
    prev = g;
  }
  return count;
}

double grid_min_excess(const Strategy& s, const ModelParams& p, double lo, double hi, int points) {
  double m = 1e300;
  for (int i = 0; i <= points; ++i) {
    const double x = lo + (hi - lo) * i / points;
    m = std::min(m, oracle::inflow_bruteforce(s, p, x) - x);
  }
  return m;
}

}  // namespace

TEST_CASE("two-story feed closed form") {
  const auto p = env(0.55, 2, 1, 1.0);
  const InflowFunction phi(majority_rule(2, 1), p);
  // (q + theta^2 + 2 theta (1 - theta) q) / 2 at theta = 1/2
  CHECK(phi(0.5) == doctest::Approx(0.5375).epsilon(1e-14));
  const auto fps = fixed_points(phi);
  REQUIRE(fps.size() == 1);
  CHECK(fps[0].x == doctest::Approx((-9.0 + std::sqrt(103.0)) / 2.0).epsilon(1e-10));
  CHECK(fps[0].stability == Stability::stable_both);
  CHECK(fps[0].label == SteadyLabel::strictly_informative);
}

TEST_CASE("inflow matches slot-by-slot enumeration") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int K = 2 + static_cast<int>(u(rng) * 9);
    const int C = 1 + static_cast<int>(u(rng) * (K / 2));
    const auto p = env(0.5 + 0.5 * (0.001 + 0.998 * u(rng)), K, C, u(rng), 0.5 * u(rng));
    const auto s = oracle::random_strategy(K, C, rng);
    const double x = u(rng);
    const double got = InflowFunction(s, p)(x);
    worst = std::max(worst, std::abs(got - oracle::inflow_bruteforce(s, p, x)));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("derivative matches central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int K = 2 + static_cast<int>(u(rng) * 11);
    const int C = 1 + static_cast<int>(u(rng) * (K / 2));
    const auto p = env(0.51 + 0.48 * u(rng), K, C, u(rng), 0.3 * u(rng));
    const InflowFunction phi(oracle::random_strategy(K, C, rng), p);
    const double x = 0.01 + 0.98 * u(rng), h = 1e-5;
    const double fd = (phi(x + h) - phi(x - h)) / (2 * h);
    CHECK(std::abs(phi.derivative(x) - fd) < 1e-6);
  }
}

TEST_CASE("excess polynomial agrees with direct evaluation") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = env(0.6, 9, 4, u(rng), 0.2 * u(rng));
    const InflowFunction phi(oracle::random_strategy(9, 4, rng), p);
    const auto poly = phi.excess_polynomial();
    const double x = u(rng);
    CHECK(std::abs(static_cast<double>(poly(x)) - phi.excess(x)) < 1e-12);
  }
}

TEST_CASE("without virality the inflow is constant") {
  const auto p = env(0.55, 7, 3, 0.0);
  const auto maj = majority_rule(7, 3);
  const InflowFunction phi(maj, p);
  CHECK(phi(0.1) == doctest::Approx(phi(0.9)).epsilon(1e-15));
  const auto fps = fixed_points(phi);
  REQUIRE(fps.size() == 1);
  CHECK(fps[0].x == doctest::Approx(oracle::inflow_bruteforce(maj, p, 0.3)).epsilon(1e-10));
  CHECK(fps[0].x == doctest::Approx(0.593716).epsilon(1e-6));
}

TEST_CASE("fixed point census for q=0.55, K=7, C=3") {
  const auto maj = majority_rule(7, 3);
  const auto f3 = fixed_points(maj, env(0.55, 7, 3, 0.3));
  const auto f6 = fixed_points(maj, env(0.55, 7, 3, 0.6));
  const auto f9 = fixed_points(maj, env(0.55, 7, 3, 0.9));
  REQUIRE(f3.size() == 1);
  REQUIRE(f6.size() == 1);
  CHECK(f3[0].label == SteadyLabel::strictly_informative);
  CHECK(f6[0].label == SteadyLabel::strictly_informative);
  CHECK(f6[0].x > f3[0].x);
  CHECK(f3[0].x == doctest::Approx(0.632375).epsilon(1e-6));
  CHECK(f6[0].x == doctest::Approx(0.782390).epsilon(1e-6));
  REQUIRE(f9.size() == 3);
  CHECK(f9[0].label == SteadyLabel::strictly_misleading);
  CHECK(f9[0].stability == Stability::stable_both);
  CHECK(f9[1].stability == Stability::unstable);
  CHECK(f9[2].label == SteadyLabel::strictly_informative);
  CHECK(f9[0].x == doctest::Approx(0.163407).epsilon(1e-6));
  CHECK(f9[1].x == doctest::Approx(0.455988).epsilon(1e-6));
  CHECK(f9[2].x == doctest::Approx(0.877157).epsilon(1e-6));
  for (double l : {0.3, 0.6, 0.9})
    CHECK(static_cast<std::size_t>(grid_crossings(maj, env(0.55, 7, 3, l), 20000)) ==
          fixed_points(maj, env(0.55, 7, 3, l)).size());
  for (const auto& fp : f9) CHECK(std::abs(fp.residual) < 1e-10);
}

TEST_CASE("sturm certification of well-separated roots") {
  FixedPointOptions o;
  o.certify_with_sturm = true;
  CHECK(fixed_points(majority_rule(7, 3), env(0.55, 7, 3, 0.9), o).size() == 3);
}

TEST_CASE("critical virality weight") {
  const auto a = critical_virality(0.55, 7, 3);
  const auto b = critical_virality(0.51, 6, 3);
  CHECK(std::abs(a.lambda_star - 0.76) <= 0.01);
  CHECK(std::abs(b.lambda_star - 0.77) <= 0.01);
  CHECK(std::abs(a.lambda_star - 0.759625) < 1e-5);
  CHECK(std::abs(b.lambda_star - 0.772700) < 1e-5);
  CHECK_FALSE(critical_virality(0.9, 2, 1).finite());

  // Grid oracle on either side of the bracket.
  using Case = std::tuple<double, int, int, double>;
  for (const auto& [q, K, C, ls] : {Case{0.55, 7, 3, a.lambda_star}, Case{0.51, 6, 3, b.lambda_star}}) {
    const auto maj = majority_rule(K, C);
    CHECK(grid_min_excess(maj, env(q, K, C, ls - 1e-4), 0.0, 0.5, 20000) > 0.0);
    CHECK(grid_min_excess(maj, env(q, K, C, ls + 1e-4), 0.0, 0.5, 20000) < 0.0);
  }
}

TEST_CASE("touchpoint at the critical weight") {
  const auto crit = critical_virality(0.55, 7, 3);
  const auto fps = fixed_points(majority_rule(7, 3), env(0.55, 7, 3, crit.lambda_star));
  REQUIRE(fps.size() == 2);
  CHECK(fps[0].x == doctest::Approx(*crit.witness_x).epsilon(1e-4));
  CHECK(fps[0].stability == Stability::touch_left_stable);
  CHECK(is_misleading(fps[0].label));
  CHECK(is_attainable(fps[0].stability));
  CHECK(fps[1].label == SteadyLabel::strictly_informative);
}

TEST_CASE("critical weight exceeds 1 - 1/(2q)") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int finite = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 2 + static_cast<int>(u(rng) * 19);
    const int C = 1 + static_cast<int>(u(rng) * (K / 2));
    const double q = 0.501 + 0.49 * u(rng);
    const auto r = critical_virality(q, K, C);
    if (!r.finite()) continue;
    ++finite;
    CHECK(r.lambda_star > 1.0 - 1.0 / (2.0 * q));
  }
  CHECK(finite > 20);
}

TEST_CASE("comparative statics on a grid") {
  std::vector<EnvironmentPoint> grid;
  for (double q : {0.51, 0.55, 0.6, 0.7})
    for (int K = 2; K <= 9; ++K)
      for (int C = 1; 2 * C <= K; ++C) grid.push_back({q, K, C});
  const auto t = comparative_statics_table(grid);
  CHECK(t.checks.size() > 100);
  CHECK(t.all_ok());
  for (const auto& c : t.checks) CHECK_FALSE(c.flagged());
}

TEST_CASE("manipulation bound") {
  const auto p = env(0.55, 7, 3, 0.6);
  const auto b = manipulation_bound(p);
  REQUIRE_FALSE(b.region_empty);
  // Oracle: 1 - max x / phi(x) over the misleading region on a dense grid.
  const auto maj = majority_rule(7, 3);
  double best = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    const double x = b.region_upper * i / 100000.0;
    best = std::max(best, x / oracle::inflow_bruteforce(maj, p, x));
  }
  CHECK(b.iota_bound == doctest::Approx(1.0 - best).epsilon(1e-7));
  CHECK(b.iota_bound == doctest::Approx(0.0894309).epsilon(1e-6));

  double prev = 1.0;
  for (int i = 0; i < 100; ++i) {
    const double iota = b.iota_bound * i / 100.0;
    const auto fps = fixed_points(maj, p.with_iota(iota));
    int misleading = 0;
    double informative = -1.0;
    for (const auto& fp : fps) {
      misleading += is_misleading(fp.label);
      if (is_informative(fp.label)) informative = fp.x;
    }
    CHECK(misleading == 0);
    REQUIRE(informative > 0.0);
    CHECK(informative <= prev + 1e-12);
    prev = informative;
  }
  CHECK(manipulation_bound(env(0.55, 7, 3, 0.0)).region_empty);
}
