#include "viral/inflow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "viral/binomial.hpp"

namespace viral {

InflowFunction::InflowFunction(const Strategy& sigma, const ModelParams& params)
    : params_(params), q_(params.q) {
  params.validate();
  if (sigma.K() != params.K || sigma.C() != params.C)
    throw ParameterError("strategy dimensions do not match K and C");
  weights_.resize(params.K + 1);
  for (int k = 0; k <= params.K; ++k)
    weights_[k] = q_ * sigma.expectation(Signal::positive, k) +
                  (1.0 - q_) * sigma.expectation(Signal::negative, k);
}

double InflowFunction::at(double x, double z) const {
  const int K = params_.K;
  const double y = params_.lambda * x + (1.0 - params_.lambda) * z;
  std::array<double, kMaxFeedSize + 1> pmf{};
  binomial_pmf(K, y, std::span<double>(pmf.data(), K + 1));
  double acc = 0.0;
  for (int k = 0; k <= K; ++k) acc += pmf[k] * weights_[k];
  return (1.0 - params_.iota) * (q_ + acc) / (1.0 + params_.C);
}

double InflowFunction::derivative(double x) const {
  const int K = params_.K;
  const double y = params_.lambda * x + (1.0 - params_.lambda) * q_;
  // d/dy Binom(K,y)(k) = K [Binom(K-1,y)(k-1) - Binom(K-1,y)(k)]
  std::array<double, kMaxFeedSize + 1> pmf{};
  binomial_pmf(K - 1, y, std::span<double>(pmf.data(), K));
  double acc = 0.0;
  for (int k = 0; k < K; ++k) acc += pmf[k] * (weights_[k + 1] - weights_[k]);
  return (1.0 - params_.iota) * params_.lambda * K * acc / (1.0 + params_.C);
}

Polynomial InflowFunction::excess_polynomial() const {
  const int K = params_.K;
  const long double a = (1.0L - params_.lambda) * q_;
  const long double b = params_.lambda;
  const Polynomial y({a, b});
  const Polynomial one_minus_y({1.0L - a, -b});
  std::vector<Polynomial> ypow(K + 1), rpow(K + 1);
  ypow[0] = rpow[0] = Polynomial({1.0L});
  for (int i = 1; i <= K; ++i) {
    ypow[i] = ypow[i - 1] * y;
    rpow[i] = rpow[i - 1] * one_minus_y;
  }
  Polynomial acc({static_cast<long double>(q_)});
  for (int k = 0; k <= K; ++k)
    acc = acc + ypow[k] * rpow[K - k] * (static_cast<long double>(binomial_coefficient(K, k)) * weights_[k]);
  const long double scale = (1.0L - params_.iota) / (1.0L + params_.C);
  return acc * scale - Polynomial({0.0L, 1.0L});
}

double inflow_accuracy(const Strategy& sigma, const ModelParams& params, double x,
                       std::optional<double> z) {
  const double zz = z.value_or(params.q);
  if (!(x >= 0.0 && x <= 1.0) || !(zz >= 0.0 && zz <= 1.0))
    throw ParameterError("inflow accuracy needs x, z in [0, 1]");
  return InflowFunction(sigma, params).at(x, zz);
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::stable_both: return "stable_both";
    case Stability::touch_left_stable: return "touch_left_stable";
    case Stability::touch_right_stable: return "touch_right_stable";
    case Stability::unstable: return "unstable";
  }
  return "?";
}

const char* to_string(SteadyLabel l) {
  switch (l) {
    case SteadyLabel::strictly_informative: return "strictly_informative";
    case SteadyLabel::informative_boundary: return "informative_boundary";
    case SteadyLabel::strictly_misleading: return "strictly_misleading";
    case SteadyLabel::misleading_boundary: return "misleading_boundary";
  }
  return "?";
}

SteadyLabel classify_label(double y, double boundary_tol) {
  if (std::abs(y - 0.5) <= boundary_tol)
    return y >= 0.5 ? SteadyLabel::informative_boundary : SteadyLabel::misleading_boundary;
  return y > 0.5 ? SteadyLabel::strictly_informative : SteadyLabel::strictly_misleading;
}

namespace {

// Root of f on [a, b] given opposite signs at the ends.
template <class F>
double bisect_root(const F& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0) == (fa > 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// Minimizer of f on [a, b] for unimodal f.
template <class F>
double golden_min(const F& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Location of the extremum of excess in [a, b], a minimum when want_min.
double refine_extremum(const InflowFunction& phi, double a, double b, bool want_min) {
  const double da = phi.excess_derivative(a), db = phi.excess_derivative(b);
  const bool bracketed = want_min ? (da < 0 && db > 0) : (da > 0 && db < 0);
  if (bracketed) return bisect_root([&](double x) { return phi.excess_derivative(x); }, a, b);
  const double sgn = want_min ? 1.0 : -1.0;
  return golden_min([&](double x) { return sgn * phi.excess(x); }, a, b, 1e-13);
}

int sign(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

std::vector<FixedPointReport> fixed_points(const Strategy& sigma, const ModelParams& params,
                                           const FixedPointOptions& opts) {
  return fixed_points(InflowFunction(sigma, params), opts);
}

std::vector<FixedPointReport> fixed_points(const InflowFunction& phi, const FixedPointOptions& opts) {
  if (opts.grid < 3) throw ParameterError("fixed point grid needs at least 3 points");
  const int N = opts.grid;
  const auto g = [&](double x) { return phi.excess(x); };
  std::vector<double> xs(N), gs(N);
  for (int i = 0; i < N; ++i) {
    xs[i] = static_cast<double>(i) / (N - 1);
    gs[i] = g(xs[i]);
  }

  struct Root {
    double x;
    std::optional<bool> touch_min;  // set for touchpoints: true if excess has a local minimum there
  };
  std::vector<Root> roots;
  for (int i = 0; i < N; ++i) {
    if (gs[i] == 0.0) roots.push_back({xs[i], std::nullopt});
    if (i + 1 < N && sign(gs[i]) * sign(gs[i + 1]) < 0) roots.push_back({bisect_root(g, xs[i], xs[i + 1]), std::nullopt});
  }

  // Extrema that approach zero without a sign change on the grid may hide a
  // tangency or a narrowly separated pair of roots.
  for (int i = 1; i + 1 < N; ++i) {
    const int s = sign(gs[i]);
    if (s == 0 || sign(gs[i - 1]) != s || sign(gs[i + 1]) != s) continue;
    const bool want_min = s > 0;
    const bool is_ext = want_min ? (gs[i] <= gs[i - 1] && gs[i] < gs[i + 1])
                                 : (gs[i] >= gs[i - 1] && gs[i] > gs[i + 1]);
    if (!is_ext) continue;
    const double xe = refine_extremum(phi, xs[i - 1], xs[i + 1], want_min);
    const double ge = g(xe);
    if (std::abs(ge) <= opts.root_tol) {
      roots.push_back({xe, want_min});
    } else if (sign(ge) == -s) {
      roots.push_back({bisect_root(g, xs[i - 1], xe), std::nullopt});
      roots.push_back({bisect_root(g, xe, xs[i + 1]), std::nullopt});
    }
  }

  std::sort(roots.begin(), roots.end(), [](const Root& a, const Root& b) { return a.x < b.x; });
  std::vector<Root> unique;
  for (const auto& r : roots) {
    if (!unique.empty() && r.x - unique.back().x < 1e-12) {
      if (r.touch_min) unique.back().touch_min = r.touch_min;
      continue;
    }
    unique.push_back(r);
  }
  if (unique.empty()) throw NumericalError("no fixed point isolated on [0, 1]");

  const ModelParams& p = phi.params();
  std::vector<FixedPointReport> out;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    const double x = unique[i].x;
    FixedPointReport rep;
    rep.x = x;
    rep.residual = std::abs(g(x));
    if (rep.residual > opts.root_tol) {
      std::ostringstream os;
      os << "fixed point near x=" << x << " has residual " << rep.residual;
      throw NumericalError(os.str());
    }
    if (unique[i].touch_min) {
      rep.stability = *unique[i].touch_min ? Stability::touch_left_stable : Stability::touch_right_stable;
    } else {
      double gap = 1.0;
      if (i > 0) gap = std::min(gap, x - unique[i - 1].x);
      if (i + 1 < unique.size()) gap = std::min(gap, unique[i + 1].x - x);
      double eps = opts.stability_eps;
      if (gap < opts.cluster_radius) eps = std::min(eps, gap / 3.0);
      const bool left = x - eps < 0.0 || g(x - eps) > 0.0;
      const bool right = x + eps > 1.0 || g(x + eps) < 0.0;
      rep.stability = left && right ? Stability::stable_both
                      : left        ? Stability::touch_left_stable
                      : right       ? Stability::touch_right_stable
                                    : Stability::unstable;
    }
    rep.sampling_accuracy = p.lambda * x + (1.0 - p.lambda) * p.q;
    rep.label = classify_label(rep.sampling_accuracy, opts.boundary_tol);
    out.push_back(rep);
  }

  if (opts.certify_with_sturm) {
    const int expected = count_distinct_roots(phi.excess_polynomial(), -1e-12L, 1.0L + 1e-12L);
    if (expected != static_cast<int>(out.size())) {
      std::ostringstream os;
      os << "root isolation unresolved on [0, 1]: Sturm count " << expected << ", isolated "
         << out.size();
      throw NumericalError(os.str());
    }
  }
  return out;
}

ExcessMinimum min_excess(const InflowFunction& phi, double lo, double hi, int grid) {
  if (grid < 3 || !(hi > lo)) throw ParameterError("min_excess needs grid >= 3 and hi > lo");
  std::vector<double> xs(grid), gs(grid);
  for (int i = 0; i < grid; ++i) {
    xs[i] = lo + (hi - lo) * i / (grid - 1);
    gs[i] = phi.excess(xs[i]);
  }
  ExcessMinimum best{xs[0], gs[0]};
  if (gs[grid - 1] < best.value) best = {xs[grid - 1], gs[grid - 1]};
  for (int i = 1; i + 1 < grid; ++i) {
    if (!(gs[i] <= gs[i - 1] && gs[i] <= gs[i + 1])) continue;
    const double xe = refine_extremum(phi, xs[i - 1], xs[i + 1], true);
    const double ge = phi.excess(xe);
    const double v = std::min(ge, gs[i]);
    if (v < best.value) best = {ge <= gs[i] ? xe : xs[i], v};
  }
  return best;
}

CriticalWeightResult critical_virality(double q, int K, int C, const CriticalOptions& opts) {
  validate_environment(q, K, C);
  const Strategy maj = majority_rule(K, C);
  ModelParams base;
  base.q = q;
  base.K = K;
  base.C = C;
  base.n = std::max<std::int64_t>(base.n, K + 1);
  const int half_grid = std::max(3, opts.grid / 2 + 1);
  const auto misleading_exists = [&](double lambda) {
    const InflowFunction phi(maj, base.with_lambda(lambda));
    return min_excess(phi, 0.0, 0.5, half_grid).value <= 0.0;
  };

  CriticalWeightResult res;
  const double lo0 = 1.0 - 1.0 / (2.0 * q) + 1e-9;
  if (!misleading_exists(1.0)) return res;
  if (misleading_exists(lo0))
    throw NumericalError("misleading fixed point found below the sampling-accuracy bound");

  double lo = lo0, hi = 1.0;
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (misleading_exists(mid))
      hi = mid;
    else
      lo = mid;
  }
  res.lambda_star = hi;
  res.bracket_width = hi - lo;

  for (int j = 1; j <= opts.spot_checks; ++j) {
    const double l = lo0 + (1.0 - lo0) * j / (opts.spot_checks + 1);
    if (std::abs(l - hi) < 1e-6) continue;
    if (misleading_exists(l) != (l > hi)) {
      std::ostringstream os;
      os << "misleading-fixed-point predicate is not monotone in lambda near " << l;
      throw NumericalError(os.str());
    }
  }

  const InflowFunction phi(maj, base.with_lambda(hi));
  try {
    for (const auto& fp : fixed_points(phi))
      if (fp.x <= 0.5) {
        res.witness_x = fp.x;
        break;
      }
  } catch (const NumericalError&) {
  }
  if (!res.witness_x) res.witness_x = min_excess(phi, 0.0, 0.5, half_grid).x;
  return res;
}

const char* to_string(StaticsDirection d) {
  switch (d) {
    case StaticsDirection::q_up: return "q_up";
    case StaticsDirection::c_down: return "C_down";
    case StaticsDirection::k_minus_2: return "K_minus_2";
    case StaticsDirection::k_plus_1_odd: return "K_plus_1_odd";
    case StaticsDirection::k_minus_1_odd: return "K_minus_1_odd";
  }
  return "?";
}

bool StaticsTable::all_ok() const {
  for (const auto& e : entries)
    if (!e.lower_bound_ok) return false;
  for (const auto& c : checks)
    if (c.flagged()) return false;
  return true;
}

StaticsTable comparative_statics_table(std::span<const EnvironmentPoint> grid, const CriticalOptions& opts) {
  StaticsTable table;
  for (const auto& pt : grid) {
    StaticsEntry e{pt, critical_virality(pt.q, pt.K, pt.C, opts), 1.0 - 1.0 / (2.0 * pt.q), true};
    e.lower_bound_ok = !e.result.finite() || e.result.lambda_star > e.lower_bound;
    table.entries.push_back(e);
  }
  const auto& es = table.entries;
  for (std::size_t b = 0; b < es.size(); ++b) {
    for (std::size_t c = 0; c < es.size(); ++c) {
      if (b == c) continue;
      const auto& pb = es[b].point;
      const auto& pc = es[c].point;
      std::optional<StaticsDirection> dir;
      if (pb.K == pc.K && pb.C == pc.C && pc.q > pb.q) dir = StaticsDirection::q_up;
      else if (pb.q == pc.q && pb.K == pc.K && pc.C < pb.C) dir = StaticsDirection::c_down;
      else if (pb.q == pc.q && pb.C == pc.C && pc.K == pb.K - 2) dir = StaticsDirection::k_minus_2;
      else if (pb.q == pc.q && pb.C == pc.C && pb.K % 2 == 1 && pc.K == pb.K + 1) dir = StaticsDirection::k_plus_1_odd;
      else if (pb.q == pc.q && pb.C == pc.C && pb.K % 2 == 1 && pc.K == pb.K - 1) dir = StaticsDirection::k_minus_1_odd;
      if (!dir) continue;
      StaticsCheck chk{*dir, b, c, es[b].result.lambda_star, es[c].result.lambda_star, true, true};
      const double slack = 2.0 * opts.tol;
      chk.direction_ok = chk.changed_value >= chk.base_value - slack;
      chk.strict_ok = !es[b].result.finite() || chk.changed_value > chk.base_value;
      table.checks.push_back(chk);
    }
  }
  return table;
}

ManipulationBound manipulation_bound(const ModelParams& params, const ManipulationOptions& opts) {
  params.validate();
  ManipulationBound res;
  const double lambda = params.lambda;
  if (lambda <= 0.0) return res;
  const double xb = (0.5 - (1.0 - lambda) * params.q) / lambda;
  if (xb < 0.0) return res;
  res.region_empty = false;
  res.region_upper = std::min(1.0, xb);

  const InflowFunction phi(majority_rule(params.K, params.C), params.with_iota(0.0));
  const double hi = res.region_upper;
  const auto ratio = [&](double x) { return x / phi(x); };

  const auto steps = static_cast<std::int64_t>(std::ceil(hi / opts.grid_step));
  std::int64_t best_i = 0;
  double best = ratio(0.0);
  for (std::int64_t i = 1; i <= steps; ++i) {
    const double x = std::min(hi, i * opts.grid_step);
    const double r = ratio(x);
    if (r > best) {
      best = r;
      best_i = i;
    }
  }
  const double a = std::max(0.0, (best_i - 1) * opts.grid_step);
  const double b = std::min(hi, (best_i + 1) * opts.grid_step);
  double xi = b > a ? golden_min([&](double x) { return -ratio(x); }, a, b, opts.refine_tol) : a;
  double interior = ratio(xi);
  const double boundary = ratio(hi);
  if (boundary >= interior) {
    xi = hi;
    interior = boundary;
  }
  res.argmax_x = xi;
  res.max_ratio = interior;
  res.boundary_maximizer = hi - xi <= 1e-8;
  res.iota_bound = 1.0 - interior;
  return res;
}

}  // namespace viral
