#include "viral/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "viral/design.hpp"
#include "viral/equilibrium.hpp"
#include "viral/inflow.hpp"
#include "viral/report.hpp"
#include "viral/simulation.hpp"
#include "viral/strategy_io.hpp"

namespace viral {

namespace {

const std::vector<std::string> kCommands = {"analyze",     "lambda-star", "statics",   "simulate",
                                            "equilibrium", "design",      "robustness"};

std::string lambda_key(double l) {
  std::ostringstream os;
  os << l;
  return os.str();
}

bool is_builtin_strategy(const std::string& spec) {
  return spec == "majority" || spec == "majority-signal" || spec.rfind("family:", 0) == 0;
}

template <class T>
T field(const json& j, const char* name) {
  try {
    return j.at(name).get<T>();
  } catch (const json::exception&) {
    throw ParameterError(std::string("config field '") + name + "' is missing or has the wrong type");
  }
}

}  // namespace

json config_to_json(const RunConfig& cfg) {
  json eq = json::object();
  for (const auto& [l, spec] : cfg.equilibria) eq[lambda_key(l)] = spec;
  return {{"command", cfg.command},
          {"q", cfg.params.q},
          {"K", cfg.params.K},
          {"C", cfg.params.C},
          {"lambda", cfg.params.lambda},
          {"n", cfg.params.n},
          {"iota", cfg.params.iota},
          {"strategy", cfg.strategy},
          {"runs", cfg.runs},
          {"seed", cfg.seed},
          {"path_points", cfg.path_points},
          {"p_grid", cfg.p_grid},
          {"n_schedule", cfg.n_schedule},
          {"pivot", cfg.pivot ? json(*cfg.pivot) : json(nullptr)},
          {"lambda_grid", cfg.lambda_grid},
          {"objectives", cfg.objectives},
          {"equilibria", eq},
          {"estimator", cfg.estimator},
          {"iota_grid", cfg.iota_grid},
          {"q_grid", cfg.q_grid},
          {"k_max", cfg.k_max}};
}

void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ParameterError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const char* k = key.c_str();
    if (key == "command") {
      const auto c = field<std::string>(j, k);
      if (!cfg.command.empty() && c != cfg.command)
        throw ParameterError("config field 'command' is '" + c + "' but the subcommand is '" + cfg.command + "'");
    } else if (key == "q") cfg.params.q = field<double>(j, k);
    else if (key == "K") cfg.params.K = field<int>(j, k);
    else if (key == "C") cfg.params.C = field<int>(j, k);
    else if (key == "lambda") cfg.params.lambda = field<double>(j, k);
    else if (key == "n") cfg.params.n = field<std::int64_t>(j, k);
    else if (key == "iota") cfg.params.iota = field<double>(j, k);
    else if (key == "strategy") cfg.strategy = field<std::string>(j, k);
    else if (key == "runs") cfg.runs = field<std::int64_t>(j, k);
    else if (key == "seed") cfg.seed = field<std::uint64_t>(j, k);
    else if (key == "threads") cfg.threads = field<int>(j, k);
    else if (key == "out_dir") cfg.out_dir = field<std::string>(j, k);
    else if (key == "path_points") cfg.path_points = field<int>(j, k);
    else if (key == "p_grid") cfg.p_grid = field<std::vector<double>>(j, k);
    else if (key == "n_schedule") cfg.n_schedule = field<std::vector<std::int64_t>>(j, k);
    else if (key == "pivot") cfg.pivot = value.is_null() ? std::nullopt : std::optional<int>(field<int>(j, k));
    else if (key == "lambda_grid") cfg.lambda_grid = field<std::vector<double>>(j, k);
    else if (key == "objectives") cfg.objectives = field<std::vector<std::string>>(j, k);
    else if (key == "equilibria") {
      if (!value.is_object()) throw ParameterError("config field 'equilibria' must map lambda to a strategy");
      cfg.equilibria.clear();
      for (const auto& [l, spec] : value.items()) {
        char* end = nullptr;
        const double lv = std::strtod(l.c_str(), &end);
        if (end == l.c_str() || *end != '\0' || !spec.is_string())
          throw ParameterError("config field 'equilibria' has a bad entry '" + l + "'");
        cfg.equilibria[lv] = spec.get<std::string>();
      }
    } else if (key == "estimator") cfg.estimator = field<std::string>(j, k);
    else if (key == "iota_grid") cfg.iota_grid = field<std::vector<double>>(j, k);
    else if (key == "q_grid") cfg.q_grid = field<std::vector<double>>(j, k);
    else if (key == "k_max") cfg.k_max = field<int>(j, k);
    else throw ParameterError("unknown config field '" + key + "'");
  }
}

Strategy resolve_strategy(const std::string& spec, const ModelParams& params, std::optional<int> pivot) {
  if (spec == "majority") return majority_rule(params.K, params.C);
  if (spec == "majority-signal") return majority_rule(params.K, params.C, MajorityTieBreak::signal);
  if (spec.rfind("family:", 0) == 0) {
    const std::string v = spec.substr(7);
    char* end = nullptr;
    const double p = std::strtod(v.c_str(), &end);
    if (v.empty() || *end != '\0') throw ParameterError("strategy '" + spec + "': expected family:<p>");
    return deviation_family(params.K, params.C, pivot).make(p);
  }
  const auto sigma = load_strategy_file(spec);
  if (sigma.K() != params.K || sigma.C() != params.C)
    throw ParameterError("strategy file " + spec + " does not match K and C");
  return sigma;
}

void validate_config(const RunConfig& cfg) {
  if (std::find(kCommands.begin(), kCommands.end(), cfg.command) == kCommands.end())
    throw ParameterError("unknown subcommand '" + cfg.command + "'");
  if (cfg.command == "lambda-star" || cfg.command == "statics") {
    if (cfg.command == "lambda-star") validate_environment(cfg.params.q, cfg.params.K, cfg.params.C);
  } else {
    cfg.params.validate();
  }
  if (cfg.runs < 1) throw ParameterError("runs must be positive");
  if (cfg.threads < 0) throw ParameterError("threads must be nonnegative");
  if (cfg.path_points < 0) throw ParameterError("path_points must be nonnegative");
  if (cfg.k_max < 2 || cfg.k_max > kMaxFeedSize) throw ParameterError("k_max must lie in [2, 64]");
  const auto check_file = [](const std::string& spec, const char* what) {
    if (!is_builtin_strategy(spec) && !std::filesystem::exists(spec))
      throw ParameterError(std::string(what) + " file does not exist: " + spec);
  };
  check_file(cfg.strategy, "strategy");
  for (const auto& [l, spec] : cfg.equilibria) check_file(spec, "equilibrium strategy");
  for (const auto& o : cfg.objectives) Objective::by_name(o);
  payoff_estimator_from_string(cfg.estimator);
}

namespace {

struct Output {
  const RunConfig& cfg;
  json config;
  std::ostream& out;

  void write(const std::string& name, const std::string& text) {
    const auto path = cfg.out_dir / name;
    write_text(path, text);
    out << "wrote " << path.string() << '\n';
  }
};

std::vector<double> series_of(const InflowFunction& phi, const std::vector<double>& xs) {
  std::vector<double> ys;
  for (double x : xs) ys.push_back(phi(x));
  return ys;
}

void inflow_svg(Output& o, const std::string& name, const InflowFunction& phi, const std::string& title,
                std::vector<double> marks) {
  const auto xs = linear_grid(0.0, 1.0, 401);
  PlotSpec spec;
  spec.title = title;
  spec.x_label = "viral accuracy x";
  spec.y_label = "inflow accuracy";
  spec.diagonal = true;
  spec.vlines = std::move(marks);
  o.write(name, svg_line_plot(spec, {{"phi", xs, series_of(phi, xs)}}));
}

std::string describe_params(const ModelParams& p) {
  std::ostringstream os;
  os << "q=" << p.q << " K=" << p.K << " C=" << p.C << " lambda=" << p.lambda;
  return os.str();
}

void cmd_analyze(Output& o) {
  const auto& p = o.cfg.params;
  const Strategy sigma = resolve_strategy(o.cfg.strategy, p, o.cfg.pivot);
  const InflowFunction phi(sigma, p);
  const auto fps = fixed_points(phi);
  json fj = json::array();
  for (const auto& fp : fps) fj.push_back(fixed_point_to_json(fp));
  o.write("fixed_points.csv", fixed_points_csv(o.config, fps));
  o.write("inflow.csv", inflow_curve_csv(o.config, phi, 201));
  o.write("analyze.json", json_document(o.config, "fixed_points", fj));
  if (o.cfg.svg) {
    std::vector<double> xs;
    for (const auto& fp : fps) xs.push_back(fp.x);
    inflow_svg(o, "inflow.svg", phi, "inflow accuracy, " + describe_params(p), xs);
  }
  for (const auto& fp : fps)
    o.out << "fixed point x=" << fp.x << ' ' << to_string(fp.label) << ' ' << to_string(fp.stability) << '\n';
}

void cmd_lambda_star(Output& o) {
  const auto& p = o.cfg.params;
  const auto r = critical_virality(p.q, p.K, p.C);
  o.write("lambda_star.json", json_document(o.config, "critical", critical_to_json(r)));
  o.out << critical_to_json(r).dump() << '\n';
}

void cmd_statics(Output& o) {
  std::vector<EnvironmentPoint> grid;
  for (double q : o.cfg.q_grid)
    for (int K = 2; K <= o.cfg.k_max; ++K)
      for (int C = 1; 2 * C <= K; ++C) {
        validate_environment(q, K, C);
        grid.push_back({q, K, C});
      }
  const auto t = comparative_statics_table(grid);
  o.write("statics.csv", statics_csv(o.config, t));
  o.write("statics.json", json_document(o.config, "statics", statics_to_json(t)));
  std::size_t bad_bound = 0, flagged = 0;
  for (const auto& e : t.entries) bad_bound += !e.lower_bound_ok;
  for (const auto& c : t.checks) flagged += c.flagged();
  o.out << t.entries.size() << " environments, " << t.checks.size() << " directional checks, " << flagged
        << " flagged, " << bad_bound << " below the lower bound\n";
}

void cmd_simulate(Output& o) {
  const auto& p = o.cfg.params;
  const Strategy sigma = resolve_strategy(o.cfg.strategy, p, o.cfg.pivot);
  EnsembleOptions eo;
  eo.runs = o.cfg.runs;
  eo.base_seed = o.cfg.seed;
  eo.threads = o.cfg.threads;
  eo.sim.path_points = o.cfg.path_points;
  for (const auto& name : o.cfg.objectives) eo.objectives.push_back(Objective::by_name(name));
  const auto res = run_ensemble(sigma, p, eo);
  o.write("runs.csv", runs_csv(o.config, res.runs));
  if (o.cfg.path_points > 0) o.write("paths.csv", paths_csv(o.config, res.runs));
  o.write("ensemble.json", json_document(o.config, "ensemble", ensemble_stats_to_json(res.stats)));
  if (o.cfg.svg) {
    std::vector<double> marks;
    for (double c : res.stats.cluster_mean)
      if (!std::isnan(c)) marks.push_back(c);
    inflow_svg(o, "inflow.svg", InflowFunction(sigma, p), "inflow accuracy and cluster means", marks);
  }
  const auto& st = res.stats;
  o.out << "informative basin " << st.informative_basin_frequency() << ", misleading basin "
        << st.misleading_basin_frequency() << ", unassigned " << st.unassigned << '\n';
}

void cmd_equilibrium(Output& o) {
  const auto& cfg = o.cfg;
  std::vector<std::int64_t> horizons = cfg.n_schedule;
  if (horizons.empty()) horizons = {cfg.params.n};
  const ModelParams p = cfg.params.with_n(std::max(cfg.params.n, horizons.back()));
  PosteriorOptions po;
  po.runs = cfg.runs;
  po.base_seed = cfg.seed;
  po.threads = cfg.threads;

  if (cfg.p_grid.empty()) {
    const Strategy sigma = resolve_strategy(cfg.strategy, p, cfg.pivot);
    const auto est = estimate_posteriors(sigma, p, horizons, po);
    o.write("posteriors.csv", posterior_csv(o.config, est.by_horizon));
    o.write("posteriors_steady_state.csv", posterior_csv(o.config, {est.steady_state}));
    const auto viol = self_consistency_violations(sigma, est.by_horizon.back(), p);
    const auto br = best_response(est.by_horizon.back(), p);
    json vj = json::array();
    for (const auto& v : viol)
      vj.push_back({{"s", v.s == Signal::positive ? "+1" : "-1"}, {"k", v.k}, {"belief", v.belief}, {"se", v.se}});
    json tables = json::array();
    for (const auto& t : est.by_horizon) tables.push_back(posterior_to_json(t));
    json body = {{"posteriors", tables},
                 {"steady_state", posterior_to_json(est.steady_state)},
                 {"violations", vj},
                 {"self_consistent", viol.empty()},
                 {"best_response", strategy_to_json(br.strategy)}};
    o.write("equilibrium.json", json_document(o.config, "equilibrium", body));
    o.out << viol.size() << " best-response violations at n=" << horizons.back() << '\n';
    return;
  }

  const auto family = deviation_family(p.K, p.C, cfg.pivot);
  const auto est = estimate_limit_equilibrium(family, p, horizons, cfg.p_grid, po);
  const auto& last = est.by_n.back();
  json body = limit_to_json(est);
  body["p_grid"] = cfg.p_grid;
  body["gaps"] = last.gaps;
  body["p_hat"] = last.p_hat ? json(*last.p_hat) : json(nullptr);
  body["n"] = last.n;
  body["pivot"] = {{"s", "+1"}, {"k", family.pivot_k}};
  o.write("mixing.csv", mixing_csv(o.config, est));
  o.write("equilibrium.json", json_document(o.config, "equilibrium", body));
  if (cfg.svg) {
    PlotSeries pn{"p_hat", {}, {}};
    for (const auto& m : est.by_n) {
      pn.x.push_back(static_cast<double>(m.n));
      pn.y.push_back(m.p_hat ? *m.p_hat : std::nan(""));
    }
    PlotSpec spec;
    spec.title = "mixing probability by number of agents";
    spec.x_label = "agents n";
    spec.y_label = "p_hat";
    spec.x_min = 0.0;
    spec.x_max = static_cast<double>(horizons.back());
    spec.y_min = cfg.p_grid.front();
    spec.y_max = cfg.p_grid.back();
    o.write("p_by_n.svg", svg_line_plot(spec, {pn}));
  }
  o.out << "p_hat(n=" << last.n << ") = " << (last.p_hat ? std::to_string(*last.p_hat) : "none")
        << ", steady state p_hat = "
        << (est.steady_state.p_hat ? std::to_string(*est.steady_state.p_hat) : "none") << '\n';
}

void cmd_design(Output& o) {
  const auto& cfg = o.cfg;
  EquilibriumCatalog catalog(cfg.params);
  for (const auto& [l, spec] : cfg.equilibria) catalog.supply(l, resolve_strategy(spec, cfg.params, cfg.pivot), spec);
  std::vector<double> grid = cfg.lambda_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 10; ++i)
      if (i / 10.0 < catalog.lambda_star()) grid.push_back(i / 10.0);
    for (const auto& [l, spec] : cfg.equilibria) grid.push_back(l);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  }
  std::vector<Objective> objectives;
  for (const auto& name : cfg.objectives) objectives.push_back(Objective::by_name(name));
  PayoffOptions po{cfg.runs, cfg.seed, cfg.threads};
  const auto rep = optimize_lambda(objectives, cfg.params, grid, catalog, po, payoff_estimator_from_string(cfg.estimator));
  o.write("design.csv", design_csv(o.config, rep));
  o.write("design.json", json_document(o.config, "design", design_to_json(rep)));
  if (cfg.svg) {
    std::vector<PlotSeries> series;
    for (const auto& f : objectives)
      for (auto e : {PayoffEstimator::steady_state, PayoffEstimator::final_state}) {
        PlotSeries s{f.name() + " (" + to_string(e) + ")", {}, {}};
        for (const auto& r : rep.for_objective(f.name(), e)) {
          s.x.push_back(r.lambda);
          s.y.push_back(r.estimate);
        }
        series.push_back(std::move(s));
      }
    PlotSpec spec;
    spec.title = "platform objective by virality weight";
    spec.x_label = "virality weight lambda";
    spec.y_label = "objective";
    if (std::isfinite(rep.lambda_star)) spec.vlines = {rep.lambda_star};
    o.write("design.svg", svg_line_plot(spec, series));
  }
  for (const auto& [name, l] : rep.argmax) o.out << name << ": argmax lambda " << l << '\n';
}

void cmd_robustness(Output& o) {
  const auto& cfg = o.cfg;
  std::vector<double> grid = cfg.iota_grid;
  if (grid.empty()) {
    const auto b = manipulation_bound(cfg.params);
    grid = linear_grid(0.0, std::min(0.95, 1.25 * std::max(b.iota_bound, 0.02)), 21);
  }
  RobustnessOptions ro;
  ro.runs = cfg.runs;
  ro.base_seed = cfg.seed;
  ro.threads = cfg.threads;
  const auto rep = robustness_report(cfg.params, grid, ro);
  o.write("robustness.csv", robustness_csv(o.config, rep));
  o.write("robustness.json", json_document(o.config, "robustness", robustness_to_json(rep)));
  if (cfg.svg) {
    PlotSeries s{"informative steady state", {}, {}};
    for (const auto& pt : rep.points) {
      s.x.push_back(pt.iota);
      s.y.push_back(pt.informative_x ? *pt.informative_x : std::nan(""));
    }
    PlotSpec spec;
    spec.title = "informative steady state under manipulation";
    spec.x_label = "manipulation rate iota";
    spec.y_label = "x*";
    spec.x_max = grid.back();
    spec.vlines = {rep.bound.iota_bound};
    o.write("robustness.svg", svg_line_plot(spec, {s}));
  }
  o.out << "iota bound " << rep.bound.iota_bound << "; " << rep.diagnosis << '\n';
}

}  // namespace

int execute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    validate_config(cfg);
    Output o{cfg, config_to_json(cfg), out};
    if (cfg.command == "analyze") cmd_analyze(o);
    else if (cfg.command == "lambda-star") cmd_lambda_star(o);
    else if (cfg.command == "statics") cmd_statics(o);
    else if (cfg.command == "simulate") cmd_simulate(o);
    else if (cfg.command == "equilibrium") cmd_equilibrium(o);
    else if (cfg.command == "design") cmd_design(o);
    else if (cfg.command == "robustness") cmd_robustness(o);
    return 0;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const EquilibriumUnresolved& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

namespace {

struct Flags {
  std::optional<double> q, lambda, iota;
  std::optional<int> K, C, threads, path_points, pivot, k_max;
  std::optional<std::int64_t> n, runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> strategy, config, out, estimator;
  std::vector<double> p_grid, lambda_grid, iota_grid, q_grid;
  std::vector<std::int64_t> n_schedule;
  std::vector<std::string> objectives, equilibria;
  bool svg = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--q", f.q, "story precision");
  sub->add_option("--K", f.K, "news-feed size");
  sub->add_option("--C", f.C, "sharing capacity");
  sub->add_option("--lambda", f.lambda, "virality weight");
  sub->add_option("--iota", f.iota, "manipulation rate");
  sub->add_option("--n", f.n, "number of agents");
  sub->add_option("--strategy", f.strategy, "majority | majority-signal | family:<p> | strategy JSON path");
  sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
  sub->add_option("--seed", f.seed, "base seed");
  sub->add_option("--runs", f.runs, "simulation runs");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--threads", f.threads, "worker threads (0 = all)");
  sub->add_flag("--svg", f.svg, "also write SVG plots");
  sub->add_option("--path-points", f.path_points, "log-spaced path samples per run");
  sub->add_option("--p-grid", f.p_grid, "mixing probabilities to solve over")->delimiter(',');
  sub->add_option("--n-schedule", f.n_schedule, "posterior horizons")->delimiter(',');
  sub->add_option("--pivot", f.pivot, "pivot feed count of the deviation family");
  sub->add_option("--lambda-grid", f.lambda_grid, "virality weights to evaluate")->delimiter(',');
  sub->add_option("--objective", f.objectives, "accuracy | agreement (repeatable)");
  sub->add_option("--equilibrium", f.equilibria, "lambda=strategy supplied for design (repeatable)");
  sub->add_option("--estimator", f.estimator, "steady_state | final_state");
  sub->add_option("--iota-grid", f.iota_grid, "manipulation rates to sweep")->delimiter(',');
  sub->add_option("--q-grid", f.q_grid, "precisions for the statics table")->delimiter(',');
  sub->add_option("--k-max", f.k_max, "largest feed size for the statics table");
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig cfg;
  cfg.command = command;
  if (const char* dir = std::getenv("VIRAL_OUT_DIR"); dir && *dir) cfg.out_dir = dir;
  if (f.config) {
    std::ifstream in(*f.config);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParameterError("config " + *f.config + " is not valid JSON: " + e.what());
    }
    apply_config_json(cfg, j);
  }
  if (f.q) cfg.params.q = *f.q;
  if (f.K) cfg.params.K = *f.K;
  if (f.C) cfg.params.C = *f.C;
  if (f.lambda) cfg.params.lambda = *f.lambda;
  if (f.iota) cfg.params.iota = *f.iota;
  if (f.n) cfg.params.n = *f.n;
  if (f.strategy) cfg.strategy = *f.strategy;
  if (f.seed) cfg.seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.out) cfg.out_dir = *f.out;
  if (f.threads) cfg.threads = *f.threads;
  if (f.svg) cfg.svg = true;
  if (f.path_points) cfg.path_points = *f.path_points;
  if (!f.p_grid.empty()) cfg.p_grid = f.p_grid;
  if (!f.n_schedule.empty()) cfg.n_schedule = f.n_schedule;
  if (f.pivot) cfg.pivot = *f.pivot;
  if (!f.lambda_grid.empty()) cfg.lambda_grid = f.lambda_grid;
  if (!f.objectives.empty()) cfg.objectives = f.objectives;
  for (const auto& e : f.equilibria) {
    const auto eq = e.find('=');
    char* end = nullptr;
    const double l = eq == std::string::npos ? 0.0 : std::strtod(e.c_str(), &end);
    if (eq == std::string::npos || end != e.c_str() + eq)
      throw ParameterError("--equilibrium expects lambda=strategy, got '" + e + "'");
    cfg.equilibria[l] = e.substr(eq + 1);
  }
  if (f.estimator) cfg.estimator = *f.estimator;
  if (!f.iota_grid.empty()) cfg.iota_grid = f.iota_grid;
  if (!f.q_grid.empty()) cfg.q_grid = f.q_grid;
  if (f.k_max) cfg.k_max = *f.k_max;
  return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Social learning from viral content: steady states, simulation, equilibria and platform design"};
  app.require_subcommand(1);
  Flags flags;
  const std::map<std::string, std::string> about = {
      {"analyze", "fixed points and inflow curve of a strategy"},
      {"lambda-star", "critical virality weight of the majority rule"},
      {"statics", "critical weights and directional checks over a (q, K, C) grid"},
      {"simulate", "Monte Carlo ensemble of platform runs"},
      {"equilibrium", "empirical posteriors, best response and mixing equilibrium"},
      {"design", "platform objectives over virality weights"},
      {"robustness", "fixed points and ensembles under bot manipulation"},
  };
  for (const auto& c : kCommands) add_flags(app.add_subcommand(c, about.at(c)), flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, r;
    const int code = app.exit(e, o, r);
    out << o.str();
    err << r.str();
    return code == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  RunConfig cfg;
  try {
    cfg = resolve(command, flags);
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return execute(cfg, out, err);
}

}  // namespace viral
