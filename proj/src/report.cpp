#include "viral/report.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace viral {

namespace {

// Shortest round-trip decimal, so re-running reproduces files byte for byte.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  for (int prec = 6; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_json(const std::optional<double>& v) { return v ? finite_or_null(*v) : json(nullptr); }

json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(finite_or_null(x));
  return a;
}

const char* signal_name(Signal s) { return s == Signal::positive ? "+1" : "-1"; }

}  // namespace

json params_to_json(const ModelParams& p) {
  return {{"q", p.q}, {"K", p.K}, {"C", p.C}, {"lambda", p.lambda}, {"n", p.n}, {"iota", p.iota}};
}

json fixed_point_to_json(const FixedPointReport& fp) {
  return {{"x", fp.x},
          {"residual", fp.residual},
          {"sampling_accuracy", fp.sampling_accuracy},
          {"stability", to_string(fp.stability)},
          {"label", to_string(fp.label)}};
}

json critical_to_json(const CriticalWeightResult& r) {
  return {{"lambda_star", finite_or_null(r.lambda_star)},
          {"finite", r.finite()},
          {"bracket_width", r.bracket_width},
          {"witness_x", optional_json(r.witness_x)}};
}

json statics_to_json(const StaticsTable& t) {
  json entries = json::array(), checks = json::array();
  for (const auto& e : t.entries)
    entries.push_back({{"q", e.point.q},
                       {"K", e.point.K},
                       {"C", e.point.C},
                       {"lambda_star", finite_or_null(e.result.lambda_star)},
                       {"lower_bound", e.lower_bound},
                       {"lower_bound_ok", e.lower_bound_ok}});
  for (const auto& c : t.checks)
    checks.push_back({{"direction", to_string(c.direction)},
                      {"base", c.base},
                      {"changed", c.changed},
                      {"base_value", finite_or_null(c.base_value)},
                      {"changed_value", finite_or_null(c.changed_value)},
                      {"direction_ok", c.direction_ok},
                      {"strict_ok", c.strict_ok}});
  return {{"entries", entries}, {"checks", checks}, {"all_ok", t.all_ok()}};
}

namespace {

json aggregates_json(const std::vector<ObjectiveAggregate>& aggs) {
  json a = json::array();
  for (const auto& g : aggs)
    a.push_back({{"objective", g.name}, {"mean", g.mean}, {"se", g.se}, {"ci_lo", g.ci_lo}, {"ci_hi", g.ci_hi}});
  return a;
}

}  // namespace

json ensemble_stats_to_json(const EnsembleStats& st) {
  json fps = json::array();
  for (std::size_t i = 0; i < st.fixed_points.size(); ++i) {
    json f = fixed_point_to_json(st.fixed_points[i]);
    f["frequency"] = st.frequency[i];
    f["frequency_se"] = st.frequency_se[i];
    f["cluster_mean"] = finite_or_null(st.cluster_mean[i]);
    f["basin_frequency"] = st.basin_frequency[i];
    f["basin_se"] = st.basin_se[i];
    fps.push_back(f);
  }
  return {{"runs", st.runs},
          {"fixed_points", fps},
          {"unassigned", st.unassigned},
          {"informative_frequency", st.informative_frequency()},
          {"misleading_frequency", st.misleading_frequency()},
          {"informative_basin_frequency", st.informative_basin_frequency()},
          {"misleading_basin_frequency", st.misleading_basin_frequency()},
          {"mean_x", st.mean_x},
          {"mean_z", st.mean_z},
          {"objectives", aggregates_json(st.objectives)},
          {"steady_state_objectives", aggregates_json(st.steady_state_objectives)}};
}

json posterior_to_json(const PosteriorTable& t) {
  json cells = json::array();
  for (Signal s : {Signal::negative, Signal::positive})
    for (int k = 0; k <= t.K; ++k) {
      const auto& c = t.at(s, k);
      cells.push_back({{"s", signal_name(s)},
                       {"k", k},
                       {"belief", c.belief},
                       {"se", c.se},
                       {"count", c.count},
                       {"mirror_count", c.mirror_count},
                       {"low_confidence", c.low_confidence}});
    }
  return {{"K", t.K}, {"runs", t.runs}, {"n", t.n}, {"cells", cells}};
}

json mixing_to_json(const MixingSolution& m) {
  return {{"p_grid", m.p_grid}, {"gaps", vector_json(m.gaps)},  {"gap_se", vector_json(m.gap_se)},
          {"p_hat", optional_json(m.p_hat)}, {"p_hat_se", optional_json(m.p_hat_se)}, {"n", m.n},
          {"runs", m.runs}};
}

json limit_to_json(const LimitEstimate& e) {
  json by_n = json::array();
  for (const auto& m : e.by_n) by_n.push_back(mixing_to_json(m));
  return {{"by_n", by_n},
          {"limit", optional_json(e.limit)},
          {"ci_lo", e.ci_lo},
          {"ci_hi", e.ci_hi},
          {"plateau", e.plateau},
          {"steady_state", mixing_to_json(e.steady_state)}};
}

json design_to_json(const DesignReport& r) {
  json est = json::array();
  for (const auto& e : r.estimates)
    est.push_back({{"lambda", e.lambda},
                   {"objective", e.objective},
                   {"estimator", to_string(e.estimator)},
                   {"estimate", e.estimate},
                   {"ci_lo", e.ci_lo},
                   {"ci_hi", e.ci_hi},
                   {"runs", e.runs},
                   {"equilibrium", e.equilibrium}});
  json argmax = json::object();
  for (const auto& [name, l] : r.argmax)
    argmax[name] = {{"lambda", l}, {"at_or_above_critical", r.argmax_at_critical.at(name)}};
  return {{"params", params_to_json(r.params)}, {"lambda_star", finite_or_null(r.lambda_star)},
          {"lambda_grid", r.lambda_grid},       {"equilibria", r.equilibria},
          {"primary_estimator", to_string(r.primary)}, {"estimates", est},
          {"argmax", argmax}};
}

json robustness_to_json(const RobustnessReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) {
    json fps = json::array();
    for (const auto& fp : p.fixed_points) fps.push_back(fixed_point_to_json(fp));
    pts.push_back({{"iota", p.iota},
                   {"fixed_points", fps},
                   {"misleading", p.misleading},
                   {"informative_x", optional_json(p.informative_x)},
                   {"frequency", vector_json(p.frequency)},
                   {"cluster_mean", vector_json(p.cluster_mean)},
                   {"max_cluster_gap", p.max_cluster_gap},
                   {"unassigned", p.unassigned}});
  }
  const auto& b = r.bound;
  return {{"params", params_to_json(r.params)},
          {"iota_bound", b.iota_bound},
          {"bound",
           {{"region_empty", b.region_empty},
            {"region_upper", b.region_upper},
            {"argmax_x", b.argmax_x},
            {"max_ratio", b.max_ratio},
            {"boundary_maximizer", b.boundary_maximizer}}},
          {"iota_grid", pts},
          {"no_misleading_below_bound", r.no_misleading_below_bound},
          {"informative_nonincreasing", r.informative_nonincreasing},
          {"clusters_agree", r.clusters_agree},
          {"threshold_iota", optional_json(r.threshold_iota)},
          {"misleading_at_threshold", r.misleading_at_threshold},
          {"diagnosis", r.diagnosis}};
}

std::string csv_header(const json& config) { return "# config: " + config.dump() + "\n"; }

std::string fixed_points_csv(const json& config, const std::vector<FixedPointReport>& fps) {
  std::ostringstream os;
  os << csv_header(config) << "x,residual,sampling_accuracy,stability,label\n";
  for (const auto& fp : fps)
    os << num(fp.x) << ',' << num(fp.residual) << ',' << num(fp.sampling_accuracy) << ',' << to_string(fp.stability)
       << ',' << to_string(fp.label) << '\n';
  return os.str();
}

std::string inflow_curve_csv(const json& config, const InflowFunction& phi, int points) {
  if (points < 2) throw ParameterError("inflow curve needs at least two points");
  std::ostringstream os;
  os << csv_header(config) << "x,phi,excess\n";
  for (int i = 0; i < points; ++i) {
    const double x = static_cast<double>(i) / (points - 1);
    os << num(x) << ',' << num(phi(x)) << ',' << num(phi.excess(x)) << '\n';
  }
  return os.str();
}

std::string statics_csv(const json& config, const StaticsTable& t) {
  std::ostringstream os;
  os << csv_header(config) << "direction,base_q,base_K,base_C,changed_q,changed_K,changed_C,base_lambda_star,"
                              "changed_lambda_star,direction_ok,strict_ok\n";
  for (const auto& c : t.checks) {
    const auto& a = t.entries[c.base].point;
    const auto& b = t.entries[c.changed].point;
    os << to_string(c.direction) << ',' << num(a.q) << ',' << a.K << ',' << a.C << ',' << num(b.q) << ',' << b.K
       << ',' << b.C << ',' << num(c.base_value) << ',' << num(c.changed_value) << ',' << c.direction_ok << ','
       << c.strict_ok << '\n';
  }
  return os.str();
}

std::string runs_csv(const json& config, const std::vector<RunResult>& runs) {
  std::ostringstream os;
  os << csv_header(config) << "run,seed,final_x,final_z,assigned,basin,bots,idle_bots\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    os << i << ',' << r.seed << ',' << num(r.final_x) << ',' << num(r.final_z) << ','
       << (r.assigned_fixed_point ? std::to_string(*r.assigned_fixed_point) : "") << ','
       << (r.basin ? std::to_string(*r.basin) : "") << ',' << r.state.bots << ',' << r.state.idle_bots << '\n';
  }
  return os.str();
}

std::string paths_csv(const json& config, const std::vector<RunResult>& runs) {
  std::ostringstream os;
  os << csv_header(config) << "run,t,x,z\n";
  for (std::size_t i = 0; i < runs.size(); ++i)
    for (const auto& p : runs[i].path) os << i << ',' << p.t << ',' << num(p.x) << ',' << num(p.z) << '\n';
  return os.str();
}

std::string posterior_csv(const json& config, const std::vector<PosteriorTable>& tables) {
  std::ostringstream os;
  os << csv_header(config) << "n,s,k,belief,se,count,mirror_count,low_confidence\n";
  for (const auto& t : tables)
    for (Signal s : {Signal::negative, Signal::positive})
      for (int k = 0; k <= t.K; ++k) {
        const auto& c = t.at(s, k);
        os << t.n << ',' << signal_name(s) << ',' << k << ',' << num(c.belief) << ',' << num(c.se) << ','
           << c.count << ',' << c.mirror_count << ',' << c.low_confidence << '\n';
      }
  return os.str();
}

std::string mixing_csv(const json& config, const LimitEstimate& e) {
  std::ostringstream os;
  os << csv_header(config) << "n,p,gap,gap_se\n";
  const auto rows = [&](const MixingSolution& m, const std::string& n) {
    for (std::size_t i = 0; i < m.p_grid.size(); ++i)
      os << n << ',' << num(m.p_grid[i]) << ',' << num(m.gaps[i]) << ',' << num(m.gap_se[i]) << '\n';
  };
  for (const auto& m : e.by_n) rows(m, std::to_string(m.n));
  rows(e.steady_state, "steady_state");
  return os.str();
}

std::string design_csv(const json& config, const DesignReport& r) {
  std::ostringstream os;
  os << csv_header(config) << "lambda,objective,estimate,ci_lo,ci_hi,runs,estimator,equilibrium\n";
  for (const auto& e : r.estimates)
    os << num(e.lambda) << ',' << e.objective << ',' << num(e.estimate) << ',' << num(e.ci_lo) << ','
       << num(e.ci_hi) << ',' << e.runs << ',' << to_string(e.estimator) << ',' << e.equilibrium << '\n';
  return os.str();
}

std::string robustness_csv(const json& config, const RobustnessReport& r) {
  std::ostringstream os;
  os << csv_header(config) << "iota,fixed_points,misleading,informative_x,max_cluster_gap,unassigned\n";
  for (const auto& p : r.points)
    os << num(p.iota) << ',' << p.fixed_points.size() << ',' << p.misleading << ','
       << (p.informative_x ? num(*p.informative_x) : "") << ',' << num(p.max_cluster_gap) << ','
       << num(p.unassigned) << '\n';
  return os.str();
}

std::string json_document(const json& config, const std::string& key, const json& body) {
  json doc = {{"config", config}, {key, body}};
  return doc.dump(2) + "\n";
}

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 440, L = 70, R = 20, T = 40, B = 60;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  const double xs = (W - L - R) / (spec.x_max - spec.x_min);
  const double ys = (H - T - B) / (spec.y_max - spec.y_min);
  const auto px = [&](double x) { return L + (x - spec.x_min) * xs; };
  const auto py = [&](double y) { return H - B - (y - spec.y_min) * ys; };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(spec.title) << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = spec.x_min + (spec.x_max - spec.x_min) * i / 5.0;
    const double yv = spec.y_min + (spec.y_max - spec.y_min) * i / 5.0;
    os << "<text x=\"" << num(px(xv)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << num(xv)
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(yv) + 4) << "\" text-anchor=\"end\">" << num(yv)
       << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 16 << "\" text-anchor=\"middle\">" << xml_escape(spec.x_label) << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << H / 2 << ")\">"
     << xml_escape(spec.y_label) << "</text>\n";
  if (spec.diagonal) {
    const double lo = std::max(spec.x_min, spec.y_min), hi = std::min(spec.x_max, spec.y_max);
    os << "<line x1=\"" << num(px(lo)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(hi)) << "\" y2=\""
       << num(py(hi)) << "\" stroke=\"gray\"/>\n";
  }
  for (double v : spec.vlines)
    os << "<line x1=\"" << num(px(v)) << "\" y1=\"" << T << "\" x2=\"" << num(px(v)) << "\" y2=\"" << H - B
       << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = colors[s % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < ser.x.size(); ++i) {
      if (!std::isfinite(ser.y[i])) continue;
      os << num(px(ser.x[i])) << ',' << num(py(ser.y[i])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 16 * s << "\" text-anchor=\"end\" fill=\"" << color
       << "\">" << xml_escape(ser.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot open output file " + path.string());
  out << text;
  if (!out) throw ParameterError("failed writing " + path.string());
}

}  // namespace viral
