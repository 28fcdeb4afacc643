#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "viral/design.hpp"
#include "viral/equilibrium.hpp"
#include "viral/inflow.hpp"
#include "viral/simulation.hpp"

namespace viral {

using nlohmann::json;

json params_to_json(const ModelParams& p);
json fixed_point_to_json(const FixedPointReport& fp);
json critical_to_json(const CriticalWeightResult& r);
json statics_to_json(const StaticsTable& t);
json ensemble_stats_to_json(const EnsembleStats& st);
json posterior_to_json(const PosteriorTable& t);
json mixing_to_json(const MixingSolution& m);
json limit_to_json(const LimitEstimate& e);
json design_to_json(const DesignReport& r);
json robustness_to_json(const RobustnessReport& r);

// CSV bodies; every table starts with a "# config: <json>" line.
std::string csv_header(const json& config);
std::string fixed_points_csv(const json& config, const std::vector<FixedPointReport>& fps);
std::string inflow_curve_csv(const json& config, const InflowFunction& phi, int points);
std::string statics_csv(const json& config, const StaticsTable& t);
std::string runs_csv(const json& config, const std::vector<RunResult>& runs);
std::string paths_csv(const json& config, const std::vector<RunResult>& runs);
std::string posterior_csv(const json& config, const std::vector<PosteriorTable>& tables);
std::string mixing_csv(const json& config, const LimitEstimate& e);
std::string design_csv(const json& config, const DesignReport& r);
std::string robustness_csv(const json& config, const RobustnessReport& r);

// {"config": config, <key>: body} pretty-printed with a trailing newline.
std::string json_document(const json& config, const std::string& key, const json& body);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  bool diagonal = false;  // draw y = x
  std::vector<double> vlines;  // dashed vertical reference lines
};

std::string svg_line_plot(const PlotSpec& spec, const std::vector<PlotSeries>& series);

// Writes text to path, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace viral
