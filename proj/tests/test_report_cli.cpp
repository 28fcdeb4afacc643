#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "viral/cli.hpp"
#include "viral/report.hpp"

using namespace viral;
namespace fs = std::filesystem;

namespace {

struct Cli {
  int code = 0;
  std::string out, err;
};

std::string json_line(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] == '{') return line;
  return {};
}

Cli run(std::vector<std::string> args) {
  args.insert(args.begin(), "viral");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Cli r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("viral_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("lambda-star prints the critical weight") {
  const auto dir = scratch("lstar");
  const auto r = run({"lambda-star", "--q", "0.55", "--K", "7", "--C", "3", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto j = json::parse(json_line(r.out));
  CHECK(j.at("lambda_star").get<double>() == doctest::Approx(0.759625).epsilon(1e-5));
  const auto doc = json::parse(slurp(dir / "lambda_star.json"));
  CHECK(doc.at("config").at("q") == 0.55);
  CHECK(doc.contains("critical"));

  const auto never = run({"lambda-star", "--q", "0.9", "--K", "2", "--C", "1", "--out", dir.string()});
  REQUIRE(never.code == 0);
  CHECK(json::parse(json_line(never.out)).at("lambda_star").is_null());
}

TEST_CASE("analyze writes the census") {
  const auto dir = scratch("analyze");
  const auto r = run({"analyze", "--q", "0.55", "--K", "7", "--C", "3", "--lambda", "0.6", "--svg", "--out",
                      dir.string()});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(slurp(dir / "analyze.json"));
  REQUIRE(doc.at("fixed_points").size() == 1);
  CHECK(doc.at("fixed_points")[0].at("label") == "strictly_informative");
  const auto csv = slurp(dir / "fixed_points.csv");
  CHECK(csv.rfind("# config: ", 0) == 0);
  CHECK(csv.find("\nx,residual,sampling_accuracy,stability,label\n") != std::string::npos);
  CHECK(slurp(dir / "inflow.svg").find("<svg") != std::string::npos);
  CHECK(slurp(dir / "inflow.csv").find("\nx,phi,excess\n") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("codes");
  CHECK(run({"analyze", "--q", "0.4", "--out", dir.string()}).code == 2);
  CHECK(run({"analyze", "--K", "3", "--C", "2", "--out", dir.string()}).code == 2);
  CHECK(run({"simulate", "--strategy", "no_such_file.json", "--out", dir.string()}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  const auto unresolved = run({"design", "--q", "0.55", "--K", "7", "--C", "3", "--lambda-grid", "0.5,0.9",
                               "--runs", "10", "--n", "100", "--out", dir.string()});
  CHECK(unresolved.code == 3);
  CHECK(unresolved.err.find("unresolved") != std::string::npos);
  CHECK(run({"robustness", "--q", "0.55", "--K", "7", "--C", "3", "--lambda", "0.9", "--out", dir.string()}).code ==
        2);
}

TEST_CASE("malformed config names the field") {
  const auto dir = scratch("badcfg");
  const auto cfg = dir / "cfg.json";
  std::ofstream(cfg) << R"({"q": 0.55, "K": 7, "C": 3, "runz": 10})";
  auto r = run({"simulate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("runz") != std::string::npos);
  std::ofstream(cfg) << R"({"q": "high"})";
  r = run({"simulate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("q") != std::string::npos);
  std::ofstream(cfg) << "{not json";
  CHECK(run({"simulate", "--config", cfg.string(), "--out", dir.string()}).code == 2);
}

TEST_CASE("simulate is reproducible from its embedded config") {
  const auto a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  const std::vector<std::string> args = {"simulate", "--q", "0.55", "--K", "7", "--C", "3", "--lambda", "0.6",
                                         "--n", "500", "--runs", "20", "--seed", "7", "--path-points", "5"};
  auto with = [&](const fs::path& dir, std::vector<std::string> extra) {
    auto v = args;
    v.insert(v.end(), {"--out", dir.string()});
    v.insert(v.end(), extra.begin(), extra.end());
    return run(v);
  };
  REQUIRE(with(a, {"--threads", "1"}).code == 0);
  REQUIRE(with(b, {"--threads", "3"}).code == 0);
  for (const auto* f : {"runs.csv", "paths.csv", "ensemble.json"}) CHECK(slurp(a / f) == slurp(b / f));

  const auto runs = slurp(a / "runs.csv");
  CHECK(runs.find("\nrun,seed,final_x,final_z,assigned,basin,bots,idle_bots\n") != std::string::npos);
  const auto first = runs.substr(0, runs.find('\n'));
  const auto config = json::parse(first.substr(std::string("# config: ").size()));
  std::ofstream(c / "cfg.json") << config.dump();
  REQUIRE(run({"simulate", "--config", (c / "cfg.json").string(), "--out", c.string()}).code == 0);
  CHECK(slurp(c / "runs.csv") == runs);
  CHECK(slurp(c / "paths.csv") == slurp(a / "paths.csv"));
}

TEST_CASE("config json round trip") {
  RunConfig cfg;
  cfg.command = "design";
  cfg.params.q = 0.6;
  cfg.params.K = 5;
  cfg.params.C = 2;
  cfg.lambda_grid = {0.1, 0.2};
  cfg.equilibria[0.9] = "family:0.3";
  cfg.pivot = 1;
  RunConfig back;
  back.command = "design";
  apply_config_json(back, config_to_json(cfg));
  CHECK(config_to_json(back) == config_to_json(cfg));
  CHECK_FALSE(config_to_json(cfg).contains("threads"));
  CHECK_FALSE(config_to_json(cfg).contains("out_dir"));
}

TEST_CASE("equilibrium and design artifacts") {
  const auto dir = scratch("eqdesign");
  auto r = run({"equilibrium", "--q", "0.55", "--K", "7", "--C", "3", "--lambda", "0.6", "--n", "2000", "--runs",
                "50", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "posteriors.csv").find("\nn,s,k,belief,se,count,mirror_count,low_confidence\n") !=
        std::string::npos);
  CHECK(json::parse(slurp(dir / "equilibrium.json")).at("equilibrium").contains("self_consistent"));

  r = run({"equilibrium", "--q", "0.51", "--K", "6", "--C", "3", "--lambda", "1", "--n", "1000", "--runs", "40",
           "--p-grid", "0.1,0.3,0.5", "--svg", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto mixing = slurp(dir / "mixing.csv");
  CHECK(mixing.find("\nn,p,gap,gap_se\n") != std::string::npos);
  CHECK(mixing.find("\nsteady_state,") != std::string::npos);

  r = run({"design", "--q", "0.51", "--K", "6", "--C", "3", "--n", "1000", "--runs", "30", "--lambda-grid",
           "0.5,1", "--equilibrium", "1=family:0.32", "--svg", "--out", dir.string()});
  REQUIRE(r.code == 0);
  const auto design = slurp(dir / "design.csv");
  CHECK(design.find("\nlambda,objective,estimate,ci_lo,ci_hi,runs,estimator,equilibrium\n") != std::string::npos);
  CHECK(design.find("family:0.32") != std::string::npos);

  r = run({"robustness", "--q", "0.55", "--K", "7", "--C", "3", "--lambda", "0.6", "--runs", "5", "--n", "500",
           "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(dir / "robustness.csv").find("\niota,fixed_points,misleading,informative_x,max_cluster_gap,unassigned\n") !=
        std::string::npos);

  r = run({"statics", "--q-grid", "0.55,0.7", "--k-max", "5", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("0 flagged") != std::string::npos);
}

TEST_CASE("svg plot skips missing values") {
  PlotSpec spec;
  spec.title = "t <&>";
  const auto svg = svg_line_plot(spec, {{"a", {0.0, 0.5, 1.0}, {0.0, std::nan(""), 1.0}}});
  CHECK(svg.find("&lt;&amp;&gt;") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
}
