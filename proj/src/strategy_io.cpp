#include "viral/strategy_io.hpp"

#include <fstream>
#include <sstream>

namespace viral {

using nlohmann::json;

namespace {

Strategy::Rows rows_from(const json& j, const char* key, int K, int C) {
  if (!j.contains(key)) throw ParameterError(std::string("strategy JSON: table is missing \"") + key + "\"");
  const json& rows = j.at(key);
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(K + 1))
    throw ParameterError(std::string("strategy JSON: table.") + key + " needs K+1 rows");
  Strategy::Rows out;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != static_cast<std::size_t>(C + 1))
      throw ParameterError(std::string("strategy JSON: table.") + key + " rows need C+1 numbers");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ParameterError(std::string("strategy JSON: table.") + key + " has a non-number");
      r.push_back(v.get<double>());
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

json strategy_to_json(const Strategy& sigma) {
  json table = json::object();
  for (Signal s : {Signal::positive, Signal::negative}) {
    json rows = json::array();
    for (int k = 0; k <= sigma.K(); ++k) {
      auto d = sigma.distribution(s, k);
      rows.push_back(std::vector<double>(d.begin(), d.end()));
    }
    table[s == Signal::positive ? "s=+1" : "s=-1"] = std::move(rows);
  }
  return json{{"K", sigma.K()}, {"C", sigma.C()}, {"table", std::move(table)}};
}

Strategy strategy_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("strategy JSON: expected an object");
  for (const char* key : {"K", "C"})
    if (!j.contains(key) || !j.at(key).is_number_integer())
      throw ParameterError(std::string("strategy JSON: field \"") + key + "\" must be an integer");
  if (!j.contains("table") || !j.at("table").is_object())
    throw ParameterError("strategy JSON: field \"table\" must be an object");
  const int K = j.at("K").get<int>();
  const int C = j.at("C").get<int>();
  if (K < 2 || K > kMaxFeedSize || C < 1 || 2 * C > K)
    throw ParameterError("strategy JSON: K and C must satisfy 1 <= C, 2C <= K <= 64");
  const json& t = j.at("table");
  return Strategy::from_rows(K, C, rows_from(t, "s=-1", K, C), rows_from(t, "s=+1", K, C));
}

std::string write_strategy(const Strategy& sigma) { return strategy_to_json(sigma).dump(); }

Strategy read_strategy(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParameterError(std::string("strategy JSON: malformed: ") + e.what());
  }
  return strategy_from_json(j);
}

Strategy load_strategy_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("strategy file not readable: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return read_strategy(ss.str());
}

}  // namespace viral
