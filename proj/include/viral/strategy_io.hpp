#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "viral/model.hpp"

namespace viral {

// {"K":int,"C":int,"table":{"s=+1":[[p0..pC] per k],"s=-1":[...]}}
nlohmann::json strategy_to_json(const Strategy& sigma);
Strategy strategy_from_json(const nlohmann::json& j);

std::string write_strategy(const Strategy& sigma);
Strategy read_strategy(const std::string& text);
Strategy load_strategy_file(const std::filesystem::path& path);

}  // namespace viral
