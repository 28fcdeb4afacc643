#include "viral/objective.hpp"

#include <algorithm>
#include <cmath>

#include "viral/errors.hpp"

namespace viral {

Objective Objective::accuracy() {
  return Objective("accuracy", [](double x) { return x; });
}

Objective Objective::agreement() {
  return Objective("agreement", [](double x) { return std::abs(x - 0.5); });
}

Objective Objective::tabulated(std::string name, std::vector<double> values) {
  if (values.size() != kTableSize)
    throw ParameterError("tabulated objective needs " + std::to_string(kTableSize) + " values");
  for (double v : values)
    if (!std::isfinite(v)) throw ParameterError("tabulated objective has a non-finite value");
  return Objective(std::move(name), [v = std::move(values)](double x) {
    const double pos = std::clamp(x, 0.0, 1.0) * (kTableSize - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(pos), kTableSize - 2);
    const double w = pos - static_cast<double>(i);
    return (1.0 - w) * v[i] + w * v[i + 1];
  });
}

Objective Objective::by_name(const std::string& name) {
  if (name == "accuracy") return accuracy();
  if (name == "agreement") return agreement();
  throw ParameterError("unknown objective '" + name + "' (expected accuracy or agreement)");
}

}  // namespace viral
