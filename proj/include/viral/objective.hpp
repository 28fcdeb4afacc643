#pragma once

#include <functional>
#include <string>
#include <vector>

namespace viral {

// Named map f: [0, 1] -> R applied to final viral accuracy.
class Objective {
 public:
  static Objective accuracy();   // f(x) = x
  static Objective agreement();  // f(x) = |x - 1/2|
  // Values at x = i/(size-1), linearly interpolated; size must be 1025.
  static Objective tabulated(std::string name, std::vector<double> values);
  // Resolves "accuracy" or "agreement".
  static Objective by_name(const std::string& name);

  static constexpr std::size_t kTableSize = 1025;

  const std::string& name() const { return name_; }
  double operator()(double x) const { return f_(x); }

 private:
  Objective(std::string name, std::function<double(double)> f) : name_(std::move(name)), f_(std::move(f)) {}
  std::string name_;
  std::function<double(double)> f_;
};

}  // namespace viral
