#include "viral/binomial.hpp"

#include <array>
#include <cmath>

#include "viral/model.hpp"

namespace viral {

namespace {

struct PascalTable {
  std::array<std::array<double, kMaxFeedSize + 1>, kMaxFeedSize + 1> c{};
  PascalTable() {
    for (int n = 0; n <= kMaxFeedSize; ++n) {
      c[n][0] = c[n][n] = 1.0;
      for (int k = 1; k < n; ++k) c[n][k] = c[n - 1][k - 1] + c[n - 1][k];
    }
  }
};

// (K - k) / (k + 1), the pmf step ratio without the odds factor.
struct StepTable {
  std::array<std::array<double, kMaxFeedSize + 1>, kMaxFeedSize + 1> r{};
  StepTable() {
    for (int n = 0; n <= kMaxFeedSize; ++n)
      for (int k = 0; k < n; ++k) r[n][k] = static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
};

const StepTable& steps() {
  static const StepTable table;
  return table;
}

const PascalTable& pascal() {
  static const PascalTable table;
  return table;
}

}  // namespace

double binomial_coefficient(int K, int k) {
  if (k < 0 || k > K || K > kMaxFeedSize) return 0.0;
  return pascal().c[K][k];
}

void binomial_pmf(int K, double p, std::span<double> out) {
  const auto& c = pascal().c[K];
  // out[k] <- p^k, then multiply by (1-p)^(K-k) walking down.
  double pk = 1.0;
  for (int k = 0; k <= K; ++k) {
    out[k] = pk;
    pk *= p;
  }
  const double r = 1.0 - p;
  double rk = 1.0;
  for (int k = K; k >= 0; --k) {
    out[k] *= rk * c[k];
    rk *= r;
  }
}

double binomial_pmf(int K, double p, int k) {
  if (k < 0 || k > K) return 0.0;
  return binomial_coefficient(K, k) * std::pow(p, k) * std::pow(1.0 - p, K - k);
}

int sample_binomial(int K, double p, double u) {
  const bool flip = p > 0.5;
  const double pp = flip ? 1.0 - p : p;
  if (pp <= 0.0) return flip ? K : 0;
  const double ratio = pp / (1.0 - pp);
  double pmf = 1.0, base = 1.0 - pp;
  for (int e = K; e > 0; e >>= 1, base *= base)
    if (e & 1) pmf *= base;
  double cdf = pmf;
  const auto& step = steps().r[K];
  int k = 0;
  while (u >= cdf && k < K) {
    pmf *= ratio * step[k];
    ++k;
    cdf += pmf;
  }
  return flip ? K - k : k;
}

}  // namespace viral
