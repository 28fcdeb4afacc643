#include "viral/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace viral {

namespace {

constexpr double kNormTol = 1e-12;

std::string describe(Signal s, int k) {
  std::ostringstream os;
  os << "(s=" << (s == Signal::positive ? "+1" : "-1") << ", k=" << k << ")";
  return os.str();
}

}  // namespace

void validate_environment(double q, int K, int C) {
  if (!(q > 0.5 && q < 1.0)) throw ParameterError("q must lie in (0.5, 1)");
  if (K < 2 || K > kMaxFeedSize)
    throw ParameterError("K must lie in [2, " + std::to_string(kMaxFeedSize) + "]");
  if (C < 1) throw ParameterError("C must be at least 1");
  if (2 * C > K) throw ParameterError("C must satisfy 2C <= K");
}

void ModelParams::validate() const {
  validate_environment(q, K, C);
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ParameterError("lambda must lie in [0, 1]");
  if (!(iota >= 0.0 && iota < 1.0)) throw ParameterError("iota must lie in [0, 1)");
  if (n <= K) throw ParameterError("n must exceed K");
}

ModelParams ModelParams::with_lambda(double l) const {
  ModelParams p = *this;
  p.lambda = l;
  return p;
}

ModelParams ModelParams::with_iota(double i) const {
  ModelParams p = *this;
  p.iota = i;
  return p;
}

ModelParams ModelParams::with_n(std::int64_t agents) const {
  ModelParams p = *this;
  p.n = agents;
  return p;
}

Strategy Strategy::from_rows(int K, int C, const Rows& negative, const Rows& positive) {
  if (K < 2 || K > kMaxFeedSize || C < 1 || 2 * C > K)
    throw ParameterError("strategy dimensions need 1 <= C, 2C <= K <= 64");
  if (negative.size() != static_cast<std::size_t>(K + 1) ||
      positive.size() != static_cast<std::size_t>(K + 1))
    throw ParameterError("strategy table needs K+1 rows per signal");

  Strategy s(K, C);
  s.probs_.assign(2 * (K + 1) * (C + 1), 0.0);
  for (Signal sig : {Signal::negative, Signal::positive}) {
    const Rows& rows = sig == Signal::positive ? positive : negative;
    for (int k = 0; k <= K; ++k) {
      const auto& row = rows[k];
      if (row.size() != static_cast<std::size_t>(C + 1))
        throw ParameterError("strategy row " + describe(sig, k) + " needs C+1 entries");
      const int lo = min_positive_shared(K, C, k);
      const int hi = max_positive_shared(C, k);
      double sum = 0.0;
      for (int z = 0; z <= C; ++z) {
        const double p = row[z];
        if (!std::isfinite(p) || p < 0.0)
          throw ParameterError("strategy entry " + describe(sig, k) + " is negative or not finite");
        if ((z < lo || z > hi) && p > kNormTol)
          throw ParameterError("strategy " + describe(sig, k) + " puts mass on infeasible z=" +
                               std::to_string(z));
        sum += p;
      }
      if (std::abs(sum - 1.0) > kNormTol)
        throw ParameterError("strategy row " + describe(sig, k) + " does not sum to 1");
      // Only rescale when the deviation exceeds accumulated rounding, so that
      // values read back from a written table stay bit-identical.
      const bool rescale = std::abs(sum - 1.0) > 4.0 * (C + 1) * std::numeric_limits<double>::epsilon();
      double* out = s.probs_.data() + s.offset(sig, k);
      for (int z = lo; z <= hi; ++z) out[z] = rescale ? row[z] / sum : row[z];
    }
  }
  s.finalize();
  return s;
}

Strategy Strategy::pure(int K, int C, const std::vector<int>& z_negative,
                        const std::vector<int>& z_positive) {
  if (z_negative.size() != static_cast<std::size_t>(K + 1) ||
      z_positive.size() != static_cast<std::size_t>(K + 1))
    throw ParameterError("pure strategy needs K+1 choices per signal");
  Rows neg(K + 1, std::vector<double>(C + 1, 0.0));
  Rows pos = neg;
  for (int k = 0; k <= K; ++k) {
    if (z_negative[k] < 0 || z_negative[k] > C || z_positive[k] < 0 || z_positive[k] > C)
      throw ParameterError("pure strategy choice outside [0, C]");
    neg[k][z_negative[k]] = 1.0;
    pos[k][z_positive[k]] = 1.0;
  }
  return from_rows(K, C, neg, pos);
}

void Strategy::finalize() {
  means_.assign(2 * (K_ + 1), 0.0);
  for (Signal sig : {Signal::negative, Signal::positive}) {
    for (int k = 0; k <= K_; ++k) {
      const double* p = probs_.data() + offset(sig, k);
      double m = 0.0;
      for (int z = 0; z <= C_; ++z) m += z * p[z];
      means_[index_of(sig) * (K_ + 1) + k] = m;
    }
  }
}

std::span<const double> Strategy::distribution(Signal s, int k) const {
  if (k < 0 || k > K_) throw ParameterError("feed count k outside [0, K]");
  return {probs_.data() + offset(s, k), static_cast<std::size_t>(C_ + 1)};
}

double Strategy::probability(Signal s, int k, int z) const {
  if (z < 0 || z > C_) throw ParameterError("share count z outside [0, C]");
  return distribution(s, k)[z];
}

double Strategy::expectation(Signal s, int k) const {
  if (k < 0 || k > K_) throw ParameterError("feed count k outside [0, K]");
  return means_[index_of(s) * (K_ + 1) + k];
}

bool Strategy::is_state_symmetric(double tol) const {
  for (Signal sig : {Signal::negative, Signal::positive})
    for (int k = 0; k <= K_; ++k)
      for (int z = 0; z <= C_; ++z) {
        const double a = probs_[offset(sig, k) + z];
        const double b = probs_[offset(opposite(sig), K_ - k) + (C_ - z)];
        if (std::abs(a - b) > tol) return false;
      }
  return true;
}

Strategy Strategy::mirrored() const {
  Strategy m(K_, C_);
  m.probs_.assign(probs_.size(), 0.0);
  for (Signal sig : {Signal::negative, Signal::positive})
    for (int k = 0; k <= K_; ++k)
      for (int z = 0; z <= C_; ++z)
        m.probs_[m.offset(sig, k) + z] = probs_[offset(opposite(sig), K_ - k) + (C_ - z)];
  m.finalize();
  return m;
}

Strategy majority_rule(int K, int C, MajorityTieBreak tie) {
  if (K < 2 || K > kMaxFeedSize || C < 1 || 2 * C > K)
    throw ParameterError("majority rule needs 1 <= C, 2C <= K <= 64");
  std::vector<int> zneg(K + 1), zpos(K + 1);
  for (int k = 0; k <= K; ++k) {
    const bool pos_majority = 2 * k > K;
    const bool even_split = 2 * k == K;
    zpos[k] = (pos_majority || even_split) ? C : 0;
    zneg[k] = pos_majority ? C : 0;
  }
  if (tie == MajorityTieBreak::signal && K % 2 == 1) {
    // One-story feed margin against the private signal.
    zneg[(K + 1) / 2] = 0;
    zpos[(K - 1) / 2] = C;
  }
  return Strategy::pure(K, C, zneg, zpos);
}

Strategy majority_rule(const ModelParams& params, MajorityTieBreak tie) {
  params.validate();
  return majority_rule(params.K, params.C, tie);
}

double strategy_expectation(const Strategy& sigma, Signal s, int k) { return sigma.expectation(s, k); }

double sampling_accuracy(double x, const ModelParams& params, std::optional<double> z) {
  const double zz = z.value_or(params.q);
  if (!(x >= 0.0 && x <= 1.0) || !(zz >= 0.0 && zz <= 1.0))
    throw ParameterError("sampling accuracy needs x, z in [0, 1]");
  return params.lambda * x + (1.0 - params.lambda) * zz;
}

}  // namespace viral
