#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's numerical code.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "viral/model.hpp"

namespace oracle {

// Inflow accuracy by enumerating all 2^K feed compositions slot by slot.
inline double inflow_bruteforce(const viral::Strategy& sigma, const viral::ModelParams& p, double x) {
  const double theta = p.lambda * x + (1.0 - p.lambda) * p.q;
  double shared = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << p.K); ++mask) {
    int k = 0;
    double prob = 1.0;
    for (int i = 0; i < p.K; ++i) {
      const bool hit = (mask >> i) & 1u;
      k += hit;
      prob *= hit ? theta : 1.0 - theta;
    }
    double ez_pos = 0.0, ez_neg = 0.0;
    for (int z = 0; z <= p.C; ++z) {
      ez_pos += z * sigma.probability(viral::Signal::positive, k, z);
      ez_neg += z * sigma.probability(viral::Signal::negative, k, z);
    }
    shared += prob * (p.q * ez_pos + (1.0 - p.q) * ez_neg);
  }
  return (1.0 - p.iota) * (p.q + shared) / (p.C + 1.0);
}

// Random feasible strategy; about a third of the cells are pure.
inline viral::Strategy random_strategy(int K, int C, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  viral::Strategy::Rows neg(K + 1), pos(K + 1);
  for (auto* rows : {&neg, &pos})
    for (int k = 0; k <= K; ++k) {
      const int lo = viral::min_positive_shared(K, C, k), hi = viral::max_positive_shared(C, k);
      std::vector<double> row(C + 1, 0.0);
      if (u(rng) < 0.33) {
        row[lo + static_cast<int>(u(rng) * (hi - lo + 1)) % (hi - lo + 1)] = 1.0;
      } else {
        double sum = 0.0;
        for (int z = lo; z <= hi; ++z) sum += row[z] = u(rng);
        for (auto& v : row) v /= sum;
      }
      (*rows)[k] = row;
    }
  return viral::Strategy::from_rows(K, C, neg, pos);
}

// Symmetric version: the negative-signal rows mirror the positive ones.
inline viral::Strategy symmetrize(const viral::Strategy& s) {
  const int K = s.K(), C = s.C();
  viral::Strategy::Rows neg(K + 1, std::vector<double>(C + 1)), pos = neg;
  for (int k = 0; k <= K; ++k)
    for (int z = 0; z <= C; ++z) {
      pos[k][z] = s.probability(viral::Signal::positive, k, z);
      neg[K - k][C - z] = pos[k][z];
    }
  return viral::Strategy::from_rows(K, C, neg, pos);
}

}  // namespace oracle
