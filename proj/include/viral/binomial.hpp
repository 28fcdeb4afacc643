#pragma once

#include <span>

namespace viral {

// Binomial(K, p) probabilities for k = 0..K written to out (size K+1).
void binomial_pmf(int K, double p, std::span<double> out);
double binomial_pmf(int K, double p, int k);
double binomial_coefficient(int K, int k);

// Inversion sampling of Binomial(K, p) from one uniform u in [0, 1).
// For p > 1/2 the draw is taken as K - Binomial(K, 1 - p) so the tail walk
// is always short; this makes draws exactly mirror-symmetric in p.
int sample_binomial(int K, double p, double u);

}  // namespace viral
