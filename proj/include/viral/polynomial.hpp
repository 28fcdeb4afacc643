#pragma once

#include <vector>

namespace viral {

// Dense polynomial in the power basis, coefficient i multiplies x^i.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<long double> coeffs);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<long double>& coefficients() const { return c_; }
  long double operator()(long double x) const;
  Polynomial derivative() const;

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(long double s) const;

  // Drops leading coefficients below rel_tol times the largest magnitude.
  Polynomial trimmed(long double rel_tol = 0.0L) const;

 private:
  std::vector<long double> c_;
};

// Sturm-sequence count of distinct real roots in the half-open interval (lo, hi].
// Intended as a certificate for well-separated roots; nearly repeated roots
// are at the mercy of floating-point remainder sequences.
int count_distinct_roots(const Polynomial& p, long double lo, long double hi);

}  // namespace viral
