#include "viral/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace viral {

Polynomial::Polynomial(std::vector<long double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0L);
}

long double Polynomial::operator()(long double x) const {
  long double acc = 0.0L;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial({0.0L});
  std::vector<long double> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long double>(i);
  return Polynomial(std::move(d));
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<long double> r(std::max(c_.size(), o.c_.size()), 0.0L);
  for (std::size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (std::size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const { return *this + o * -1.0L; }

Polynomial Polynomial::operator*(const Polynomial& o) const {
  std::vector<long double> r(c_.size() + o.c_.size() - 1, 0.0L);
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(long double s) const {
  std::vector<long double> r = c_;
  for (auto& v : r) v *= s;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::trimmed(long double rel_tol) const {
  long double scale = 0.0L;
  for (auto v : c_) scale = std::max(scale, std::fabs(v));
  std::vector<long double> r = c_;
  while (r.size() > 1 && std::fabs(r.back()) <= rel_tol * scale) r.pop_back();
  return Polynomial(std::move(r));
}

namespace {

// Remainder of a / b (b with nonzero leading coefficient).
Polynomial remainder(const Polynomial& a, const Polynomial& b) {
  std::vector<long double> r = a.coefficients();
  const auto& d = b.coefficients();
  const int db = b.degree();
  for (int i = static_cast<int>(r.size()) - 1; i >= db; --i) {
    const long double f = r[i] / d[db];
    for (int j = 0; j <= db; ++j) r[i - db + j] -= f * d[j];
    r[i] = 0.0L;
  }
  if (db == 0) return Polynomial({0.0L});
  r.resize(db);
  return Polynomial(std::move(r));
}

int sign_changes(const std::vector<Polynomial>& seq, long double x) {
  int changes = 0;
  int last = 0;
  for (const auto& p : seq) {
    const long double v = p(x);
    const int s = v > 0 ? 1 : (v < 0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

int count_distinct_roots(const Polynomial& p, long double lo, long double hi) {
  constexpr long double kTrim = 1e-14L;
  std::vector<Polynomial> seq;
  seq.push_back(p.trimmed(kTrim));
  if (seq.back().degree() <= 0) return 0;
  seq.push_back(seq.back().derivative().trimmed(kTrim));
  while (seq.back().degree() > 0) {
    Polynomial r = remainder(seq[seq.size() - 2], seq.back()) * -1.0L;
    // Relative to the dividend, so a vanishing remainder ends the chain.
    long double scale = 0.0L;
    for (auto v : seq[seq.size() - 2].coefficients()) scale = std::max(scale, std::fabs(v));
    bool zero = true;
    for (auto v : r.coefficients())
      if (std::fabs(v) > 1e-13L * scale) zero = false;
    if (zero) break;
    seq.push_back(r.trimmed(kTrim));
  }
  return sign_changes(seq, lo) - sign_changes(seq, hi);
}

}  // namespace viral
