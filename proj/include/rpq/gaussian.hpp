#pragma once

#include "multi_index.hpp"
#include "numeric.hpp"

namespace rpq {

// Classical single-parameter Gaussian coefficients. Kept free of any
// DeformationAlgebra machinery so they can serve as an independent reference
// implementation in the verification suite.

template <class Real>
Real q_number(const Real& q, long long n) {
  CompensatedSum<Real> acc;
  Real p(1);
  for (long long i = 0; i < n; ++i) {
    acc.add(p);
    p *= q;
  }
  return acc.value();
}

template <class Real>
Real q_factorial(const Real& q, long long n) {
  if (n < 0) throw domain_error("q_factorial: negative argument");
  Real acc(1);
  for (long long i = 1; i <= n; ++i) acc *= q_number(q, i);
  return acc;
}

template <class Real>
Real gaussian_binomial(const Real& q, long long m, long long n) {
  if (n < 0 || n > m) return Real(0);
  Real acc(1);
  for (long long i = 0; i < n; ++i) acc *= q_number(q, m - i);
  return acc / q_factorial(q, n);
}

template <class Real>
Real gaussian_multinomial(const Real& q, long long n, const MultiIndex& r) {
  auto s = prefix_sums(r);
  Real acc(1);
  for (size_t j = 0; j < r.size(); ++j) {
    if (r[j] < 0) return Real(0);
    acc *= gaussian_binomial(q, n - s[j], r[j]);
  }
  return acc;
}

}  // namespace rpq
