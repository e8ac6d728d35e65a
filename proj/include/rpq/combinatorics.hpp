#pragma once

#include <map>
#include <utility>
#include <vector>

#include "algebra.hpp"
#include "multi_index.hpp"

namespace rpq {

enum class Sign { plus, minus };

// (a +/- b)^(n) = prod_{i=1..n} (a tau1^(i-1) +/- b tau2^(i-1)); empty product for n = 0
template <class Real>
Real shifted_factorial(const DeformationAlgebra<Real>& alg, const Real& a,
                       const Real& b, long long n, Sign sign) {
  if (n < 0) throw domain_error("shifted_factorial: negative length");
  Real acc(1);
  Real t1p(1), t2p(1);
  for (long long i = 0; i < n; ++i) {
    Real factor = (sign == Sign::plus) ? a * t1p + b * t2p : a * t1p - b * t2p;
    acc *= factor;
    t1p *= alg.tau1();
    t2p *= alg.tau2();
  }
  return acc;
}

// [x choose r] = [x][x-1]...[x-r+1] / [r]!; zero for r < 0 and for 0 <= x < r
template <class Real>
Real binomial(const DeformationAlgebra<Real>& alg, long long x, long long r) {
  if (r < 0) return Real(0);
  if (x >= 0 && r > x) return Real(0);
  return alg.ordered_factorial(x, r) / alg.factorial(r);
}

// [x; r_1,...,r_k] = [x][x-1]...[x-s_k+1] / ([r_1]! ... [r_k]!)
template <class Real>
Real multinomial(const DeformationAlgebra<Real>& alg, long long x,
                 const MultiIndex& r) {
  long long sk = 0;
  for (auto v : r) {
    if (v < 0) return Real(0);
    sk += v;
  }
  if (x >= 0 && sk > x) return Real(0);
  Real acc = alg.ordered_factorial(x, sk);
  for (auto v : r) acc /= alg.factorial(v);
  return acc;
}

// same value assembled as a telescoping product of binomials
template <class Real>
Real multinomial_product_form(const DeformationAlgebra<Real>& alg, long long x,
                              const MultiIndex& r) {
  auto s = prefix_sums(r);
  Real acc(1);
  for (size_t j = 0; j < r.size(); ++j) acc *= binomial(alg, x - s[j], r[j]);
  return acc;
}

// Four one-step recurrences in the upper index. Each exists in two modes:
// "original" evaluates the formula in its commonly stated shape, which breaks
// down whenever tau1 != 1; "corrected" carries the extra tau powers that make
// the identity exact for every admissible algebra.
enum class RecurrenceVariant { tau1_head_s, tau2_head_s, tau2_head_m, tau1_head_m };
enum class FormulaMode { corrected, original };

inline const char* to_string(RecurrenceVariant v) {
  switch (v) {
    case RecurrenceVariant::tau1_head_s: return "tau1-head-s";
    case RecurrenceVariant::tau2_head_s: return "tau2-head-s";
    case RecurrenceVariant::tau2_head_m: return "tau2-head-m";
    case RecurrenceVariant::tau1_head_m: return "tau1-head-m";
  }
  return "?";
}

inline const char* to_string(FormulaMode m) {
  return m == FormulaMode::corrected ? "corrected" : "original";
}

template <class Real>
Real multinomial_by_recurrence(const DeformationAlgebra<Real>& alg, long long x,
                               const MultiIndex& r, RecurrenceVariant variant,
                               FormulaMode mode = FormulaMode::corrected) {
  const Real& t1 = alg.tau1();
  const Real& t2 = alg.tau2();
  const size_t k = r.size();
  std::map<std::pair<long long, MultiIndex>, Real> memo;

  auto rec = [&](auto&& self, long long xx, const MultiIndex& rr) -> Real {
    long long sk = 0;
    for (auto v : rr) {
      if (v < 0) return Real(0);
      sk += v;
    }
    if (sk == 0) return Real(1);
    if (sk > xx) return Real(0);
    auto key = std::make_pair(xx, rr);
    if (auto it = memo.find(key); it != memo.end()) return it->second;

    auto s = prefix_sums(rr);
    auto m = suffix_sums(rr);
    Real head(0);
    switch (variant) {
      case RecurrenceVariant::tau1_head_s:
        head = pow_int(t1, sk);
        break;
      case RecurrenceVariant::tau2_head_s:
      case RecurrenceVariant::tau2_head_m:
        head = pow_int(t2, sk);
        break;
      case RecurrenceVariant::tau1_head_m:
        head = (mode == FormulaMode::corrected) ? pow_int(t1, sk) : pow_int(t1, xx);
        break;
    }
    Real total = head * self(self, xx - 1, rr);
    for (size_t j = 1; j <= k; ++j) {
      if (rr[j - 1] == 0) continue;
      Real coef(1);
      switch (variant) {
        case RecurrenceVariant::tau1_head_s:
          coef = pow_int(t2, xx - m[j]);
          if (mode == FormulaMode::corrected) coef *= pow_int(t1, sk - s[j]);
          break;
        case RecurrenceVariant::tau2_head_s:
          coef = pow_int(t2, s[j - 1]) *
                 pow_int(t1, (mode == FormulaMode::corrected) ? xx - s[j] : xx - m[j]);
          break;
        case RecurrenceVariant::tau2_head_m:
          if (mode == FormulaMode::corrected) {
            coef = pow_int(t1, xx - m[j]) * pow_int(t2, m[j + 1]);
          } else {
            coef = (j < k) ? pow_int(t2, m[j + 1]) : pow_int(t1, xx);
          }
          break;
        case RecurrenceVariant::tau1_head_m:
          coef = pow_int(t2, xx - s[j]);
          if (mode == FormulaMode::corrected) coef *= pow_int(t1, s[j - 1]);
          break;
      }
      MultiIndex down = rr;
      --down[j - 1];
      total += coef * self(self, xx - 1, down);
    }
    memo.emplace(std::move(key), total);
    return total;
  };
  return rec(rec, x, r);
}

// Multinomial under parameter inversion, expressed through the original algebra.
// Both index conventions carry the same scaling prefactor in disguise and agree
// with evaluating the plain multinomial on invert_parameters(alg).
enum class InversionConvention { m_form, s_form };

template <class Real>
Real multinomial_inverse_params(const DeformationAlgebra<Real>& alg, long long x,
                                const MultiIndex& r, InversionConvention conv) {
  long long expo = 0;
  if (conv == InversionConvention::m_form) {
    auto m = suffix_sums(r);
    for (size_t j = 1; j <= r.size(); ++j) expo += r[j - 1] * (x - m[j]);
  } else {
    auto s = prefix_sums(r);
    for (size_t j = 1; j <= r.size(); ++j) expo += r[j - 1] * (x - s[j]);
  }
  Real tt = alg.tau1() * alg.tau2();
  return pow_int(tt, -expo) * multinomial(alg, x, r);
}

// Expansion of prod_j (1 (+) x_j)^(n) as a weighted multinomial sum. The
// corrected weight tau1^C(n - s_j, 2) makes the identity exact; the original
// weight tau1^C(n - r_j, 2) only matches when tau1 = 1.
template <class Real>
Real multinomial_theorem_sum(const DeformationAlgebra<Real>& alg,
                             const std::vector<Real>& xs, long long n,
                             FormulaMode mode = FormulaMode::corrected) {
  const int k = static_cast<int>(xs.size());
  if (k == 0) throw domain_error("multinomial_theorem_sum: empty argument list");
  CompensatedSum<Real> acc;
  for_each_index_bounded(k, n, [&](const MultiIndex& r) {
    auto s = prefix_sums(r);
    Real term = multinomial(alg, n, r);
    for (int j = 1; j <= k; ++j) {
      long long rj = r[j - 1];
      long long e1 = (mode == FormulaMode::corrected) ? tri2(n - s[j]) : tri2(n - rj);
      term *= pow_int(xs[j - 1], rj) * pow_int(alg.tau1(), e1) *
              pow_int(alg.tau2(), tri2(rj));
      term *= shifted_factorial(alg, pow_int(alg.tau1(), n - s[j - 1]),
                                xs[j - 1] * pow_int(alg.tau2(), n - s[j - 1]),
                                s[j - 1], Sign::plus);
    }
    acc.add(term);
  });
  return acc.value();
}

// reference value for the two series expansions above and below
template <class Real>
Real shifted_factorial_product(const DeformationAlgebra<Real>& alg,
                               const std::vector<Real>& xs, long long n, Sign sign) {
  Real acc(1);
  for (const Real& x : xs) acc *= shifted_factorial(alg, Real(1), x, n, sign);
  return acc;
}

// Infinite-series counterpart of the expansion, truncated at total order trunc.
// Converges to the same product only when tau2 < tau1; the corrected weight is
// tau1^(C(n + s_k - s_j, 2) + r_j). Throws if the retained terms stop decaying.
template <class Real>
Real negative_multinomial_theorem_sum(const DeformationAlgebra<Real>& alg,
                                      const std::vector<Real>& xs, long long n,
                                      long long trunc,
                                      FormulaMode mode = FormulaMode::corrected) {
  const int k = static_cast<int>(xs.size());
  if (k == 0) throw domain_error("negative_multinomial_theorem_sum: empty argument list");
  if (n < 1) throw domain_error("negative_multinomial_theorem_sum: n must be >= 1");
  CompensatedSum<Real> acc;
  Real last_shell_max(0);
  for (long long t = 0; t <= trunc; ++t) {
    Real shell_max(0);
    for_each_index_total(k, t, [&](const MultiIndex& r) {
      auto s = prefix_sums(r);
      long long sk = s[k];
      Real term = multinomial(alg, n + sk - 1, r);
      for (int j = 1; j <= k; ++j) {
        long long rj = r[j - 1];
        long long e1 = (mode == FormulaMode::corrected) ? tri2(n + sk - s[j]) + rj
                                                        : tri2(n - rj);
        term *= pow_int(xs[j - 1], rj) * pow_int(alg.tau1(), e1) *
                pow_int(alg.tau2(), tri2(rj));
        term /= shifted_factorial(alg, pow_int(alg.tau1(), n),
                                  xs[j - 1] * pow_int(alg.tau2(), n),
                                  sk - s[j - 1], Sign::plus);
      }
      ensure_finite(term, "negative_multinomial_theorem_sum");
      Real mag = abs_value(term);
      if (mag > shell_max) shell_max = mag;
      acc.add(term);
    });
    if (t > 2 && shell_max > last_shell_max * Real(4) && shell_max > Real(1e6))
      throw numeric_error("negative_multinomial_theorem_sum: terms do not decay");
    last_shell_max = shell_max;
  }
  return acc.value();
}

// Expansion of (1 (-) x_1 ... x_(k+1))^(n); exact in this shape for every preset.
// xs must carry k+1 entries.
template <class Real>
Real alternative_multinomial_sum(const DeformationAlgebra<Real>& alg,
                                 const std::vector<Real>& xs, long long n) {
  const int k = static_cast<int>(xs.size()) - 1;
  if (k < 1) throw domain_error("alternative_multinomial_sum: needs at least 2 arguments");
  CompensatedSum<Real> acc;
  for_each_index_bounded(k, n, [&](const MultiIndex& r) {
    auto s = prefix_sums(r);
    Real term = multinomial(alg, n, r);
    for (int j = 1; j <= k; ++j) {
      term *= pow_int(xs[j - 1], n - s[j]) *
              shifted_factorial(alg, Real(1), xs[j - 1], r[j - 1], Sign::minus);
    }
    term *= shifted_factorial(alg, Real(1), xs[k], n - s[k], Sign::minus);
    acc.add(term);
  });
  return acc.value();
}

template <class Real>
struct IdentityCheck {
  Real lhs{};
  Real rhs{};
  Real abs_residual() const { return abs_value(lhs - rhs); }
  Real rel_residual() const {
    Real scale = abs_value(lhs) + abs_value(rhs);
    if (scale == Real(0)) return Real(0);
    return abs_value(lhs - rhs) / scale;
  }
};

// Two telescoping summation identities over the bounded index set.
// form 1 pairs x_j^(n-s_j) with (1 (-) x_j)^(r_j); its original and corrected
// global weights are algebraically identical. form 2 swaps the exponents; there
// the original weight fails for tau1 != 1 and the corrected weight is the
// product tau1^(-sum_j [r_j (n-s_j) + C(n-s_j,2)]) applied per term.
enum class CorollaryForm { form1, form2 };

template <class Real>
IdentityCheck<Real> corollary_sum(const DeformationAlgebra<Real>& alg,
                                  const std::vector<Real>& xs, long long n,
                                  CorollaryForm form,
                                  FormulaMode mode = FormulaMode::corrected) {
  const int k = static_cast<int>(xs.size());
  if (k == 0) throw domain_error("corollary_sum: empty argument list");
  CompensatedSum<Real> acc;
  for_each_index_bounded(k, n, [&](const MultiIndex& r) {
    auto s = prefix_sums(r);
    Real term = multinomial(alg, n, r);
    for (int j = 1; j <= k; ++j) {
      long long hi = (form == CorollaryForm::form1) ? n - s[j] : r[j - 1];
      long long lo = (form == CorollaryForm::form1) ? r[j - 1] : n - s[j];
      term *= pow_int(xs[j - 1], hi) *
              shifted_factorial(alg, Real(1), xs[j - 1], lo, Sign::minus);
    }
    long long e;
    if (form == CorollaryForm::form1) {
      e = (mode == FormulaMode::corrected) ? tri2(n - s[k]) : tri2(n - s[k]) - tri2(n);
    } else {
      if (mode == FormulaMode::corrected) {
        e = 0;
        for (int j = 1; j <= k; ++j) e -= r[j - 1] * (n - s[j]) + tri2(n - s[j]);
      } else {
        e = tri2(n - s[k]) - tri2(n);
      }
    }
    acc.add(term * pow_int(alg.tau1(), e));
  });
  Real rhs = (form == CorollaryForm::form1 && mode == FormulaMode::corrected)
                 ? pow_int(alg.tau1(), tri2(n))
                 : Real(1);
  return {acc.value(), rhs};
}

// Companion summation in a classical shape, evaluated verbatim and only ever
// reported: lhs is (1 (-) x_1...x_k)^(n), rhs the weighted sum with a caller
// supplied leading argument x0.
template <class Real>
IdentityCheck<Real> gasper_rahman_sum(const DeformationAlgebra<Real>& alg,
                                      const std::vector<Real>& xs, long long n,
                                      const Real& x0) {
  const int k = static_cast<int>(xs.size());
  if (k == 0) throw domain_error("gasper_rahman_sum: empty argument list");
  Real lambda(1);
  for (const Real& x : xs) lambda *= x;
  Real lhs = shifted_factorial(alg, Real(1), lambda, n, Sign::minus);
  CompensatedSum<Real> acc;
  for_each_index_bounded(k, n, [&](const MultiIndex& r) {
    auto s = prefix_sums(r);
    Real term = multinomial(alg, n, r);
    for (int j = 1; j <= k; ++j) {
      const Real& prev = (j == 1) ? x0 : xs[j - 2];
      term *= pow_int(xs[j - 1], s[j]) *
              shifted_factorial(alg, Real(1), prev, n, Sign::minus);
    }
    term *= shifted_factorial(alg, Real(1), xs[k - 1], n - s[k], Sign::minus);
    acc.add(term);
  });
  return {lhs, acc.value()};
}

}  // namespace rpq
