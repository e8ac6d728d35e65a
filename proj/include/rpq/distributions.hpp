#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "combinatorics.hpp"

namespace rpq {

// The two unbounded first-kind variants have mirrored domains: the
// success-counting form sums to 1 when tau2 < tau1, the failure-counting form
// when tau2 > tau1. On the wrong side the mass genuinely falls short of 1
// (for the failure-counting form at n = 1 it telescopes to
// 1 - prod_i (1 + theta w^i)^(-1)); tables there come back truncated with the
// deficit reported, they are not an accuracy bug.
enum class Kind {
  first_kind,
  negative_first_kind,
  negative_first_kind_failures,
  second_kind,
  second_kind_successes,
  negative_second_kind,
  multiple_heine,
  multiple_euler,
  absorption_second_kind,
  absorption_successes,
};

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::first_kind: return "first-kind";
    case Kind::negative_first_kind: return "negative-first-kind";
    case Kind::negative_first_kind_failures: return "negative-first-kind-failures";
    case Kind::second_kind: return "second-kind";
    case Kind::second_kind_successes: return "second-kind-successes";
    case Kind::negative_second_kind: return "negative-second-kind";
    case Kind::multiple_heine: return "multiple-heine";
    case Kind::multiple_euler: return "multiple-euler";
    case Kind::absorption_second_kind: return "absorption-second-kind";
    case Kind::absorption_successes: return "absorption-successes";
  }
  return "?";
}

inline Kind kind_from_string(std::string_view s) {
  if (s == "first-kind") return Kind::first_kind;
  if (s == "negative-first-kind") return Kind::negative_first_kind;
  if (s == "negative-first-kind-failures") return Kind::negative_first_kind_failures;
  if (s == "second-kind") return Kind::second_kind;
  if (s == "second-kind-successes") return Kind::second_kind_successes;
  if (s == "negative-second-kind") return Kind::negative_second_kind;
  if (s == "multiple-heine") return Kind::multiple_heine;
  if (s == "multiple-euler") return Kind::multiple_euler;
  if (s == "absorption-second-kind") return Kind::absorption_second_kind;
  if (s == "absorption-successes") return Kind::absorption_successes;
  throw domain_error("unknown distribution kind: " + std::string(s));
}

// support bounded by n (single table sweep) vs infinite support (shell sweep)
inline bool kind_is_finite(Kind k) {
  switch (k) {
    case Kind::first_kind:
    case Kind::second_kind:
    case Kind::second_kind_successes:
    case Kind::absorption_second_kind:
    case Kind::absorption_successes:
      return true;
    default:
      return false;
  }
}

// kinds whose trials condition on the running success count and therefore need
// the per-state probability walk at construction
inline bool kind_uses_state_conditioning(Kind k) {
  switch (k) {
    case Kind::second_kind:
    case Kind::second_kind_successes:
    case Kind::negative_second_kind:
    case Kind::absorption_second_kind:
    case Kind::absorption_successes:
      return true;
    default:
      return false;
  }
}

inline bool kind_uses_absorption(Kind k) {
  return k == Kind::absorption_second_kind || k == Kind::absorption_successes;
}

inline bool kind_is_limit(Kind k) {
  return k == Kind::multiple_heine || k == Kind::multiple_euler;
}

template <class Real>
struct Truncation {
  Real eps_tail = Real(1e-12);
  long long max_index = 500;
};

// Validated description of one distribution. For absorption kinds the caller
// supplies levels m_j > 0; the effective theta_j = (tau2/tau1)^(m_j) and all
// evaluation runs on the parameter-inverted algebra.
template <class Real>
struct DistributionSpec {
  Kind kind;
  long long n = 0;
  int k = 1;
  std::vector<Real> theta;       // effective per-kind parameter
  std::vector<Real> m_abs;       // absorption levels; empty for other kinds
  DeformationAlgebra<Real> base;
  DeformationAlgebra<Real> eval; // inverted for absorption kinds, else == base
  Truncation<Real> trunc;
  std::vector<Real> mu;          // limit kinds: theta_j / (tau1 - tau2)
  std::vector<Real> exp_prefactor; // limit kinds: e(-mu_j) resp. E(-mu_j)
};

namespace detail {

// walk the reachable success states and reject any trial probability outside
// [0,1]; a state where failure is certain is a wall: later states are
// unreachable, which is fine for bounded-trial kinds but starves the
// negative kinds of their target count
template <class Real>
void validate_state_walk(Kind kind, const DeformationAlgebra<Real>& eval,
                         const std::vector<Real>& theta, long long n) {
  const Real w = eval.w();
  const Real tol = Real(4) * std::numeric_limits<Real>::epsilon();
  for (size_t j = 0; j < theta.size(); ++j) {
    Real f = theta[j];
    for (long long c = 0; c < n; ++c) {
      if (f > Real(1) + tol)
        throw domain_error(std::string(to_string(kind)) +
                           ": failure probability exceeds 1 for kind " +
                           std::to_string(j + 1) + " at trial i=" +
                           std::to_string(c + 1));
      if (f >= Real(1) - tol) {
        if (kind == Kind::negative_second_kind)
          throw domain_error(std::string(to_string(kind)) +
                             ": success probability vanishes for kind " +
                             std::to_string(j + 1) + " at trial i=" +
                             std::to_string(c + 1) +
                             ", the target count is unreachable");
        break;  // wall: states beyond are unreachable
      }
      f *= w;
    }
  }
}

}  // namespace detail

template <class Real>
DistributionSpec<Real> make_distribution(Kind kind,
                                         const DeformationAlgebra<Real>& alg,
                                         long long n, std::vector<Real> theta_or_m,
                                         Truncation<Real> trunc = {},
                                         bool relax_theta_bound = false) {
  if (theta_or_m.empty())
    throw domain_error("distribution needs at least one parameter");
  for (const Real& v : theta_or_m)
    if (!is_finite_value(v) || !(v > Real(0)))
      throw domain_error(std::string(to_string(kind)) +
                         ": parameters must be positive and finite");
  const bool finite = kind_is_finite(kind);
  const bool limit = kind_is_limit(kind);
  if (finite && n < 0) throw domain_error("n must be non-negative");
  if (!finite && !limit && n < 1)
    throw domain_error(std::string(to_string(kind)) + ": n must be >= 1");
  if (!(trunc.eps_tail > Real(0)) || trunc.max_index < 1)
    throw domain_error("invalid truncation policy");

  DistributionSpec<Real> d{kind, n, static_cast<int>(theta_or_m.size()),
                           {},   {}, alg,
                           alg,  trunc, {}, {}};
  if (kind_uses_absorption(kind)) {
    using std::pow;
    d.m_abs = theta_or_m;
    const Real w = alg.w();
    if (!(w < Real(1)))
      throw domain_error(std::string(to_string(kind)) +
                         ": requires tau2 < tau1 (" + alg.name() +
                         " has tau2/tau1 >= 1)");
    d.theta.reserve(d.m_abs.size());
    for (const Real& m : d.m_abs) d.theta.push_back(pow(w, m));
    d.eval = invert_parameters(alg);
  } else {
    d.theta = std::move(theta_or_m);
  }

  if (!relax_theta_bound && !kind_uses_absorption(kind)) {
    for (size_t j = 0; j < d.theta.size(); ++j)
      if (!(d.theta[j] < Real(1)))
        throw domain_error(std::string(to_string(kind)) + ": theta_" +
                           std::to_string(j + 1) +
                           " must lie in (0,1); pass the relax flag to lift "
                           "the upper bound where the trial model allows it");
  }

  if (kind_uses_state_conditioning(kind))
    detail::validate_state_walk(kind, d.eval, d.theta, d.n);

  if (limit) {
    if (!(alg.tau1() > alg.tau2()))
      throw domain_error(std::string(to_string(kind)) +
                         ": requires tau1 > tau2 (" + alg.name() +
                         " does not satisfy this)");
    Real gap = alg.tau1() - alg.tau2();
    d.mu.reserve(d.theta.size());
    d.exp_prefactor.reserve(d.theta.size());
    for (const Real& th : d.theta) {
      Real m = th / gap;
      d.mu.push_back(m);
      d.exp_prefactor.push_back(kind == Kind::multiple_heine
                                    ? exp_small(alg, Real(-m))
                                    : exp_big(alg, Real(-m)));
    }
  }
  return d;
}

// Per-trial probabilities. For the odds-parameterized kinds i is the trial
// number; for the state-conditioned kinds i-1 is the current success count.
// .counted is the probability of the outcome the distribution counts.
template <class Real>
struct TrialOdds {
  Real counted;
  Real other;
};

template <class Real>
TrialOdds<Real> trial_probabilities(const DistributionSpec<Real>& d, int j,
                                    long long i) {
  if (j < 1 || j > d.k) throw domain_error("trial_probabilities: kind index out of range");
  if (i < 1) throw domain_error("trial_probabilities: trial index starts at 1");
  const Real& th = d.theta[static_cast<size_t>(j - 1)];
  const auto& alg = d.eval;
  if (kind_uses_state_conditioning(d.kind)) {
    Real f = th * pow_int(alg.w(), i - 1);
    return {f, Real(1) - f};
  }
  Real a = pow_int(alg.tau1(), i - 1);
  Real b = th * pow_int(alg.tau2(), i - 1);
  return {b / (a + b), a / (a + b)};
}

// probability mass at one support point; zero outside the support
template <class Real>
Real pmf(const DistributionSpec<Real>& d, const MultiIndex& idx) {
  if (static_cast<int>(idx.size()) != d.k)
    throw domain_error("pmf: index arity does not match the distribution");
  for (auto v : idx)
    if (v < 0) return Real(0);
  const auto& alg = d.eval;
  const Real& t1 = alg.tau1();
  const Real& t2 = alg.tau2();
  auto s = prefix_sums(idx);
  const long long sk = s[static_cast<size_t>(d.k)];
  const long long n = d.n;

  switch (d.kind) {
    case Kind::first_kind: {
      if (sk > n) return Real(0);
      Real v = multinomial(alg, n, idx);
      for (int j = 1; j <= d.k; ++j) {
        long long yj = idx[j - 1];
        v *= pow_int(d.theta[j - 1], yj) * pow_int(t1, tri2(n - s[j])) *
             pow_int(t2, tri2(yj));
        v /= shifted_factorial(alg, Real(1), d.theta[j - 1], n - s[j - 1], Sign::plus);
      }
      return v;
    }
    case Kind::second_kind:
    case Kind::absorption_second_kind: {
      if (sk > n) return Real(0);
      Real v = multinomial(alg, n, idx);
      for (int j = 1; j <= d.k; ++j) {
        long long xj = idx[j - 1];
        v *= pow_int(d.theta[j - 1], xj) *
             shifted_factorial(alg, Real(1), d.theta[j - 1], n - s[j], Sign::minus);
        v *= pow_int(t1, -(xj * (n - s[j]) + tri2(n - s[j])));
      }
      return v;
    }
    case Kind::second_kind_successes:
    case Kind::absorption_successes: {
      if (sk > n) return Real(0);
      Real v = multinomial(alg, n, idx);
      for (int j = 1; j <= d.k; ++j) {
        long long yj = idx[j - 1];
        v *= pow_int(d.theta[j - 1], n - s[j]) *
             shifted_factorial(alg, Real(1), d.theta[j - 1], yj, Sign::minus);
        v *= pow_int(t1, -(yj * (n - s[j]) + tri2(yj)));
      }
      return v;
    }
    case Kind::negative_first_kind: {
      Real v = multinomial(alg, n + sk - 1, idx);
      for (int j = 1; j <= d.k; ++j) {
        long long tj = idx[j - 1];
        long long nu = n + sk - s[j];
        v *= pow_int(d.theta[j - 1], tj) * pow_int(t1, tri2(nu) + tj) *
             pow_int(t2, tri2(tj));
        v /= shifted_factorial(alg, Real(1), d.theta[j - 1], nu + tj, Sign::plus);
      }
      return v;
    }
    case Kind::negative_first_kind_failures: {
      Real v = multinomial(alg, n + sk - 1, idx);
      for (int j = 1; j <= d.k; ++j) {
        long long vj = idx[j - 1];
        long long nu = n + sk - s[j];
        v *= pow_int(d.theta[j - 1], nu) * pow_int(t1, tri2(vj)) *
             pow_int(t2, tri2(nu) + vj);
        v /= shifted_factorial(alg, Real(1), d.theta[j - 1], nu + vj, Sign::plus);
      }
      return v;
    }
    case Kind::negative_second_kind: {
      Real v = multinomial(alg, n + sk - 1, idx);
      for (int j = 1; j <= d.k; ++j) {
        long long vj = idx[j - 1];
        long long nu = n + sk - s[j];
        v *= pow_int(d.theta[j - 1], vj) *
             shifted_factorial(alg, Real(1), d.theta[j - 1], nu, Sign::minus);
        v *= pow_int(t1, -(vj * (nu - 1) + tri2(nu)));
      }
      return v;
    }
    case Kind::multiple_heine: {
      Real v(1);
      for (int j = 1; j <= d.k; ++j) {
        long long yj = idx[j - 1];
        v *= d.exp_prefactor[j - 1] * pow_int(d.mu[j - 1], yj) *
             pow_int(t2, tri2(yj)) / alg.factorial(yj);
      }
      return v;
    }
    case Kind::multiple_euler: {
      Real v(1);
      for (int j = 1; j <= d.k; ++j) {
        long long xj = idx[j - 1];
        v *= d.exp_prefactor[j - 1] * pow_int(d.mu[j - 1], xj) *
             pow_int(t1, tri2(xj)) / alg.factorial(xj);
      }
      return v;
    }
  }
  return Real(0);
}

// closed form at the zero index; must agree with pmf at (0,...,0)
template <class Real>
Real p_zero(const DistributionSpec<Real>& d) {
  const auto& alg = d.eval;
  const long long n = d.n;
  Real v(1);
  switch (d.kind) {
    case Kind::first_kind:
    case Kind::negative_first_kind:
      for (int j = 0; j < d.k; ++j)
        v *= pow_int(alg.tau1(), tri2(n)) /
             shifted_factorial(alg, Real(1), d.theta[j], n, Sign::plus);
      return v;
    case Kind::negative_first_kind_failures:
      for (int j = 0; j < d.k; ++j)
        v *= pow_int(d.theta[j], n) * pow_int(alg.tau2(), tri2(n)) /
             shifted_factorial(alg, Real(1), d.theta[j], n, Sign::plus);
      return v;
    case Kind::second_kind:
    case Kind::absorption_second_kind:
    case Kind::negative_second_kind:
      for (int j = 0; j < d.k; ++j)
        v *= shifted_factorial(alg, Real(1), d.theta[j], n, Sign::minus) *
             pow_int(alg.tau1(), -tri2(n));
      return v;
    case Kind::second_kind_successes:
    case Kind::absorption_successes:
      for (int j = 0; j < d.k; ++j) v *= pow_int(d.theta[j], n);
      return v;
    case Kind::multiple_heine:
    case Kind::multiple_euler:
      for (int j = 0; j < d.k; ++j) v *= d.exp_prefactor[j];
      return v;
  }
  return v;
}

template <class Real>
struct PmfTable {
  DistributionSpec<Real> spec;
  std::vector<std::pair<MultiIndex, Real>> entries;  // lexicographic order
  Real normalization_defect{};
  bool truncated = false;
  bool underflow_flagged = false;
};

namespace detail {

template <class Real>
void pmf_values(const DistributionSpec<Real>& d, const std::vector<MultiIndex>& idx,
                std::vector<Real>& out, bool parallel) {
  out.resize(idx.size());
  const long long count = static_cast<long long>(idx.size());
#ifdef _OPENMP
  if (parallel && count > 64) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long long i = 0; i < count; ++i)
      out[static_cast<size_t>(i)] = pmf(d, idx[static_cast<size_t>(i)]);
    return;
  }
#else
  (void)parallel;
#endif
  for (long long i = 0; i < count; ++i)
    out[static_cast<size_t>(i)] = pmf(d, idx[static_cast<size_t>(i)]);
}

template <class Real>
PmfTable<Real> build_table(const DistributionSpec<Real>& d, bool parallel) {
  PmfTable<Real> table{d, {}, Real(0), false, false};
  CompensatedSum<Real> mass;
  std::vector<Real> vals;
  if (kind_is_finite(d.kind)) {
    d.eval.warm_factorials(d.n);
    auto idx = indices_bounded(d.k, d.n);
    pmf_values(d, idx, vals, parallel);
    table.entries.reserve(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
      const Real& v = vals[i];
      if (!is_finite_value(v))
        throw numeric_error("pmf_table: probability not representable");
      if (v < Real(0)) throw domain_error("pmf_table: negative probability mass");
      if (v == Real(0)) table.underflow_flagged = true;
      mass.add(v);
      table.entries.emplace_back(std::move(idx[i]), v);
    }
  } else {
    bool converged = false;
    for (long long t = 0; t <= d.trunc.max_index; ++t) {
      d.eval.warm_factorials(d.n + t);
      auto idx = indices_total(d.k, t);
      pmf_values(d, idx, vals, parallel);
      Real shell_mass(0);
      for (size_t i = 0; i < idx.size(); ++i) {
        const Real& v = vals[i];
        if (!is_finite_value(v))
          throw numeric_error("pmf_table: probability not representable at "
                              "total order " + std::to_string(t) +
                              "; lower max_index");
        if (v < Real(0)) throw domain_error("pmf_table: negative probability mass");
        shell_mass += v;
        mass.add(v);
        table.entries.emplace_back(std::move(idx[i]), v);
      }
      Real remaining = Real(1) - mass.value();
      if (remaining <= d.trunc.eps_tail && shell_mass < d.trunc.eps_tail / Real(10)) {
        converged = true;
        break;
      }
    }
    table.truncated = !converged;
    std::sort(table.entries.begin(), table.entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  Real total = mass.value();
  table.normalization_defect = abs_value(total - Real(1));
  if (table.underflow_flagged && !std::is_same_v<Real, double>)
    throw numeric_error("pmf_table: underflow at extended precision");
  return table;
}

}  // namespace detail

template <class Real>
PmfTable<Real> pmf_table(const DistributionSpec<Real>& d) {
  return detail::build_table(d, true);
}

// reference implementation: identical arithmetic, no threading
template <class Real>
PmfTable<Real> pmf_table_serial(const DistributionSpec<Real>& d) {
  return detail::build_table(d, false);
}

// One step of the all-coordinates recursion P(index + (1,...,1)) from P(index).
// derived_ratio evaluates the exact pmf ratio. original applies the stated
// one-step multiplier, which exists only for the four counting kinds and does
// not generally reproduce the pmf; it is kept for reporting.
enum class RecursionMode { derived_ratio, original };

inline const char* to_string(RecursionMode m) {
  return m == RecursionMode::derived_ratio ? "derived-ratio" : "original";
}

template <class Real>
Real recursion_next(const DistributionSpec<Real>& d, const MultiIndex& idx,
                    const Real& p_current, RecursionMode mode) {
  if (static_cast<int>(idx.size()) != d.k)
    throw domain_error("recursion_next: index arity does not match the distribution");
  MultiIndex next = idx;
  for (auto& v : next) ++v;
  if (kind_is_finite(d.kind) && mi_sum(next) > d.n)
    throw domain_error("recursion_next: the incremented index leaves the support");
  if (mode == RecursionMode::derived_ratio) {
    Real cur = pmf(d, idx);
    Real nxt = pmf(d, next);
    if (cur == Real(0)) {
      if (nxt == Real(0)) return Real(0);
      throw numeric_error("recursion_next: current probability is zero");
    }
    return p_current * (nxt / cur);
  }
  const auto& alg = d.eval;
  Real mult(1);
  long long sk = mi_sum(idx);
  switch (d.kind) {
    case Kind::first_kind:
      mult = alg.ordered_factorial(d.n - sk, d.k);
      for (int j = 0; j < d.k; ++j) {
        long long yj = idx[j];
        mult *= d.theta[j] * pow_int(alg.tau1(), d.n - yj) * pow_int(alg.tau2(), yj);
        mult /= alg.number(yj + 1) * (Real(1) + d.theta[j]);
      }
      return p_current * mult;
    case Kind::negative_first_kind:
      mult = alg.ordered_factorial(d.n - sk, d.k);
      for (int j = 0; j < d.k; ++j) {
        long long tj = idx[j];
        mult *= d.theta[j] * pow_int(alg.tau1(), d.n - tj) * pow_int(alg.tau2(), tj);
        mult /= alg.number(tj + 1) * (Real(1) - d.theta[j]);
      }
      return p_current * mult;
    case Kind::second_kind:
    case Kind::negative_second_kind:
      mult = alg.ordered_factorial(d.n - sk, d.k);
      for (int j = 0; j < d.k; ++j) {
        mult *= d.theta[j] * (Real(1) - d.theta[j]);
        mult /= alg.number(idx[j] + 1);
      }
      return p_current * mult;
    default:
      throw domain_error(std::string("recursion_next: no stated one-step form for ") +
                         to_string(d.kind));
  }
}

// sup distance between a bounded-trial family and its limit family on the
// union of their supports
template <class Real>
Real limit_distance(const DeformationAlgebra<Real>& alg,
                    const std::vector<Real>& theta, long long n, Kind limit_kind) {
  Kind finite_kind;
  if (limit_kind == Kind::multiple_heine)
    finite_kind = Kind::first_kind;
  else if (limit_kind == Kind::multiple_euler)
    finite_kind = Kind::second_kind;
  else
    throw domain_error("limit_distance: limit kind must be multiple-heine or multiple-euler");
  auto fin = make_distribution(finite_kind, alg, n, theta);
  auto lim = make_distribution(limit_kind, alg, 0, theta);
  auto ft = pmf_table_serial(fin);
  auto lt = pmf_table_serial(lim);
  std::map<MultiIndex, std::pair<Real, Real>> joined;
  for (auto& e : ft.entries) joined[e.first].first = e.second;
  for (auto& e : lt.entries) joined[e.first].second = e.second;
  Real sup(0);
  for (auto& [key, pr] : joined) {
    Real dlt = abs_value(pr.first - pr.second);
    if (dlt > sup) sup = dlt;
  }
  return sup;
}

}  // namespace rpq
