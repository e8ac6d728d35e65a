#pragma once

#include <vector>

#include "gaussian.hpp"
#include "sampler.hpp"

namespace rpq {

// Brute force over all 2^n outcome sequences of the odds-parameterized trial
// model; trial i counts with probability theta tau2^(i-1)/(tau1^(i-1) + theta tau2^(i-1)).
// Returns the distribution of the counted total on {0..n}.
template <class Real>
std::vector<Real> enumerate_first_kind_exact(const DeformationAlgebra<Real>& alg,
                                             const Real& theta, long long n) {
  if (n < 0 || n > 20)
    throw domain_error("enumerate_first_kind_exact: n must lie in 0..20");
  std::vector<Real> counted(static_cast<size_t>(n)), other(static_cast<size_t>(n));
  for (long long i = 1; i <= n; ++i) {
    Real a = pow_int(alg.tau1(), i - 1);
    Real b = theta * pow_int(alg.tau2(), i - 1);
    counted[static_cast<size_t>(i - 1)] = b / (a + b);
    other[static_cast<size_t>(i - 1)] = a / (a + b);
  }
  std::vector<CompensatedSum<Real>> acc(static_cast<size_t>(n) + 1);
  for (uint64_t bits = 0; bits < (uint64_t(1) << n); ++bits) {
    Real p(1);
    int successes = 0;
    for (long long i = 0; i < n; ++i) {
      if ((bits >> i) & 1ull) {
        p *= counted[static_cast<size_t>(i)];
        ++successes;
      } else {
        p *= other[static_cast<size_t>(i)];
      }
    }
    acc[static_cast<size_t>(successes)].add(p);
  }
  std::vector<Real> out;
  out.reserve(acc.size());
  for (auto& a : acc) out.push_back(a.value());
  return out;
}

// Forward DP over the success count c with per-trial failure probability
// theta (tau2/tau1)^c. Returns the failure-count distribution on {0..n}; if
// max_row_defect is given it receives the largest per-step deviation of the
// state mass from 1.
template <class Real>
std::vector<Real> enumerate_second_kind_exact(const DeformationAlgebra<Real>& alg,
                                              const Real& theta, long long n,
                                              Real* max_row_defect = nullptr) {
  if (n < 0) throw domain_error("enumerate_second_kind_exact: negative n");
  const Real w = alg.w();
  // state[c] = P(c successes after i trials); failures = i - c
  std::vector<Real> state(static_cast<size_t>(n) + 1, Real(0));
  state[0] = Real(1);
  Real worst(0);
  std::vector<Real> fail_at(static_cast<size_t>(n) + 1);
  for (long long c = 0; c <= n; ++c)
    fail_at[static_cast<size_t>(c)] = theta * pow_int(w, c);
  for (long long i = 0; i < n; ++i) {
    std::vector<Real> next(static_cast<size_t>(n) + 1, Real(0));
    for (long long c = 0; c <= i; ++c) {
      const Real& cur = state[static_cast<size_t>(c)];
      if (cur == Real(0)) continue;
      const Real& f = fail_at[static_cast<size_t>(c)];
      next[static_cast<size_t>(c)] += cur * f;
      next[static_cast<size_t>(c + 1)] += cur * (Real(1) - f);
    }
    state.swap(next);
    CompensatedSum<Real> mass;
    for (const Real& v : state) mass.add(v);
    Real defect = abs_value(mass.value() - Real(1));
    if (defect > worst) worst = defect;
  }
  if (max_row_defect) *max_row_defect = worst;
  std::vector<Real> out(static_cast<size_t>(n) + 1, Real(0));
  for (long long c = 0; c <= n; ++c)
    out[static_cast<size_t>(n - c)] = state[static_cast<size_t>(c)];
  return out;
}

// largest absolute gap between the joint pmf and the product of its univariate
// chain factors over the full (or truncated) support
template <class Real>
Real chain_decomposition_residual(const DistributionSpec<Real>& d,
                                  long long tail_order = 12) {
  Real worst(0);
  auto check = [&](const MultiIndex& idx) {
    Real joint = pmf(d, idx);
    Real product(1);
    if (kind_is_finite(d.kind) || kind_is_limit(d.kind)) {
      long long used = 0;
      for (int j = 0; j < d.k; ++j) {
        long long ne = kind_is_limit(d.kind) ? 0 : d.n - used;
        auto uni = detail::univariate_factor(d, j, ne);
        product *= pmf(uni, MultiIndex{idx[static_cast<size_t>(j)]});
        used += idx[static_cast<size_t>(j)];
      }
    } else {
      long long later = 0;
      for (int j = d.k - 1; j >= 0; --j) {
        auto uni = detail::univariate_factor(d, j, d.n + later);
        product *= pmf(uni, MultiIndex{idx[static_cast<size_t>(j)]});
        later += idx[static_cast<size_t>(j)];
      }
    }
    Real gap = abs_value(joint - product);
    if (gap > worst) worst = gap;
  };
  if (kind_is_finite(d.kind))
    for_each_index_bounded(d.k, d.n, check);
  else
    for (long long t = 0; t <= tail_order; ++t) for_each_index_total(d.k, t, check);
  return worst;
}

// classical chain of plain binomials used as the limiting reference
template <class Real>
Real classical_chain_pmf(long long n, const std::vector<Real>& cell_prob,
                         const MultiIndex& idx) {
  long long used = 0;
  Real v(1);
  for (size_t j = 0; j < cell_prob.size(); ++j) {
    long long nj = n - used;
    long long xj = idx[j];
    if (xj < 0 || xj > nj) return Real(0);
    // plain binomial coefficient, iteratively, exact for this range
    Real c(1);
    for (long long i = 1; i <= xj; ++i)
      c = c * Real(nj - xj + i) / Real(i);
    v *= c * pow_int(cell_prob[j], xj) *
         pow_int(Real(1) - cell_prob[j], nj - xj);
    used += xj;
  }
  return v;
}

// sup distance between the deformed pmf near the classical corner and the
// classical chain built from the limiting per-trial probabilities
template <class Real>
Real classical_limit_distance(Kind kind, long long n, const std::vector<Real>& theta,
                              const Real& p0, const Real& q0) {
  auto alg = make_preset_algebra<Real>("jagannathan-srinivasa", p0, q0);
  auto d = make_distribution(kind, alg, n, theta);
  std::vector<Real> cells;
  cells.reserve(theta.size());
  for (const Real& th : theta)
    cells.push_back(kind == Kind::first_kind ? th / (Real(1) + th) : th);
  Real sup(0);
  for_each_index_bounded(static_cast<int>(theta.size()), n, [&](const MultiIndex& r) {
    Real gap = abs_value(pmf(d, r) - classical_chain_pmf(n, cells, r));
    if (gap > sup) sup = gap;
  });
  return sup;
}

// the deformed multinomial rewritten through classical Gaussian binomials in
// the ratio w = tau2/tau1; exact for every algebra, and an independent code path
template <class Real>
Real gaussian_scaling_residual(const DeformationAlgebra<Real>& alg, long long xmax,
                               int kmax) {
  Real worst(0);
  const Real w = alg.w();
  for (int k = 1; k <= kmax; ++k) {
    for (long long x = 0; x <= xmax; ++x) {
      for_each_index_bounded(k, x, [&](const MultiIndex& r) {
        auto s = prefix_sums(r);
        long long e = 0;
        for (int j = 1; j <= k; ++j) e += r[j - 1] * (x - s[j]);
        Real ref = pow_int(alg.tau1(), e);
        for (int j = 1; j <= k; ++j)
          ref *= gaussian_binomial(w, x - s[j - 1], r[j - 1]);
        Real direct = multinomial(alg, x, r);
        Real scale = abs_value(direct) + abs_value(ref);
        if (scale > Real(0)) {
          Real rel = abs_value(direct - ref) / scale;
          if (rel > worst) worst = rel;
        }
      });
    }
  }
  return worst;
}

struct FrequencyCheck {
  double max_sigma = 0;     // largest |freq - p| in sigma units
  double worst_p = 0;       // table probability at the worst point
  bool ok = false;
};

// m seeded draws against the exact table: every support point must sit within
// 3 sigma of its binomial sampling band
template <class Real>
FrequencyCheck sampler_frequency_check(const DistributionSpec<Real>& d,
                                       uint64_t seed, long long m) {
  auto table = pmf_table_serial(d);
  auto draws = sample(d, seed, m);
  std::map<MultiIndex, long long> counts;
  for (const auto& r : draws) ++counts[r];
  FrequencyCheck fc;
  double dm = static_cast<double>(m);
  for (const auto& [idx, p] : table.entries) {
    double prob = static_cast<double>(p);
    if (prob <= 0) continue;
    double sigma = std::sqrt(prob * (1.0 - prob) / dm);
    if (sigma == 0) continue;
    auto it = counts.find(idx);
    double freq = it == counts.end() ? 0.0
                                     : static_cast<double>(it->second) / dm;
    double z = std::abs(freq - prob) / sigma;
    if (z > fc.max_sigma) {
      fc.max_sigma = z;
      fc.worst_p = prob;
    }
  }
  fc.ok = fc.max_sigma <= 3.0;
  return fc;
}

}  // namespace rpq
