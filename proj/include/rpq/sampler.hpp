#pragma once

#include <cstdint>
#include <vector>

#include "distributions.hpp"

namespace rpq {

namespace detail {

inline uint64_t splitmix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// counter-based: the variate for (seed, draw, slot) never depends on call order,
// so parallel and serial sampling agree bit for bit
inline double uniform01(uint64_t seed, uint64_t draw, uint64_t slot) {
  uint64_t h = splitmix64(splitmix64(splitmix64(seed) + draw) + slot);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// univariate view of one chain factor, evaluated through the joint pmf
// machinery at k = 1
template <class Real>
DistributionSpec<Real> univariate_factor(const DistributionSpec<Real>& d, int j,
                                         long long n_eff) {
  DistributionSpec<Real> u{d.kind, n_eff, 1,
                           {d.theta[static_cast<size_t>(j)]},
                           {},      d.eval,
                           d.eval,  d.trunc,
                           {},      {}};
  if (kind_is_limit(d.kind)) {
    u.mu = {d.mu[static_cast<size_t>(j)]};
    u.exp_prefactor = {d.exp_prefactor[static_cast<size_t>(j)]};
  }
  return u;
}

template <class Real>
long long draw_bounded(const std::vector<Real>& cdf, double u) {
  Real uu(u);
  for (size_t v = 0; v < cdf.size(); ++v)
    if (cdf[v] >= uu) return static_cast<long long>(v);
  return static_cast<long long>(cdf.size()) - 1;
}

// tail-completed inverse CDF on an unbounded support: extend the partial sums
// until they cover u; running past the cap is an error, not a silent clamp
template <class Real>
long long draw_unbounded(const DistributionSpec<Real>& uni, double u,
                         long long cap) {
  CompensatedSum<Real> cum;
  Real uu(u);
  for (long long t = 0; t <= cap; ++t) {
    cum.add(pmf(uni, MultiIndex{t}));
    if (cum.value() >= uu) return t;
  }
  throw numeric_error("sample: inverse CDF ran past the truncation cap");
}

}  // namespace detail

// m draws from the spec, reproducible from the seed alone. Bounded-trial kinds
// sample the conditional chain left to right; the negative kinds sample right
// to left because each factor's size parameter depends on the counts drawn
// after it; limit kinds have independent coordinates.
template <class Real>
std::vector<MultiIndex> sample(const DistributionSpec<Real>& d, uint64_t seed,
                               long long m) {
  if (m < 0) throw domain_error("sample: negative draw count");
  std::vector<MultiIndex> out(static_cast<size_t>(m),
                              MultiIndex(static_cast<size_t>(d.k), 0));
  if (m == 0) return out;

  if (kind_is_finite(d.kind)) {
    // per (kind slot, remaining trials) CDF tables, built once up front
    std::vector<std::vector<std::vector<Real>>> cdf(static_cast<size_t>(d.k));
    for (int j = 0; j < d.k; ++j) {
      cdf[j].resize(static_cast<size_t>(d.n) + 1);
      for (long long ne = 0; ne <= d.n; ++ne) {
        auto uni = detail::univariate_factor(d, j, ne);
        CompensatedSum<Real> cum;
        auto& row = cdf[j][static_cast<size_t>(ne)];
        row.reserve(static_cast<size_t>(ne) + 1);
        for (long long v = 0; v <= ne; ++v) {
          cum.add(pmf(uni, MultiIndex{v}));
          row.push_back(cum.value());
        }
      }
    }
    const long long count = m;
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < count; ++i) {
      long long used = 0;
      for (int j = 0; j < d.k; ++j) {
        double u = detail::uniform01(seed, static_cast<uint64_t>(i),
                                     static_cast<uint64_t>(j + 1));
        long long v = detail::draw_bounded(
            cdf[j][static_cast<size_t>(d.n - used)], u);
        out[static_cast<size_t>(i)][static_cast<size_t>(j)] = v;
        used += v;
      }
    }
    return out;
  }

  const long long count = m;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 64)
#endif
  for (long long i = 0; i < count; ++i) {
    auto& row = out[static_cast<size_t>(i)];
    if (kind_is_limit(d.kind)) {
      for (int j = 0; j < d.k; ++j) {
        double u = detail::uniform01(seed, static_cast<uint64_t>(i),
                                     static_cast<uint64_t>(j + 1));
        auto uni = detail::univariate_factor(d, j, 0);
        row[static_cast<size_t>(j)] =
            detail::draw_unbounded(uni, u, d.trunc.max_index);
      }
    } else {
      long long later = 0;
      for (int j = d.k - 1; j >= 0; --j) {
        double u = detail::uniform01(seed, static_cast<uint64_t>(i),
                                     static_cast<uint64_t>(j + 1));
        auto uni = detail::univariate_factor(d, j, d.n + later);
        long long v = detail::draw_unbounded(uni, u, d.trunc.max_index);
        row[static_cast<size_t>(j)] = v;
        later += v;
      }
    }
  }
  return out;
}

}  // namespace rpq
