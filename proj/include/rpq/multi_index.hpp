#pragma once

#include <vector>

#include "numeric.hpp"

namespace rpq {

using MultiIndex = std::vector<long long>;

inline long long mi_sum(const MultiIndex& r) {
  long long s = 0;
  for (auto v : r) s += v;
  return s;
}

// prefix[j] = r_1 + ... + r_j for 1 <= j <= k, prefix[0] = 0
inline std::vector<long long> prefix_sums(const MultiIndex& r) {
  std::vector<long long> s(r.size() + 1, 0);
  for (size_t j = 0; j < r.size(); ++j) s[j + 1] = s[j] + r[j];
  return s;
}

// suffix[j] = r_j + ... + r_k for 1 <= j <= k, suffix[k+1] = 0; suffix[0] = total
inline std::vector<long long> suffix_sums(const MultiIndex& r) {
  size_t k = r.size();
  std::vector<long long> m(k + 2, 0);
  for (size_t j = k; j >= 1; --j) m[j] = m[j + 1] + r[j - 1];
  m[0] = m[1];
  return m;
}

namespace detail {

template <class F>
void enumerate_rec(MultiIndex& r, size_t j, long long rem, F& f) {
  if (j == r.size()) {
    f(const_cast<const MultiIndex&>(r));
    return;
  }
  for (long long v = 0; v <= rem; ++v) {
    r[j] = v;
    enumerate_rec(r, j + 1, rem - v, f);
  }
}

template <class F>
void enumerate_total_rec(MultiIndex& r, size_t j, long long rem, F& f) {
  if (j + 1 == r.size()) {
    r[j] = rem;
    f(const_cast<const MultiIndex&>(r));
    return;
  }
  for (long long v = 0; v <= rem; ++v) {
    r[j] = v;
    enumerate_total_rec(r, j + 1, rem - v, f);
  }
}

}  // namespace detail

// all r in N^k with r_1 + ... + r_k <= n, visited in ascending lexicographic order
template <class F>
void for_each_index_bounded(int k, long long n, F&& f) {
  if (k <= 0) throw domain_error("for_each_index_bounded: k must be positive");
  if (n < 0) return;
  MultiIndex r(static_cast<size_t>(k), 0);
  detail::enumerate_rec(r, 0, n, f);
}

// all r in N^k with r_1 + ... + r_k == t, visited in ascending lexicographic order
template <class F>
void for_each_index_total(int k, long long t, F&& f) {
  if (k <= 0) throw domain_error("for_each_index_total: k must be positive");
  if (t < 0) return;
  MultiIndex r(static_cast<size_t>(k), 0);
  detail::enumerate_total_rec(r, 0, t, f);
}

// materialized variants used by the parallel table kernels
inline std::vector<MultiIndex> indices_bounded(int k, long long n) {
  std::vector<MultiIndex> out;
  for_each_index_bounded(k, n, [&](const MultiIndex& r) { out.push_back(r); });
  return out;
}

inline std::vector<MultiIndex> indices_total(int k, long long t) {
  std::vector<MultiIndex> out;
  for_each_index_total(k, t, [&](const MultiIndex& r) { out.push_back(r); });
  return out;
}

}  // namespace rpq
