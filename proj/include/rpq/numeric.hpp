#pragma once

#include <charconv>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rpq {

class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// parameters or arguments outside the defined domain
class domain_error : public error {
 public:
  using error::error;
};

// overflow, divergence, or loss of meaning in floating point
class numeric_error : public error {
 public:
  using error::error;
};

// C(a,2) = a(a-1)/2, exact for any integer since a(a-1) is even
inline long long tri2(long long a) { return a * (a - 1) / 2; }

template <class Real>
bool is_finite_value(const Real& v) {
  return v == v && v != std::numeric_limits<Real>::infinity() &&
         v != -std::numeric_limits<Real>::infinity();
}

template <class Real>
const Real& ensure_finite(const Real& v, const char* what) {
  if (!is_finite_value(v)) throw numeric_error(std::string(what) + ": result is not finite");
  return v;
}

template <class Real>
Real abs_value(const Real& v) {
  if (v < Real(0)) return Real(-v);
  return v == Real(0) ? Real(0) : v;  // maps -0 to +0
}

// integer power by repeated squaring; deterministic across platforms and thread counts
template <class Real>
Real pow_int(const Real& base, long long e) {
  if (e < 0) {
    if (base == Real(0)) throw numeric_error("pow_int: zero base with negative exponent");
    return Real(1) / pow_int(base, -e);
  }
  Real acc(1);
  Real b = base;
  auto n = static_cast<unsigned long long>(e);
  while (n != 0) {
    if (n & 1ull) acc *= b;
    b *= b;
    n >>= 1;
  }
  return acc;
}

// Neumaier compensated accumulator; every table and series reduction goes through
// one of these in a fixed order so results do not depend on thread count
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& x) {
    Real t = sum_ + x;
    if (abs_value(sum_) >= abs_value(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  Real value() const { return sum_ + comp_; }

 private:
  Real sum_{0};
  Real comp_{0};
};

// 17 significant digits reproduce any double exactly on read-back
inline std::string format_full(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

inline std::string format_shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace rpq
