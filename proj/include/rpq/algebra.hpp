#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "numeric.hpp"

namespace rpq {

// A deformation algebra is determined by a structure function R together with the
// parameter pair (p, q) and the geometric weights (tau1, tau2). The bracket of an
// integer a is [a] = R(p^a, q^a). Construction validates that R(1,1) vanishes, that
// [n] > 0 for n >= 1, and that the splitting identity
//   [x] = tau1^s [x-s] + tau2^(x-s) [s]
// holds, since everything downstream relies on it.
template <class Real>
class DeformationAlgebra {
 public:
  using structure_fn = std::function<Real(const Real&, const Real&)>;

  DeformationAlgebra(std::string name, Real p, Real q, Real tau1, Real tau2,
                     structure_fn R)
      : name_(std::move(name)),
        p_(std::move(p)),
        q_(std::move(q)),
        tau1_(std::move(tau1)),
        tau2_(std::move(tau2)),
        R_(std::move(R)),
        memo_(std::make_shared<Memo>()) {}

  const std::string& name() const { return name_; }
  const Real& p() const { return p_; }
  const Real& q() const { return q_; }
  const Real& tau1() const { return tau1_; }
  const Real& tau2() const { return tau2_; }
  Real w() const { return tau2_ / tau1_; }
  const structure_fn& structure() const { return R_; }

  // [a]; [0] is exactly zero, backed by the construction-time check of R(1,1)
  Real number(long long a) const {
    if (a == 0) return Real(0);
    Real v = R_(pow_int(p_, a), pow_int(q_, a));
    ensure_finite(v, "number");
    return v;
  }

  // [n]!; memo is append-only and shared between copies of this algebra
  Real factorial(long long n) const {
    if (n < 0) throw domain_error("factorial: negative argument");
    {
      std::lock_guard<std::mutex> lock(memo_->mu);
      if (static_cast<long long>(memo_->fact.size()) > n) return memo_->fact[n];
    }
    extend_memo(n);
    std::lock_guard<std::mutex> lock(memo_->mu);
    return memo_->fact[static_cast<size_t>(n)];
  }

  // [a][a-1]...[a-r+1]; computed as a direct product so large a stays usable
  // even where [a]! would overflow
  Real ordered_factorial(long long a, long long r) const {
    if (r < 0) throw domain_error("ordered_factorial: negative order");
    Real acc(1);
    for (long long i = 0; i < r; ++i) acc *= number(a - i);
    return acc;
  }

  void warm_factorials(long long n) const {
    if (n >= 0) extend_memo(n);
  }

 private:
  struct Memo {
    std::mutex mu;
    std::vector<Real> fact;
  };

  void extend_memo(long long n) const {
    std::lock_guard<std::mutex> lock(memo_->mu);
    if (memo_->fact.empty()) memo_->fact.push_back(Real(1));
    for (long long i = static_cast<long long>(memo_->fact.size()); i <= n; ++i)
      memo_->fact.push_back(memo_->fact[static_cast<size_t>(i - 1)] * number(i));
  }

  std::string name_;
  Real p_, q_, tau1_, tau2_;
  structure_fn R_;
  std::shared_ptr<Memo> memo_;
  // set on algebras produced by invert_parameters so a second inversion
  // returns the exact original
  std::shared_ptr<const DeformationAlgebra> inverse_origin_;

  template <class R2>
  friend DeformationAlgebra<R2> invert_parameters(const DeformationAlgebra<R2>&);
};

namespace detail {

template <class Real>
void validate_algebra(const DeformationAlgebra<Real>& alg, int depth = 16) {
  Real at_one = alg.structure()(Real(1), Real(1));
  if (abs_value(at_one) > Real(1e-12))
    throw domain_error(alg.name() + ": R(1,1) must vanish, got a nonzero value");
  for (long long n = 1; n <= depth; ++n) {
    Real v = alg.number(n);
    if (!(v > Real(0)))
      throw domain_error(alg.name() + ": bracket [" + std::to_string(n) +
                         "] is not positive");
  }
  const Real tol(1e-9);
  for (long long x = 2; x <= depth; ++x) {
    Real vx = alg.number(x);
    for (long long s = 1; s < x; ++s) {
      Real split = pow_int(alg.tau1(), s) * alg.number(x - s) +
                   pow_int(alg.tau2(), x - s) * alg.number(s);
      if (abs_value(split - vx) > tol * abs_value(vx))
        throw domain_error(alg.name() + ": splitting identity fails at x=" +
                           std::to_string(x) + " s=" + std::to_string(s));
    }
  }
}

}  // namespace detail

// Preset families. q-standard and biedenharn-macfarlane take only q (0 < q < 1);
// the two-parameter families require 0 < q < p < 1.
template <class Real>
DeformationAlgebra<Real> make_preset_algebra(std::string_view preset, Real p, Real q) {
  auto require = [&](bool ok, const char* msg) {
    if (!ok) throw domain_error(std::string(preset) + ": " + msg);
  };
  std::unique_ptr<DeformationAlgebra<Real>> holder;
  if (preset == "q-standard") {
    require(q > Real(0) && q < Real(1), "needs 0 < q < 1");
    holder = std::make_unique<DeformationAlgebra<Real>>(
        "q-standard", Real(1), q, Real(1), q,
        [q](const Real&, const Real& y) { return (Real(1) - y) / (Real(1) - q); });
  } else if (preset == "biedenharn-macfarlane") {
    require(q > Real(0) && q < Real(1), "needs 0 < q < 1");
    // single-parameter family: the bracket reads q^a and its reciprocal
    holder = std::make_unique<DeformationAlgebra<Real>>(
        "biedenharn-macfarlane", q, q, q, Real(1) / q,
        [q](const Real& x, const Real&) {
          return (x - Real(1) / x) / (q - Real(1) / q);
        });
  } else if (preset == "jagannathan-srinivasa") {
    require(q > Real(0) && q < p && p < Real(1), "needs 0 < q < p < 1");
    holder = std::make_unique<DeformationAlgebra<Real>>(
        "jagannathan-srinivasa", p, q, p, q,
        [p, q](const Real& x, const Real& y) { return (x - y) / (p - q); });
  } else if (preset == "chakrabarty-jagannathan") {
    require(q > Real(0) && q < p && p < Real(1), "needs 0 < q < p < 1");
    Real pi = Real(1) / p;
    holder = std::make_unique<DeformationAlgebra<Real>>(
        "chakrabarty-jagannathan", p, q, pi, q,
        [p, q](const Real& x, const Real& y) {
          return (Real(1) - x * y) / ((Real(1) / p - q) * x);
        });
  } else if (preset == "quesne") {
    require(q > Real(0) && q < p && p < Real(1), "needs 0 < q < p < 1");
    holder = std::make_unique<DeformationAlgebra<Real>>(
        "quesne", p, q, p, Real(1) / q,
        [p, q](const Real& x, const Real& y) {
          return (x * y - Real(1)) / ((q - Real(1) / p) * y);
        });
  } else {
    throw domain_error("unknown algebra preset: " + std::string(preset));
  }
  detail::validate_algebra(*holder);
  return *holder;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "q-standard", "biedenharn-macfarlane", "jagannathan-srinivasa",
      "chakrabarty-jagannathan", "quesne"};
  return names;
}

template <class Real>
DeformationAlgebra<Real> make_custom_algebra(
    std::string name, typename DeformationAlgebra<Real>::structure_fn R, Real p,
    Real q, Real tau1, Real tau2) {
  if (!(p > Real(0)) || !(q > Real(0)))
    throw domain_error(name + ": p and q must be positive");
  if (!(tau1 > Real(0)) || !(tau2 > Real(0)))
    throw domain_error(name + ": tau1 and tau2 must be positive");
  DeformationAlgebra<Real> alg(std::move(name), p, q, tau1, tau2, std::move(R));
  detail::validate_algebra(alg);
  return alg;
}

// Parameter inversion p -> 1/p, q -> 1/q. The bracket transforms as
//   [a]' = (tau1 tau2)^(1-a) [a]
// which keeps the structure-function prefactor intact. Applying the operation
// twice returns the original algebra exactly.
template <class Real>
DeformationAlgebra<Real> invert_parameters(const DeformationAlgebra<Real>& alg) {
  if (alg.inverse_origin_) return *alg.inverse_origin_;
  using std::exp;
  using std::log;
  Real pi = Real(1) / alg.p();
  Real qi = Real(1) / alg.q();
  Real lpi = log(pi);
  Real lqi = log(qi);
  bool use_p = abs_value(lpi) >= abs_value(lqi);
  if ((use_p ? lpi : lqi) == Real(0))
    throw domain_error(alg.name() + ": cannot invert, both parameters equal 1");
  Real tt = alg.tau1() * alg.tau2();
  Real ltt = log(tt);
  auto orig = alg.structure();
  auto inv_fn = [orig, lpi, lqi, use_p, ltt](const Real& x, const Real& y) -> Real {
    using std::exp;
    using std::log;
    Real order = use_p ? log(x) / lpi : log(y) / lqi;
    Real scale = exp(ltt * (Real(1) - order));
    return scale * orig(Real(1) / x, Real(1) / y);
  };
  DeformationAlgebra<Real> out(alg.name() + "-inverse", pi, qi,
                               Real(1) / alg.tau1(), Real(1) / alg.tau2(),
                               std::move(inv_fn));
  out.inverse_origin_ = std::make_shared<const DeformationAlgebra<Real>>(alg);
  detail::validate_algebra(out);
  return out;
}

// Deformed exponentials. exp_small carries tau1^C(n,2) weights, exp_big tau2^C(n,2);
// they satisfy exp_small(z) exp_big(-z) = 1 on the shared convergence region.
// Stops once three consecutive terms fall below eps relative to the partial sum.
template <class Real>
Real exp_series(const DeformationAlgebra<Real>& alg, const Real& z, const Real& weight,
                Real eps = std::numeric_limits<Real>::epsilon()) {
  CompensatedSum<Real> acc;
  acc.add(Real(1));
  Real term(1);
  Real wpow(1);
  int quiet = 0;
  for (long long n = 1; n <= 10000; ++n) {
    term = term * wpow * z / alg.number(n);
    wpow *= weight;
    if (!is_finite_value(term)) throw numeric_error("exp series diverged");
    acc.add(term);
    Real mag = abs_value(term);
    Real scale = abs_value(acc.value()) + Real(1);
    if (mag <= eps * scale) {
      if (++quiet >= 3) return acc.value();
    } else {
      quiet = 0;
    }
  }
  throw numeric_error("exp series: no convergence within 10000 terms");
}

template <class Real>
Real exp_small(const DeformationAlgebra<Real>& alg, const Real& z,
               Real eps = std::numeric_limits<Real>::epsilon()) {
  return exp_series(alg, z, alg.tau1(), eps);
}

template <class Real>
Real exp_big(const DeformationAlgebra<Real>& alg, const Real& z,
             Real eps = std::numeric_limits<Real>::epsilon()) {
  return exp_series(alg, z, alg.tau2(), eps);
}

}  // namespace rpq
