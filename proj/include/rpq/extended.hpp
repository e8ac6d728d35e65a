#pragma once

// Optional wider scalar for the whole header stack. Kept in its own header
// because instantiating everything twice is a noticeable compile cost; only
// the command line tool and one test pull this in.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "distributions.hpp"
#include "sampler.hpp"

namespace rpq {

using extended_real = boost::multiprecision::cpp_bin_float_50;

inline std::string format_extended(const extended_real& v) {
  return v.str(std::numeric_limits<extended_real>::max_digits10);
}

}  // namespace rpq
