#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace focklab {

// Working type for the separable assembly route, whose binomial sums cancel heavily.
using HighFloat = boost::multiprecision::cpp_bin_float_50;

}  // namespace focklab
