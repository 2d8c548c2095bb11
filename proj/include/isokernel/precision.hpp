#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <stdexcept>
#include <string>

namespace isokernel {

/// Extended-precision scalar used where double-rounded samples lose the
/// information being extracted (monomial coefficients on l^2).
using Precise = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>,
                                              boost::multiprecision::et_off>;

/// Raised when a numerical routine cannot produce a trustworthy result
/// (non-finite kernel values, factorization failures, recursion breakdown).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace isokernel
