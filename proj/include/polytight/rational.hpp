#pragma once

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/gmp.hpp>

#include <string>

namespace polytight {

// Expression templates are disabled so the type composes with Eigen's own.
using Rational =
    boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                  boost::multiprecision::et_off>;

// Exact binary value of a double; 0.3 maps to 5404319552844595/18014398509481984.
inline Rational to_rational(double value) { return Rational(value); }

// Parses "3/10" or "0.3" (the latter read as the exact decimal 3/10).
Rational parse_rational(const std::string& text);

inline double to_double(const Rational& value) {
  return value.convert_to<double>();
}

}  // namespace polytight
