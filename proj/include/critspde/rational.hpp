#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace critspde {

using Q = boost::multiprecision::cpp_rational;

// A rational value together with a provenance flag. `exact` is false when the
// value was produced from a binary floating-point input.
struct Num {
    Q value;
    bool exact = true;
};

// Parses "3", "-2/3", "0.25", "1e-3" exactly. Decimal strings are exact.
Q parse_q(const std::string& text);

// Converts a double to the rational with the same binary value (inexact input).
Q q_from_double(double x);

double to_double(const Q& q);

// "p/q" or "p" when the denominator is one.
std::string to_string(const Q& q);

Q q_min(const Q& a, const Q& b);
Q q_max(const Q& a, const Q& b);

}  // namespace critspde
