#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace grsum {

// Exact arithmetic for the inclusion-exclusion identity checks and the
// derangement/coprime counts.  The identities are exact statements, so
// floating point is banned on those paths.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Rational rational_abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

}  // namespace grsum
