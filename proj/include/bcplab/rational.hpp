#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>

namespace bcplab {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational arithmetic for similarity values. Conversion from double is
/// exact (a double is a dyadic rational), so comparisons against float
/// thresholds never suffer rounding at the boundary.
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational make_rational(std::uint64_t num, std::uint64_t den) {
    return Rational(BigInt(num), BigInt(den));
}

inline BigInt pow2i(const BigInt& base, unsigned i) {
    // base^(2^i) by repeated squaring
    BigInt v = base;
    for (unsigned k = 0; k < i; ++k) v *= v;
    return v;
}

}  // namespace bcplab
