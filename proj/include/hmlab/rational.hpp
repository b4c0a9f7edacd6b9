#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cstdint>
#include <string>

namespace hmlab {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

inline Rational rat(uint64_t num, uint64_t den) { return Rational(BigInt(num), BigInt(den)); }

inline double to_double(const Rational& r) {
    return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

inline std::string rat_str(const Rational& r) {
    return r.numerator().str() + "/" + r.denominator().str();
}

inline BigInt bigint_pow(BigInt base, unsigned exp) {
    BigInt out = 1;
    while (exp) {
        if (exp & 1u) out *= base;
        base *= base;
        exp >>= 1;
    }
    return out;
}

}  // namespace hmlab
