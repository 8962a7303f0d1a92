#pragma once

// Exact arithmetic types shared by every module. Nothing in this library
// touches floating point.

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace ballwidth {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_decimal(const BigInt& v) { return v.str(); }

/// "a/b" in lowest terms, or "a" when the denominator is 1.
inline std::string to_string(const Rational& v)
{
    const BigInt num = boost::multiprecision::numerator(v);
    const BigInt den = boost::multiprecision::denominator(v);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

/// Parses an optionally signed decimal string; throws std::invalid_argument.
inline BigInt parse_decimal(const std::string& text)
{
    if (text.empty()) {
        throw std::invalid_argument("empty decimal string");
    }
    std::size_t pos = (text[0] == '-') ? 1 : 0;
    if (pos == text.size()) {
        throw std::invalid_argument("bad decimal string: " + text);
    }
    for (std::size_t k = pos; k < text.size(); ++k) {
        if (text[k] < '0' || text[k] > '9') {
            throw std::invalid_argument("bad decimal string: " + text);
        }
    }
    return BigInt(text);
}

} // namespace ballwidth
