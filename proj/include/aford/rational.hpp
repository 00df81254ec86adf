#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace aford {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// Parses "p/q", an integer, or a finite decimal ("0.125", "1e-1") into an
/// exact rational. Decimals are expanded digit by digit, never through a
/// double. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

BigInt numerator_of(const Rational& r);
BigInt denominator_of(const Rational& r);

double to_double(const Rational& r);

/// n! as an exact integer.
BigInt factorial(unsigned n);

BigInt binomial(unsigned n, unsigned k);

/// (x)_n = x (x+1) ... (x+n-1), with (x)_0 = 1.
Rational rising_factorial(const Rational& x, unsigned n);

/// (2n-1)!! = 1 * 3 * ... * (2n-1); returns 1 for n <= 0.
std::uint64_t odd_double_factorial(int n);

}  // namespace aford
