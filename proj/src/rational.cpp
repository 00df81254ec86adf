#include "aford/rational.hpp"

#include <cctype>
#include <stdexcept>
#include <vector>

namespace aford {

namespace {

BigInt parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) {
    throw std::invalid_argument("empty integer in '" + std::string(whole) + "'");
  }
  BigInt v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
    }
    v = v * 10 + (c - '0');
  }
  return v;
}

BigInt pow10(unsigned e) {
  BigInt r = 1;
  for (unsigned i = 0; i < e; ++i) r *= 10;
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string_view whole = text;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty number");

  bool negative = false;
  if (text.front() == '+' || text.front() == '-') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }

  Rational value;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt p = parse_integer(text.substr(0, slash), whole);
    BigInt q = parse_integer(text.substr(slash + 1), whole);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(whole) + "'");
    value = Rational(p, q);
  } else {
    std::string_view mantissa = text;
    long exponent = 0;
    if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = text.substr(0, e);
      std::string_view exp_text = text.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text.front() == '+' || exp_text.front() == '-')) {
        exp_negative = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (exp_text.empty() || exp_text.size() > 6) {
        throw std::invalid_argument("bad exponent in '" + std::string(whole) + "'");
      }
      exponent = static_cast<long>(parse_integer(exp_text, whole));
      if (exp_negative) exponent = -exponent;
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      digits = std::string(mantissa.substr(0, dot)) + std::string(mantissa.substr(dot + 1));
      frac_digits = static_cast<long>(mantissa.size() - dot - 1);
    } else {
      digits = std::string(mantissa);
    }
    BigInt n = parse_integer(digits, whole);
    long shift = exponent - frac_digits;
    if (shift >= 0) {
      value = Rational(n * pow10(static_cast<unsigned>(shift)));
    } else {
      value = Rational(n, pow10(static_cast<unsigned>(-shift)));
    }
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& r) {
  const BigInt num = boost::multiprecision::numerator(r);
  const BigInt den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

double to_double(const Rational& r) { return r.convert_to<double>(); }

BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

Rational rising_factorial(const Rational& x, unsigned n) {
  Rational r = 1;
  for (unsigned i = 0; i < n; ++i) r *= x + i;
  return r;
}

std::uint64_t odd_double_factorial(int n) {
  std::uint64_t r = 1;
  for (int i = 1; i <= n; ++i) r *= static_cast<std::uint64_t>(2 * i - 1);
  return r;
}

}  // namespace aford
