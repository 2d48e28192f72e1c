#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "lm/errors.hpp"

namespace lm {

using BigInt = boost::multiprecision::cpp_int;

// Exact rational arithmetic for all pre-mapping evaluation. cpp_rational
// keeps values canonical: lowest terms, positive denominator.
using Rational = boost::multiprecision::cpp_rational;

// floor toward -inf, exact.
inline BigInt rational_floor(const Rational& x) {
  BigInt num = numerator(x);
  BigInt den = denominator(x);
  BigInt q = num / den; // truncates toward zero
  if (num < 0 && q * den != num) {
    --q;
  }
  return q;
}

inline bool is_integer(const Rational& x) { return denominator(x) == 1; }

// Canonical rendering: always "p/q", q > 0, lowest terms (e.g. "2/1").
inline std::string rational_to_string(const Rational& x) {
  return numerator(x).str() + "/" + denominator(x).str();
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) {
    return false;
  }
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      return false;
    }
  }
  return true;
}

// Base-10 only; cpp_int's string constructor would read a leading zero as
// an octal prefix.
inline BigInt digits_to_bigint(std::string_view digits) {
  BigInt v = 0;
  for (char c : digits) {
    v *= 10;
    v += c - '0';
  }
  return v;
}

} // namespace detail

// Accepts "p/q", integers, and exact decimal literals ("0.3" == 3/10).
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  if (s.empty()) {
    throw ParseError("empty rational literal");
  }

  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) {
    throw ParseError("bare sign is not a rational literal");
  }

  const auto bad = [&] {
    return ParseError("bad rational literal: '" + std::string(text) + "'");
  };

  Rational value;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    std::string_view p = s.substr(0, slash);
    std::string_view q = s.substr(slash + 1);
    if (!detail::all_digits(p) || !detail::all_digits(q)) {
      throw bad();
    }
    BigInt den = detail::digits_to_bigint(q);
    if (den == 0) {
      throw ParseError("zero denominator in '" + std::string(text) + "'");
    }
    value = Rational(detail::digits_to_bigint(p), den);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view ip = s.substr(0, dot);
    std::string_view fp = s.substr(dot + 1);
    if (!detail::all_digits(ip) || !detail::all_digits(fp)) {
      throw bad();
    }
    BigInt scale = 1;
    for (std::size_t i = 0; i < fp.size(); ++i) {
      scale *= 10;
    }
    BigInt num =
        detail::digits_to_bigint(ip) * scale + detail::digits_to_bigint(fp);
    value = Rational(num, scale);
  } else {
    if (!detail::all_digits(s)) {
      throw bad();
    }
    value = Rational(detail::digits_to_bigint(s));
  }
  return negative ? Rational(-value) : value;
}

} // namespace lm
