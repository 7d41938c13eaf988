#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace lipset {

/// Exact rational number. GMP keeps it in lowest terms with a positive
/// denominator as long as every value goes through the constructors below.
using Rational = mpq_class;
using Integer = mpz_class;

/// Thrown for malformed numeric or file input.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when a depth or size budget would be exceeded.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts "p/q", "p", and finite decimals such as "-0.125".
Rational parse_rational(std::string_view text);

/// Canonical "p/q" (or "p" when the denominator is one).
std::string to_string(const Rational& q);

/// Fixed-point decimal rendering, truncated toward zero after `digits`.
std::string to_decimal(const Rational& q, int digits = 12);

/// 2^k for any integer k.
Rational pow2(long k);
/// b^k for k >= 0.
Integer ipow(long base, unsigned long k);

Rational abs(const Rational& q);
Integer floor(const Rational& q);
Integer ceil(const Rational& q);

/// floor(log2(q)) for q > 0.
long floor_log2(const Rational& q);

inline const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline const Rational& max(const Rational& a, const Rational& b) { return a < b ? b : a; }

}  // namespace lipset
