#include "lipset/rational.hpp"

#include <cctype>

namespace lipset {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  s = s.substr(start);
  if (s.empty()) throw ParseError("empty rational");

  bool negative = false;
  std::string body = s;
  if (body[0] == '-' || body[0] == '+') {
    negative = body[0] == '-';
    body = body.substr(1);
  }

  Rational out;
  if (auto slash = body.find('/'); slash != std::string::npos) {
    std::string num = body.substr(0, slash);
    std::string den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw ParseError("bad rational '" + s + "'");
    Integer d(den, 10);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    out = Rational(Integer(num, 10), d);
  } else if (auto dot = body.find('.'); dot != std::string::npos) {
    std::string whole = body.substr(0, dot);
    std::string frac = body.substr(dot + 1);
    if (whole.empty()) whole = "0";
    if (!all_digits(whole) || (!frac.empty() && !all_digits(frac)) || (frac.empty() && whole.empty())) {
      throw ParseError("bad decimal '" + s + "'");
    }
    Integer num(whole + frac, 10);
    out = Rational(num, ipow(10, frac.size()));
  } else {
    if (!all_digits(body)) throw ParseError("bad rational '" + s + "'");
    out = Rational(Integer(body, 10));
  }
  out.canonicalize();
  if (negative) out = -out;
  return out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

std::string to_decimal(const Rational& q, int digits) {
  Integer scale = ipow(10, static_cast<unsigned long>(digits));
  Rational a = abs(q);
  Integer scaled = a.get_num() * scale / a.get_den();
  std::string s = scaled.get_str();
  if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  std::string out = s.substr(0, s.size() - static_cast<std::size_t>(digits));
  if (digits > 0) out += "." + s.substr(s.size() - static_cast<std::size_t>(digits));
  if (q < 0 && scaled != 0) out.insert(0, "-");
  return out;
}

Integer ipow(long base, unsigned long k) {
  Integer out;
  Integer b(base);
  mpz_pow_ui(out.get_mpz_t(), b.get_mpz_t(), k);
  return out;
}

Rational pow2(long k) {
  if (k >= 0) return Rational(ipow(2, static_cast<unsigned long>(k)));
  return Rational(Integer(1), ipow(2, static_cast<unsigned long>(-k)));
}

Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

Integer floor(const Rational& q) {
  Integer out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Integer ceil(const Rational& q) {
  Integer out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

long floor_log2(const Rational& q) {
  if (q <= 0) throw std::invalid_argument("floor_log2 of a non-positive value");
  long k = static_cast<long>(mpz_sizeinbase(q.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  // k is within one of the answer; settle it exactly.
  while (pow2(k) > q) --k;
  while (pow2(k + 1) <= q) ++k;
  return k;
}

}  // namespace lipset
