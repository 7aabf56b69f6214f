#ifndef CUTSTACK_EXACT_HPP
#define CUTSTACK_EXACT_HPP

// Arbitrary precision integers and rationals, plus exact comparisons
// involving rational powers. Everything here is decided in integer
// arithmetic; no floating point is used for any verdict.

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cutstack {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Thrown when an argument is outside the domain of an operation.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline BigInt big(std::uint64_t v) {
  BigInt out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

inline bool fits_u64(const BigInt& v) {
  return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

inline std::uint64_t to_u64(const BigInt& v) {
  if (!fits_u64(v)) throw domain_error("integer does not fit in 64 bits: " + v.get_str());
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

inline BigInt parse_bigint(std::string_view text) {
  if (text.empty()) throw domain_error("empty integer literal");
  std::size_t i = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (i == text.size()) throw domain_error("bad integer literal: " + std::string(text));
  for (std::size_t k = i; k < text.size(); ++k)
    if (text[k] < '0' || text[k] > '9') throw domain_error("bad integer literal: " + std::string(text));
  return BigInt(std::string(text[0] == '+' ? text.substr(1) : text), 10);
}

/// Parses "u/v" or "u" into a canonical rational.
inline Rational parse_rational(std::string_view text) {
  auto slash = text.find('/');
  Rational out;
  if (slash == std::string_view::npos) {
    out = Rational(parse_bigint(text));
  } else {
    BigInt den = parse_bigint(text.substr(slash + 1));
    if (den == 0) throw domain_error("zero denominator: " + std::string(text));
    out = Rational(parse_bigint(text.substr(0, slash)), den);
  }
  out.canonicalize();
  return out;
}

inline std::string to_fraction_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline BigInt pow(const BigInt& base, unsigned long exp) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exp);
  return out;
}

inline BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
  BigInt q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline BigInt floor_root(const BigInt& x, unsigned long k) {
  if (sgn(x) < 0) throw domain_error("root of a negative integer");
  BigInt r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  return r;
}

inline BigInt ceil_root(const BigInt& x, unsigned long k) {
  BigInt r = floor_root(x, k);
  if (pow(r, k) != x) ++r;
  return r;
}

inline BigInt isqrt(const BigInt& x) { return floor_root(x, 2); }

inline BigInt floor(const Rational& q) { return floor_div(q.get_num(), q.get_den()); }
inline BigInt ceil(const Rational& q) { return ceil_div(q.get_num(), q.get_den()); }

/// Number of bits needed to write v (0 for v = 0).
inline std::size_t bit_length(const BigInt& v) {
  return sgn(v) == 0 ? 0 : mpz_sizeinbase(v.get_mpz_t(), 2);
}

namespace detail {

struct SmallFraction {
  unsigned long num;
  unsigned long den;
};

inline SmallFraction exponent_parts(const Rational& e) {
  if (sgn(e) <= 0) throw domain_error("exponent must be positive: " + to_fraction_string(e));
  if (!e.get_num().fits_ulong_p() || !e.get_den().fits_ulong_p())
    throw domain_error("exponent too large: " + to_fraction_string(e));
  return {e.get_num().get_ui(), e.get_den().get_ui()};
}

inline void require_positive(const Rational& x) {
  if (sgn(x) <= 0) throw domain_error("power base must be positive: " + to_fraction_string(x));
}

}  // namespace detail

/// Compares x^e with y for positive rationals x, y and positive rational e.
/// Returns -1, 0 or 1 as x^e is below, equal to or above y.
inline int compare_pow(const Rational& x, const Rational& e, const Rational& y) {
  detail::require_positive(x);
  detail::require_positive(y);
  auto [u, v] = detail::exponent_parts(e);
  // x^(u/v) ? y  <=>  x^u ? y^v  <=>  xn^u * yd^v ? yn^v * xd^u
  BigInt lhs = pow(x.get_num(), u) * pow(y.get_den(), v);
  BigInt rhs = pow(y.get_num(), v) * pow(x.get_den(), u);
  return cmp(lhs, rhs) < 0 ? -1 : (cmp(lhs, rhs) > 0 ? 1 : 0);
}

/// Compares x^ex with y^ey. Both exponents are folded into one integer
/// power per side, so keep denominators small.
inline int compare_pow2(const Rational& x, const Rational& ex, const Rational& y, const Rational& ey) {
  detail::require_positive(x);
  detail::require_positive(y);
  auto [a, b] = detail::exponent_parts(ex);
  auto [c, d] = detail::exponent_parts(ey);
  // x^(a/b) ? y^(c/d)  <=>  x^(a d) ? y^(c b)
  Rational lhs(pow(x.get_num(), a * d), pow(x.get_den(), a * d));
  Rational rhs(pow(y.get_num(), c * b), pow(y.get_den(), c * b));
  return cmp(lhs, rhs) < 0 ? -1 : (cmp(lhs, rhs) > 0 ? 1 : 0);
}

/// Smallest integer z with z >= x^e.
inline BigInt ceil_pow(const Rational& x, const Rational& e) {
  detail::require_positive(x);
  auto [u, v] = detail::exponent_parts(e);
  // z^v >= a^u / b^u  <=>  z^v >= ceil(a^u / b^u) since z^v is an integer.
  BigInt q = ceil_div(pow(x.get_num(), u), pow(x.get_den(), u));
  return ceil_root(q, v);
}

/// Largest integer z with z <= x^e.
inline BigInt floor_pow(const Rational& x, const Rational& e) {
  detail::require_positive(x);
  auto [u, v] = detail::exponent_parts(e);
  BigInt q = floor_div(pow(x.get_num(), u), pow(x.get_den(), u));
  return floor_root(q, v);
}

/// Largest integer z with z < x^e (strict).
inline BigInt floor_pow_strict(const Rational& x, const Rational& e) {
  return ceil_pow(x, e) - 1;
}

/// Decimal rendering of q rounded half-to-even at `places` digits.
inline std::string to_decimal(const Rational& q, unsigned places = 6) {
  BigInt scale = pow(BigInt(10), places);
  Rational scaled = q * Rational(scale);
  bool negative = sgn(scaled) < 0;
  if (negative) scaled = -scaled;
  BigInt whole = floor(scaled);
  Rational frac = scaled - Rational(whole);
  int c = cmp(frac, Rational(1, 2));
  if (c > 0 || (c == 0 && mpz_odd_p(whole.get_mpz_t()))) ++whole;
  std::string digits = whole.get_str();
  if (digits.size() <= places) digits.insert(0, places + 1 - digits.size(), '0');
  std::string out = digits.substr(0, digits.size() - places);
  if (places > 0) out += "." + digits.substr(digits.size() - places);
  if (negative && whole != 0) out.insert(0, "-");
  return out;
}

}  // namespace cutstack

#endif  // CUTSTACK_EXACT_HPP
