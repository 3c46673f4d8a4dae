#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace polyopt {

using Integer = boost::multiprecision::cpp_int;

inline bool is_unit(const Integer& c) { return c == 1 || c == -1; }

inline Integer abs_value(const Integer& c) { return c < 0 ? Integer(-c) : c; }

inline int sign_of(const Integer& c) { return c < 0 ? -1 : (c > 0 ? 1 : 0); }

// Non-negative gcd; gcd(0, 0) = 0.
inline Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(abs_value(a), abs_value(b));
}

namespace modular {

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

inline std::uint64_t add(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
  std::uint64_t s = a + b;
  return (s >= p || s < a) ? s - p : s;
}

inline std::uint64_t pow(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
  std::uint64_t result = 1 % p;
  base %= p;
  while (exp != 0) {
    if (exp & 1U) result = mul(result, base, p);
    base = mul(base, base, p);
    exp >>= 1U;
  }
  return result;
}

// Inverse modulo a prime.
inline std::uint64_t inverse(std::uint64_t a, std::uint64_t p) {
  if (a % p == 0) throw std::domain_error("no inverse of zero modulo prime");
  return pow(a, p - 2, p);
}

inline std::uint64_t reduce(const Integer& c, std::uint64_t p) {
  Integer r = c % p;
  if (r < 0) r += p;
  return r.convert_to<std::uint64_t>();
}

}  // namespace modular

}  // namespace polyopt
