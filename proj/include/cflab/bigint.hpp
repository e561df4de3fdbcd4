#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace cflab {

using BigInt = mpz_class;

// Natural logarithm of Q >= 1, from the bit length and the leading 64 bits.
// The operand is never converted as a whole; relative error is below 1e-15.
long double log_of_bigint(const BigInt& q);

// Base-10 logarithm, same method.
long double log10_of_bigint(const BigInt& q);

// Exact floor(log10(q)) for q >= 1.
std::size_t floor_log10(const BigInt& q);

BigInt parse_bigint(std::string_view text, int base = 10);
std::string to_string(const BigInt& value, int base = 10);

inline BigInt pow2(std::uint64_t exponent) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, exponent);
  return r;
}

inline BigInt pow10(std::uint64_t exponent) {
  BigInt r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, exponent);
  return r;
}

}  // namespace cflab
