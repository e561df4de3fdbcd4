#include "cflab/bigint.hpp"

#include "cflab/constants.hpp"
#include "cflab/error.hpp"

#include <cmath>
#include <limits>

namespace cflab {

long double log_of_bigint(const BigInt& q) {
  if (q < 1) throw DomainError("log_of_bigint: argument must be >= 1");
  const mpz_srcptr z = q.get_mpz_t();
  const std::size_t bits = mpz_sizeinbase(z, 2);
  if (bits <= 64) {
    return std::log(static_cast<long double>(mpz_get_ui(z)));
  }
  // Assemble the leading 64 bits from the top two limbs.
  static_assert(GMP_NUMB_BITS == 64);
  const std::size_t limbs = mpz_size(z);
  const unsigned __int128 top = (static_cast<unsigned __int128>(mpz_getlimbn(z, limbs - 1)) << 64) |
                                mpz_getlimbn(z, limbs - 2);
  const std::size_t top_bits = bits - 64 * (limbs - 2);  // significant bits in `top`
  const auto lead = static_cast<std::uint64_t>(top >> (top_bits - 64));
  const auto shift = static_cast<long double>(bits - 64);
  return std::log(static_cast<long double>(lead)) + shift * constants::kLn2;
}

long double log10_of_bigint(const BigInt& q) { return log_of_bigint(q) / constants::kLn10; }

std::size_t floor_log10(const BigInt& q) {
  if (q < 1) throw DomainError("floor_log10: argument must be >= 1");
  // mpz_sizeinbase may overshoot by one.
  std::size_t digits = mpz_sizeinbase(q.get_mpz_t(), 10);
  if (q < pow10(digits - 1)) --digits;
  return digits - 1;
}

BigInt parse_bigint(std::string_view text, int base) {
  BigInt value;
  const std::string s(text);
  if (s.empty() || value.set_str(s, base) != 0) {
    throw ConfigError("not an integer: '" + s + "'");
  }
  return value;
}

std::string to_string(const BigInt& value, int base) { return value.get_str(base); }

}  // namespace cflab
