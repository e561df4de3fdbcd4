#pragma once

#include "cflab/bigint.hpp"
#include "cflab/catalog.hpp"

#include <json.hpp>

#include <array>
#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace cflab {

/// Exact rational in lowest terms with a positive denominator.
class BigRational {
 public:
  BigRational() : num_(0), den_(1) {}
  BigRational(BigInt numerator, BigInt denominator);
  explicit BigRational(BigInt integer) : num_(std::move(integer)), den_(1) {}
  BigRational(long numerator, long denominator)
      : BigRational(BigInt(numerator), BigInt(denominator)) {}

  /// Parses "p/q", "p" or a finite decimal "x.yyy".
  static BigRational parse(std::string_view text);

  const BigInt& numerator() const { return num_; }
  const BigInt& denominator() const { return den_; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return sgn(num_); }

  BigRational abs() const { return {::abs(num_), den_, kNormalized}; }

  friend BigRational operator+(const BigRational& a, const BigRational& b);
  friend BigRational operator-(const BigRational& a, const BigRational& b);
  friend BigRational operator*(const BigRational& a, const BigRational& b);
  friend BigRational operator/(const BigRational& a, const BigRational& b);
  friend bool operator==(const BigRational& a, const BigRational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const BigRational& a, const BigRational& b);

  /// "p/q", or "p" when the denominator is 1.
  std::string str() const;

 private:
  struct Normalized {};
  static constexpr Normalized kNormalized{};
  BigRational(BigInt n, BigInt d, Normalized) : num_(std::move(n)), den_(std::move(d)) {}

  BigInt num_;
  BigInt den_;
};

/// Exact sum of 1/t over the terms, in lowest terms.  Uses a balanced merge
/// tree with lcm denominators so dyadic sums stay at 2^{p_max}.
BigRational reciprocal_sum(std::span<const BigInt> terms);

BigRational reciprocal_sum(const SequenceSpec& spec, std::size_t count,
                           const MersenneCatalog& catalog = MersenneCatalog::builtin());

/// Decimal prefix of a real number: `integer_part` (with sign) followed by
/// `precision` fraction digits, truncated toward zero.
struct DecimalApprox {
  std::string integer_part = "0";
  std::string fraction;
  std::size_t precision = 0;

  /// "0.5084485407"; the bare digit string used by golden files.
  std::string str() const;
  /// The rational value of the digit string itself.
  BigRational as_rational() const;

  friend bool operator==(const DecimalApprox&, const DecimalApprox&) = default;
};

DecimalApprox to_decimal(const BigRational& r, std::size_t digits);

/// Parses "[-]int.frac"; precision is the number of fraction digits.
DecimalApprox parse_decimal(std::string_view text);

/// Full expansion when the denominator is 2^a 5^b, else nullopt.
std::optional<DecimalApprox> terminating_decimal(const BigRational& r);

void to_json(nlohmann::json& j, const DecimalApprox& d);
void from_json(const nlohmann::json& j, DecimalApprox& d);

struct DigitCensus {
  std::array<std::uint64_t, 10> counts{};
  std::uint64_t total = 0;

  double frequency(int digit) const {
    return total == 0 ? 0.0 : static_cast<double>(counts[digit]) / static_cast<double>(total);
  }
};

/// Counts decimal digits; throws DomainError on any other character.
DigitCensus digit_census(std::string_view digits);
/// Census of the fraction digits.
DigitCensus digit_census(const DecimalApprox& approx);

}  // namespace cflab
