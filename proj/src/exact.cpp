#include "cflab/exact.hpp"

#include "cflab/error.hpp"

#include <algorithm>

namespace cflab {

BigRational::BigRational(BigInt numerator, BigInt denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_ == 0) throw DomainError("rational with zero denominator");
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  BigInt g;
  mpz_gcd(g.get_mpz_t(), num_.get_mpz_t(), den_.get_mpz_t());
  if (g != 1) {
    mpz_divexact(num_.get_mpz_t(), num_.get_mpz_t(), g.get_mpz_t());
    mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
  }
}

BigRational BigRational::parse(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return {parse_bigint(text.substr(0, slash)), parse_bigint(text.substr(slash + 1))};
  }
  if (text.find('.') != std::string_view::npos) return parse_decimal(text).as_rational();
  return BigRational(parse_bigint(text));
}

BigRational operator+(const BigRational& a, const BigRational& b) {
  return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
}

BigRational operator-(const BigRational& a, const BigRational& b) {
  return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
}

BigRational operator*(const BigRational& a, const BigRational& b) {
  return {a.num_ * b.num_, a.den_ * b.den_};
}

BigRational operator/(const BigRational& a, const BigRational& b) {
  if (b.num_ == 0) throw DomainError("rational division by zero");
  return {a.num_ * b.den_, a.den_ * b.num_};
}

std::strong_ordering operator<=>(const BigRational& a, const BigRational& b) {
  const int c = cmp(BigInt(a.num_ * b.den_), BigInt(b.num_ * a.den_));
  return c < 0 ? std::strong_ordering::less
               : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
}

std::string BigRational::str() const {
  if (den_ == 1) return num_.get_str();
  return num_.get_str() + "/" + den_.get_str();
}

namespace {

struct Partial {
  BigInt num;
  BigInt den;
};

// Sum of 1/terms[lo..hi) as an unreduced fraction over lcm of the terms.
Partial merge_reciprocals(std::span<const BigInt> terms) {
  if (terms.size() == 1) return {BigInt(1), terms.front()};
  const auto mid = terms.size() / 2;
  Partial left = merge_reciprocals(terms.first(mid));
  Partial right = merge_reciprocals(terms.subspan(mid));
  BigInt g;
  mpz_gcd(g.get_mpz_t(), left.den.get_mpz_t(), right.den.get_mpz_t());
  BigInt left_scale, right_scale;
  mpz_divexact(left_scale.get_mpz_t(), right.den.get_mpz_t(), g.get_mpz_t());
  mpz_divexact(right_scale.get_mpz_t(), left.den.get_mpz_t(), g.get_mpz_t());
  Partial out;
  out.num = left.num * left_scale + right.num * right_scale;
  out.den = left.den * left_scale;
  return out;
}

}  // namespace

BigRational reciprocal_sum(std::span<const BigInt> terms) {
  if (terms.empty()) throw DomainError("reciprocal sum of an empty sequence");
  for (const auto& t : terms) {
    if (t < 1) throw DomainError("reciprocal sum terms must be positive");
  }
  Partial total = merge_reciprocals(terms);
  return {std::move(total.num), std::move(total.den)};
}

BigRational reciprocal_sum(const SequenceSpec& spec, std::size_t count,
                           const MersenneCatalog& catalog) {
  if (count == 0) throw DomainError("reciprocal sum needs at least one term");
  const auto terms = sequence_terms(spec, count, catalog);
  return reciprocal_sum(terms);
}

std::string DecimalApprox::str() const {
  if (precision == 0) return integer_part;
  return integer_part + "." + fraction;
}

BigRational DecimalApprox::as_rational() const {
  const bool negative = !integer_part.empty() && integer_part.front() == '-';
  BigInt magnitude = parse_bigint(negative ? integer_part.substr(1) : integer_part);
  const BigInt scale = pow10(precision);
  magnitude *= scale;
  if (precision > 0) magnitude += parse_bigint(fraction);
  return {negative ? BigInt(-magnitude) : magnitude, scale};
}

DecimalApprox to_decimal(const BigRational& r, std::size_t digits) {
  const BigInt magnitude = ::abs(r.numerator());
  BigInt scaled = magnitude * pow10(digits);
  mpz_tdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), r.denominator().get_mpz_t());

  DecimalApprox out;
  out.precision = digits;
  std::string text = scaled.get_str();
  if (text.size() <= digits) text.insert(0, digits + 1 - text.size(), '0');
  out.integer_part = text.substr(0, text.size() - digits);
  out.fraction = text.substr(text.size() - digits);
  if (r.sign() < 0) out.integer_part.insert(0, "-");
  return out;
}

DecimalApprox parse_decimal(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) {
    text.remove_suffix(1);
  }
  DecimalApprox out;
  const auto dot = text.find('.');
  out.integer_part = std::string(text.substr(0, dot));
  if (dot != std::string_view::npos) out.fraction = std::string(text.substr(dot + 1));
  out.precision = out.fraction.size();

  const std::string_view int_digits = !out.integer_part.empty() && out.integer_part[0] == '-'
                                          ? std::string_view(out.integer_part).substr(1)
                                          : std::string_view(out.integer_part);
  const auto is_digit = [](char c) { return c >= '0' && c <= '9'; };
  if (int_digits.empty() || !std::all_of(int_digits.begin(), int_digits.end(), is_digit) ||
      !std::all_of(out.fraction.begin(), out.fraction.end(), is_digit)) {
    throw ConfigError("malformed decimal value");
  }
  return out;
}

std::optional<DecimalApprox> terminating_decimal(const BigRational& r) {
  BigInt rest = r.denominator();
  const std::size_t twos = mpz_scan1(rest.get_mpz_t(), 0);
  mpz_tdiv_q_2exp(rest.get_mpz_t(), rest.get_mpz_t(), twos);
  const BigInt five(5);
  std::size_t fives = mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), five.get_mpz_t());
  if (rest != 1) return std::nullopt;
  return to_decimal(r, std::max(twos, fives));
}

void to_json(nlohmann::json& j, const DecimalApprox& d) {
  j = nlohmann::json{{"digits", d.str()}, {"precision", d.precision}};
}

void from_json(const nlohmann::json& j, DecimalApprox& d) {
  d = parse_decimal(j.at("digits").get<std::string>());
  const auto declared = j.at("precision").get<std::size_t>();
  if (declared > d.precision) throw ConfigError("decimal declares more precision than digits");
  d.precision = declared;
  d.fraction.resize(declared);
}

DigitCensus digit_census(std::string_view digits) {
  if (digits.empty()) throw DomainError("digit census of an empty string");
  DigitCensus census;
  for (const char c : digits) {
    if (c < '0' || c > '9') {
      throw DomainError(std::string("digit census: non-digit character '") + c + "'");
    }
    ++census.counts[static_cast<std::size_t>(c - '0')];
  }
  census.total = digits.size();
  return census;
}

DigitCensus digit_census(const DecimalApprox& approx) { return digit_census(approx.fraction); }

}  // namespace cflab
