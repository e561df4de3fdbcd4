#include "cflab/contfrac.hpp"

#include "cflab/error.hpp"

#include <cassert>
#include <istream>
#include <ostream>
#include <string>

namespace cflab {

namespace {

// Width of the leading-bit window used by the word-level Euclid steps.  With
// 62 bits, all cofactors and bracketing sums stay inside signed 64-bit range.
constexpr std::size_t kWordBits = 62;

// floor(z / 2^shift) for a value known to fit in 64 bits.
std::uint64_t shifted_word(const BigInt& z, std::size_t shift) {
  const mpz_srcptr p = z.get_mpz_t();
  const std::size_t limb = shift / 64;
  const unsigned offset = shift % 64;
  const std::size_t n = mpz_size(p);
  const unsigned __int128 lo = limb < n ? mpz_getlimbn(p, limb) : 0;
  const unsigned __int128 hi = limb + 1 < n ? mpz_getlimbn(p, limb + 1) : 0;
  return static_cast<std::uint64_t>(((hi << 64) | lo) >> offset);
}

// out = x * cx + y * cy
void linear_combination(BigInt& out, const BigInt& x, long cx, const BigInt& y, long cy) {
  mpz_mul_si(out.get_mpz_t(), x.get_mpz_t(), cx);
  if (cy >= 0) {
    mpz_addmul_ui(out.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(cy));
  } else {
    mpz_submul_ui(out.get_mpz_t(), y.get_mpz_t(), static_cast<unsigned long>(-cy));
  }
}

struct Matrix {
  BigInt a, b, c, d;  // [[a, b], [c, d]]
};

Matrix multiply(const Matrix& x, const Matrix& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

// Product of [[q, 1], [1, 0]] over the quotients.
Matrix quotient_product(std::span<const BigInt> quotients) {
  if (quotients.size() == 1) return {quotients[0], BigInt(1), BigInt(1), BigInt(0)};
  const auto mid = quotients.size() / 2;
  return multiply(quotient_product(quotients.first(mid)), quotient_product(quotients.subspan(mid)));
}

// Returns {P_n, Q_n} of [a0; quotients].
Convergent final_convergent(const BigInt& a0, std::span<const BigInt> quotients) {
  if (quotients.empty()) return {a0, BigInt(1)};
  const Matrix m = quotient_product(quotients);
  return {a0 * m.a + m.c, m.a};
}

// floor(log10(1 / width)) for a positive width, 0 when width >= 1.
std::size_t width_digits(const BigRational& width) {
  BigInt inverse = width.denominator() / width.numerator();
  return inverse < 1 ? 0 : floor_log10(inverse);
}

}  // namespace

CFExpansion canonicalize(CFExpansion cf) {
  for (const auto& q : cf.quotients) {
    if (q < 1) throw DomainError("partial quotients must be positive");
  }
  if (cf.tail == TailKind::exact && cf.quotients.size() >= 2 && cf.quotients.back() == 1) {
    cf.quotients.pop_back();
    cf.quotients.back() += 1;
  } else if (cf.tail == TailKind::exact && cf.quotients.size() == 1 && cf.quotients.back() == 1) {
    cf.quotients.clear();
    cf.a0 += 1;
  }
  return cf;
}

// ---------------------------------------------------------------------------
// EuclidExpander

EuclidExpander::EuclidExpander(const BigInt& num, const BigInt& den) {
  if (den <= 0) throw DomainError("continued fraction of a rational needs a positive denominator");
  mpz_fdiv_qr(a0_.get_mpz_t(), b_.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  a_ = den;
}

EuclidExpander EuclidExpander::resume(BigInt a0, BigInt a, BigInt b, std::size_t emitted) {
  if (b < 0 || (b != 0 && a <= b)) throw DomainError("invalid Euclid remainder state");
  EuclidExpander e;
  e.a0_ = std::move(a0);
  e.a_ = std::move(a);
  e.b_ = std::move(b);
  e.emitted_ = emitted;
  return e;
}

std::size_t EuclidExpander::step(std::vector<BigInt>& out) {
  if (done()) return 0;
  return word_steps(out);
}

std::size_t EuclidExpander::plain_step(std::vector<BigInt>& out) {
  BigInt q;
  mpz_tdiv_qr(q.get_mpz_t(), t0_.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
  out.push_back(std::move(q));
  mpz_swap(a_.get_mpz_t(), b_.get_mpz_t());
  mpz_swap(b_.get_mpz_t(), t0_.get_mpz_t());
  ++emitted_;
  return 1;
}

std::size_t EuclidExpander::word_steps(std::vector<BigInt>& out) {
  const std::size_t bits = mpz_sizeinbase(a_.get_mpz_t(), 2);
  if (bits <= 64) {
    std::uint64_t x = mpz_get_ui(a_.get_mpz_t());
    std::uint64_t y = mpz_get_ui(b_.get_mpz_t());
    std::size_t count = 0;
    while (y != 0) {
      out.emplace_back(static_cast<unsigned long>(x / y));
      const std::uint64_t r = x % y;
      x = y;
      y = r;
      ++count;
    }
    a_ = static_cast<unsigned long>(x);
    b_ = 0;
    emitted_ += count;
    return count;
  }

  const std::size_t shift = bits - kWordBits;
  __int128 u = shifted_word(a_, shift);
  __int128 v = shifted_word(b_, shift);
  __int128 ca = 1, cb = 0, cc = 0, cd = 1;
  std::size_t count = 0;
  for (;;) {
    const __int128 den_lo = v + cc;
    const __int128 den_hi = v + cd;
    if (den_lo <= 0 || den_hi <= 0) break;
    const __int128 q = (u + ca) / den_lo;
    if (q != (u + cb) / den_hi) break;
    out.emplace_back(static_cast<unsigned long>(q));
    ++count;
    __int128 t = ca - q * cc;
    ca = cc;
    cc = t;
    t = cb - q * cd;
    cb = cd;
    cd = t;
    t = u - q * v;
    u = v;
    v = t;
  }
  if (count == 0) return plain_step(out);

  linear_combination(t0_, a_, static_cast<long>(ca), b_, static_cast<long>(cb));
  linear_combination(t1_, a_, static_cast<long>(cc), b_, static_cast<long>(cd));
  mpz_swap(a_.get_mpz_t(), t0_.get_mpz_t());
  mpz_swap(b_.get_mpz_t(), t1_.get_mpz_t());
  assert(b_ >= 0 && a_ > b_);
  emitted_ += count;
  return count;
}

// ---------------------------------------------------------------------------
// Expansions

CFExpansion cf_expand_rational(const BigRational& r) {
  EuclidExpander e(r.numerator(), r.denominator());
  CFExpansion cf;
  cf.a0 = e.a0();
  while (!e.done()) e.step(cf.quotients);
  return cf;
}

CFExpansion cf_expand_certified(const BigRational& low_in, const BigRational& high_in) {
  const bool ordered = low_in <= high_in;
  const BigRational& low = ordered ? low_in : high_in;
  const BigRational& high = ordered ? high_in : low_in;
  if (low == high) return cf_expand_rational(low);

  EuclidExpander lo(low.numerator(), low.denominator());
  EuclidExpander hi(high.numerator(), high.denominator());
  if (lo.a0() != hi.a0()) {
    throw DomainError("interval too wide: the endpoints have different integer parts");
  }

  CFExpansion cf;
  cf.a0 = lo.a0();
  cf.tail = TailKind::truncated;
  cf.precision = width_digits(high - low);

  std::vector<BigInt> lo_q, hi_q;
  for (std::size_t i = 0;; ++i) {
    while (lo_q.size() <= i && !lo.done()) lo.step(lo_q);
    while (hi_q.size() <= i && !hi.done()) hi.step(hi_q);
    if (i >= lo_q.size() || i >= hi_q.size() || lo_q[i] != hi_q[i]) break;
    cf.quotients.push_back(lo_q[i]);
  }
  return cf;
}

CFExpansion cf_expand_certified(const DecimalApprox& approx) {
  const BigRational value = approx.as_rational();
  const BigRational ulp(BigInt(1), pow10(approx.precision));
  const bool negative = !approx.integer_part.empty() && approx.integer_part.front() == '-';
  CFExpansion cf = negative ? cf_expand_certified(value - ulp, value)
                            : cf_expand_certified(value, value + ulp);
  cf.tail = TailKind::truncated;
  cf.precision = approx.precision;
  return cf;
}

CFExpansion cf_expand_paper(const BigRational& approx, std::size_t digits) {
  EuclidExpander e(approx.numerator(), approx.denominator());
  ConvergentStream stream(e.a0());
  const BigInt limit = pow10(digits);
  const std::size_t limit_bits = mpz_sizeinbase(limit.get_mpz_t(), 2);

  CFExpansion cf;
  cf.a0 = e.a0();
  cf.tail = TailKind::truncated;
  cf.precision = digits;

  std::vector<BigInt> buffer;
  std::size_t next = 0;
  for (;;) {
    while (buffer.size() <= next && !e.done()) e.step(buffer);
    if (next >= buffer.size()) break;
    stream.push(buffer[next]);

    const std::size_t q_bits = mpz_sizeinbase(stream.q().get_mpz_t(), 2);
    bool below;
    if (2 * q_bits + 1 <= limit_bits) {
      below = true;
    } else if (2 * q_bits >= limit_bits + 2) {
      below = false;
    } else {
      below = stream.q() * stream.q() < limit;
    }
    if (!below) break;
    cf.quotients.push_back(buffer[next]);
    ++next;
  }
  return cf;
}

BigRational from_cf(const CFExpansion& cf) {
  for (const auto& q : cf.quotients) {
    if (q < 1) throw DomainError("partial quotients must be positive");
  }
  Convergent c = final_convergent(cf.a0, cf.quotients);
  return {std::move(c.p), std::move(c.q)};
}

// ---------------------------------------------------------------------------
// Convergents

ConvergentStream::ConvergentStream(const BigInt& a0) {
  s_.p = a0;
}

ConvergentStream ConvergentStream::restore(State state) {
  ConvergentStream s;
  s.s_ = std::move(state);
  return s;
}

void ConvergentStream::push(const BigInt& quotient) {
  mpz_mul(tmp_.get_mpz_t(), quotient.get_mpz_t(), s_.p.get_mpz_t());
  mpz_add(tmp_.get_mpz_t(), tmp_.get_mpz_t(), s_.p_prev.get_mpz_t());
  mpz_swap(s_.p_prev.get_mpz_t(), s_.p.get_mpz_t());
  mpz_swap(s_.p.get_mpz_t(), tmp_.get_mpz_t());

  mpz_mul(tmp_.get_mpz_t(), quotient.get_mpz_t(), s_.q.get_mpz_t());
  mpz_add(tmp_.get_mpz_t(), tmp_.get_mpz_t(), s_.q_prev.get_mpz_t());
  mpz_swap(s_.q_prev.get_mpz_t(), s_.q.get_mpz_t());
  mpz_swap(s_.q.get_mpz_t(), tmp_.get_mpz_t());
  ++s_.n;
}

std::vector<Convergent> convergents(const CFExpansion& cf) {
  std::vector<Convergent> out;
  out.reserve(cf.quotients.size() + 1);
  ConvergentStream stream(cf.a0);
  out.push_back(stream.current());
  for (const auto& q : cf.quotients) {
    stream.push(q);
    out.push_back(stream.current());
  }
  return out;
}

ErrorSandwich error_bounds(const BigInt& q_n, const BigInt& q_next) {
  if (q_n < 1 || q_next < 1) throw DomainError("error bounds need positive denominators");
  const long double ln_q = log_of_bigint(q_n);
  return {-(ln_q + log_of_bigint(q_n + q_next)), -(ln_q + log_of_bigint(q_next))};
}

ErrorBoundCheck error_bounds(const BigRational& r, std::span<const Convergent> series, std::size_t n) {
  if (n + 1 >= series.size()) {
    throw DomainError("error bounds at n = " + std::to_string(n) + " need convergent n + 1");
  }
  const Convergent& c = series[n];
  BigRational distance = (r - BigRational(c.p, c.q)).abs();
  if (distance.sign() == 0) {
    throw DomainError("value coincides with convergent " + std::to_string(n));
  }
  ErrorBoundCheck check{error_bounds(c.q, series[n + 1].q), distance, 0};
  check.ln_distance = log_of_bigint(distance.numerator()) - log_of_bigint(distance.denominator());
  return check;
}

QuotientSequenceValue cf_from_quotient_sequence(std::span<const BigInt> quotients,
                                                std::size_t digits, BigInt a0) {
  QuotientSequenceValue out;
  out.cf.a0 = std::move(a0);
  out.cf.quotients.assign(quotients.begin(), quotients.end());
  for (const auto& q : out.cf.quotients) {
    if (q < 1) throw DomainError("partial quotients must be positive");
  }
  Convergent c = final_convergent(out.cf.a0, out.cf.quotients);
  out.certified_digits = floor_log10(BigInt(c.q * c.q));
  if (c.q == 1) out.certified_digits = 0;
  out.value = BigRational(std::move(c.p), std::move(c.q));

  if (digits > out.certified_digits) {
    throw PrecisionError("requested " + std::to_string(digits) + " digits but 1/Q_n^2 certifies only " +
                         std::to_string(out.certified_digits));
  }
  const std::size_t rendered = digits == 0 ? out.certified_digits : digits;
  if (rendered > 0) out.decimal = to_decimal(out.value, rendered);
  return out;
}

QuotientSequenceValue cf_from_quotient_sequence(const SequenceSpec& spec, std::size_t count,
                                                std::size_t digits, const MersenneCatalog& catalog) {
  if (count == 0) throw DomainError("quotient sequence needs at least one term");
  const auto terms = sequence_terms(spec, count, catalog);
  return cf_from_quotient_sequence(terms, digits);
}

// ---------------------------------------------------------------------------
// Serialization

void write_cf_text(std::ostream& out, const CFExpansion& cf) {
  out << "a0=" << cf.a0.get_str() << " tail=";
  if (cf.tail == TailKind::exact) {
    out << "exact";
  } else {
    out << "truncated:" << cf.precision;
  }
  out << '\n';
  for (const auto& q : cf.quotients) out << q.get_str() << '\n';
}

CFExpansion read_cf_text(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw ConfigError("continued fraction file is empty");
  const auto a0_pos = header.find("a0=");
  const auto tail_pos = header.find(" tail=");
  if (a0_pos != 0 || tail_pos == std::string::npos) {
    throw ConfigError("continued fraction header must read 'a0=<int> tail=<exact|truncated:d>'");
  }
  CFExpansion cf;
  cf.a0 = parse_bigint(header.substr(3, tail_pos - 3));
  const std::string tail = header.substr(tail_pos + 6);
  if (tail == "exact") {
    cf.tail = TailKind::exact;
  } else if (tail.rfind("truncated:", 0) == 0) {
    cf.tail = TailKind::truncated;
    try {
      cf.precision = std::stoull(tail.substr(10));
    } catch (const std::exception&) {
      throw ConfigError("bad truncation precision in continued fraction header");
    }
  } else {
    throw ConfigError("unknown tail kind '" + tail + "'");
  }

  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    BigInt q;
    if (q.set_str(line, 10) != 0 || q < 1) {
      throw ConfigError("line " + std::to_string(line_no) + ": partial quotient must be a positive integer");
    }
    cf.quotients.push_back(std::move(q));
  }
  return cf;
}

nlohmann::json cf_to_json(const CFExpansion& cf) {
  auto entry = [](const BigInt& v) -> nlohmann::json {
    if (v.fits_slong_p()) return v.get_si();
    return v.get_str();
  };
  nlohmann::json j = nlohmann::json::array();
  j.push_back(entry(cf.a0));
  for (const auto& q : cf.quotients) j.push_back(entry(q));
  return j;
}

CFExpansion cf_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("continued fraction JSON must be a non-empty array");
  auto value = [](const nlohmann::json& e) {
    if (e.is_number_integer()) return BigInt(e.get<long>());
    if (e.is_string()) return parse_bigint(e.get<std::string>());
    throw ConfigError("continued fraction JSON entries must be integers or digit strings");
  };
  CFExpansion cf;
  cf.a0 = value(j.front());
  for (std::size_t i = 1; i < j.size(); ++i) {
    cf.quotients.push_back(value(j[i]));
    if (cf.quotients.back() < 1) throw ConfigError("partial quotients must be positive");
  }
  return cf;
}

}  // namespace cflab
