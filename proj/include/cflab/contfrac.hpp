#pragma once

#include "cflab/bigint.hpp"
#include "cflab/exact.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace cflab {

enum class TailKind { exact, truncated };

/// [a0; a1, ..., an].  Every quotient is >= 1; an exact expansion is kept in
/// canonical form (last quotient >= 2 unless n = 0).  A truncated expansion
/// is a certified prefix of some unknown real's expansion, `precision` gives
/// the decimal digits of the data it was certified from.
struct CFExpansion {
  BigInt a0;
  std::vector<BigInt> quotients;
  TailKind tail = TailKind::exact;
  std::size_t precision = 0;

  std::size_t size() const { return quotients.size(); }
  friend bool operator==(const CFExpansion&, const CFExpansion&) = default;
};

/// Rewrites [..., k, 1] as [..., k + 1]; rejects non-positive quotients.
CFExpansion canonicalize(CFExpansion cf);

/// Incremental Euclid on a rational, extracting partial quotients with
/// Lehmer's single-word acceleration (Knuth, Algorithm L): the leading 62
/// bits of both remainders are reduced in machine words, and only quotients
/// on which both bracketing word ratios agree are emitted.  A 2x2 cofactor
/// matrix then updates the big remainders in one linear pass.
class EuclidExpander {
 public:
  /// Expands num/den, den > 0.  a0 = floor(num/den) is available at once.
  EuclidExpander(const BigInt& num, const BigInt& den);

  /// Resumes from remainders (a, b) with a > b >= 0 after `emitted` quotients.
  static EuclidExpander resume(BigInt a0, BigInt a, BigInt b, std::size_t emitted);

  const BigInt& a0() const { return a0_; }
  bool done() const { return b_ == 0; }
  std::size_t emitted() const { return emitted_; }
  const BigInt& remainder_a() const { return a_; }
  const BigInt& remainder_b() const { return b_; }

  /// Appends at least one new quotient unless done(); returns the count added.
  std::size_t step(std::vector<BigInt>& out);

 private:
  EuclidExpander() = default;
  std::size_t plain_step(std::vector<BigInt>& out);
  std::size_t word_steps(std::vector<BigInt>& out);

  BigInt a0_;
  BigInt a_;
  BigInt b_;
  BigInt t0_, t1_;
  std::size_t emitted_ = 0;
};

/// Exact canonical expansion of a rational.
CFExpansion cf_expand_rational(const BigRational& r);

/// Longest prefix shared by the expansions of both endpoints; it is a prefix
/// of the expansion of every real in [low, high].  Throws DomainError when
/// not even the integer part is shared.  low == high gives the exact expansion.
CFExpansion cf_expand_certified(const BigRational& low, const BigRational& high);

/// Certified expansion of a value known to `digits` decimals, i.e. of the
/// interval [approx, approx + 10^-digits].
CFExpansion cf_expand_certified(const DecimalApprox& approx);

/// Compatibility rule: expand `approx` and keep a_n while Q_n^2 < 10^digits.
CFExpansion cf_expand_paper(const BigRational& approx, std::size_t digits);

/// Exact value of a finite expansion (balanced product of quotient matrices).
BigRational from_cf(const CFExpansion& cf);

struct Convergent {
  BigInt p;
  BigInt q;
  friend bool operator==(const Convergent&, const Convergent&) = default;
};

/// Streams (P_n, Q_n) through P_{n+1} = a_{n+1} P_n + P_{n-1}, same for Q,
/// from P_0 = a0, Q_0 = 1, P_{-1} = 1, Q_{-1} = 0.
class ConvergentStream {
 public:
  struct State {
    std::size_t n = 0;
    BigInt p_prev{1}, q_prev{0}, p{0}, q{1};
  };

  explicit ConvergentStream(const BigInt& a0);
  static ConvergentStream restore(State state);

  void push(const BigInt& quotient);

  std::size_t index() const { return s_.n; }
  const BigInt& p() const { return s_.p; }
  const BigInt& q() const { return s_.q; }
  const BigInt& p_prev() const { return s_.p_prev; }
  const BigInt& q_prev() const { return s_.q_prev; }
  Convergent current() const { return {s_.p, s_.q}; }
  const State& state() const { return s_; }

 private:
  ConvergentStream() = default;
  State s_;
  BigInt tmp_;
};

/// All convergents n = 0..size of the expansion.  Materializes every pair;
/// use ConvergentStream for long expansions.
std::vector<Convergent> convergents(const CFExpansion& cf);

/// Natural logs of the bounds 1/(Q_n (Q_n + Q_{n+1})) < |r - P_n/Q_n| < 1/(Q_n Q_{n+1}).
struct ErrorSandwich {
  long double ln_lower = 0;
  long double ln_upper = 0;
};

ErrorSandwich error_bounds(const BigInt& q_n, const BigInt& q_next);

/// Sandwich at index n of `series` (which must hold n + 1), with the actual
/// distance checked against r.  Throws DomainError when r equals P_n/Q_n.
struct ErrorBoundCheck {
  ErrorSandwich bounds;
  BigRational distance;  // |r - P_n/Q_n|
  long double ln_distance = 0;
};

ErrorBoundCheck error_bounds(const BigRational& r, std::span<const Convergent> series, std::size_t n);

/// Continued fraction built from a quotient sequence, e.g. [0; M_1, M_2, ...],
/// with the decimal value certified by |x - P_n/Q_n| < 1/Q_n^2.
struct QuotientSequenceValue {
  CFExpansion cf;
  BigRational value;                    // P_n / Q_n
  std::size_t certified_digits = 0;     // floor(log10 Q_n^2)
  std::optional<DecimalApprox> decimal; // empty when nothing is certified
};

/// `digits` = 0 renders every certified digit.  Throws PrecisionError when
/// more digits are requested than 1/Q_n^2 certifies.
QuotientSequenceValue cf_from_quotient_sequence(std::span<const BigInt> quotients,
                                                std::size_t digits = 0, BigInt a0 = 0);

QuotientSequenceValue cf_from_quotient_sequence(const SequenceSpec& spec, std::size_t count,
                                                std::size_t digits = 0,
                                                const MersenneCatalog& catalog = MersenneCatalog::builtin());

// Line format: header `a0=<int> tail=<exact|truncated:d>`, then one quotient per line.
void write_cf_text(std::ostream& out, const CFExpansion& cf);
CFExpansion read_cf_text(std::istream& in);

/// Compact form [a0, a1, ...]; word-sized entries are numbers, larger ones strings.
nlohmann::json cf_to_json(const CFExpansion& cf);
CFExpansion cf_from_json(const nlohmann::json& j);

}  // namespace cflab
