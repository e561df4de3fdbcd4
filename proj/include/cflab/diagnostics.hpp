#pragma once

#include "cflab/catalog.hpp"
#include "cflab/contfrac.hpp"
#include "cflab/exact.hpp"
#include "cflab/statistics.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace cflab {

/// Constants of the doubly exponential growth model Q_n > 2^{c 2^{(n+1) growth}}.
struct WagstaffConstants {
  long double gamma = 0;    // Euler-Mascheroni value used for `growth`
  long double growth = 0;   // e^{-gamma}
  long double c = 0;        // 1/(2^{e^{-gamma_c}} - 1)
  long double epsilon = 0;  // 2^{growth} - 1, the predicted Sondow exponent

  /// Everything from the full-precision gamma.
  static WagstaffConstants from_gamma(long double gamma);
  /// Reference parametrisation: c = 2.101893933 as a fixed literal (full gamma
  /// gives 2.1018939453), the exponent growth from full-precision gamma.
  static WagstaffConstants reference();
};

// ---------------------------------------------------------------------------
// ln Q_n sequences, indexed by n = 0..N (ln Q_0 = 0).

/// Exact: runs the convergent recurrence on big integers.
std::vector<long double> log_denominators_exact(const CFExpansion& cf);

/// Log domain: ln Q_{n+1} = ln a_{n+1} + ln Q_n + ln(1 + Q_{n-1}/(a_{n+1} Q_n)),
/// never forming Q_n.  Input is ln a_1..ln a_N.
std::vector<long double> log_denominators_log_domain(std::span<const long double> ln_quotients);

/// ln(2^p - 1) for the first `count` catalog exponents.
std::vector<long double> mersenne_log_quotients(const MersenneCatalog& catalog, std::size_t count);

std::vector<long double> log_quotients(const CFExpansion& cf);

// ---------------------------------------------------------------------------
// Per-n statistics.  All take ln Q_n indexed from 0 and use natural logs.

/// sqrt(ln n) ln ln Q_n / n for n >= n_from (>= 3).  Throws DomainError when Q_n < 3.
StatSeries davenport_roth_stat(std::span<const long double> ln_q, std::size_t n_from = 3);

/// ln ln Q_n / (n^{2/3} (ln n)^{2/3} ln ln n) for n >= n_from (>= 3).
StatSeries adamczewski_bugeaud_stat(std::span<const long double> ln_q, std::size_t n_from = 3);

struct KhinchinBoundCheck {
  std::vector<bool> below;  // below[n-1]: Q_n < e^{B n}
  StatSeries growth;        // (ln Q_n)/n
};

KhinchinBoundCheck khinchin_B_check(std::span<const long double> ln_q, double B);

struct WagstaffBoundRow {
  std::size_t n = 0;
  long double log2_q = 0;
  long double log2_bound = 0;  // c 2^{(n+1) growth}
  bool holds = false;          // Q_n > bound

  long double log10_q() const;
  long double log10_bound() const;
};

std::vector<WagstaffBoundRow> wagstaff_lower_bound_check(std::span<const long double> ln_q,
                                                         const WagstaffConstants& k,
                                                         std::size_t n_from = 3);

/// Exact comparison for small n: Q_n > 2^{c 2^{(n+1) growth}} via bit lengths
/// and a double-checked log when the bit lengths are close.
bool wagstaff_bound_holds_exact(const BigInt& q_n, std::size_t n, const WagstaffConstants& k);

// ---------------------------------------------------------------------------
// Thue-Siegel-Roth exponent delta(r; n) = -ln|r - P_n/Q_n| / ln Q_n

struct DeltaResult {
  std::size_t n = 0;
  double delta = 0;
  double lower = 0;      // ln(Q_n Q_{n+1}) / ln Q_n
  double upper = 0;      // ln(Q_n (Q_n + Q_{n+1})) / ln Q_n
  double predicted = 0;  // 2 + ln a_{n+1} / ln Q_n
  std::size_t required_digits = 0;
  // lower < delta < upper decided on exact rationals; the doubles above can
  // coincide once a_{n+1} a_{n+2} exceeds 2^53.
  bool bracketed = false;
};

/// Digits of r needed to resolve |r - P_n/Q_n|: ceil(log10(Q_n (Q_n + Q_{n+1}))) + guard.
std::size_t delta_required_digits(const BigInt& q_n, const BigInt& q_next);

inline constexpr std::size_t kDeltaGuardDigits = 10;

/// `value_digits` is the number of correct decimals of r (0 for exact r).
/// Throws PrecisionError when r is too coarse for index n and DomainError when
/// r coincides with the convergent.
DeltaResult tsr_delta(const BigRational& r, std::size_t value_digits, const Convergent& c_n,
                      const BigInt& q_next, const BigInt& a_next, std::size_t n);

/// Convenience over a CF: uses convergents n and n + 1 of `cf`.
std::vector<DeltaResult> tsr_delta_series(const BigRational& r, std::size_t value_digits,
                                          const CFExpansion& cf, std::size_t n_from,
                                          std::size_t n_to);

/// ln a_{n+1} / ln Q_n for n >= 1 plus its running maximum.
struct SondowSeries {
  StatSeries ratio;
  StatSeries running_max;
};

SondowSeries sondow_epsilon(const CFExpansion& cf);
SondowSeries sondow_epsilon(std::span<const long double> ln_quotients,
                            std::span<const long double> ln_q);

// ---------------------------------------------------------------------------

struct DiagnosticRecord {
  std::size_t n = 0;
  double log10_q = 0;
  std::optional<double> davenport_roth;
  std::optional<double> adamczewski_bugeaud;
  std::optional<double> log_q_over_n;
  std::optional<double> log10_wagstaff_bound;
  std::optional<bool> wagstaff_holds;
  std::optional<double> sondow_ratio;
  std::optional<DeltaResult> delta;
};

struct DiagnosticReport {
  std::string source;
  WagstaffConstants constants;
  std::vector<DiagnosticRecord> records;  // contiguous in n
  double max_davenport_roth = 0;
  double max_adamczewski_bugeaud = 0;
  double max_sondow_ratio = 0;
  std::optional<double> mean_delta;
  std::size_t delta_count = 0;
  std::size_t delta_n_from = 0;
  std::size_t delta_n_to = 0;
  static constexpr const char* kDisclaimer =
      "running maxima over a finite range exhibit growth; they do not prove a limsup";
};

struct DiagnosticInput {
  std::string source;
  std::vector<long double> ln_quotients;  // ln a_1..ln a_N
  std::vector<long double> ln_q;          // ln Q_0..ln Q_N
  std::vector<DeltaResult> deltas;        // optional, any subset of n
};

DiagnosticReport build_diagnostic_report(const DiagnosticInput& input, const WagstaffConstants& k);

nlohmann::json to_json(const DiagnosticReport& report);
void write_csv(std::ostream& out, const DiagnosticReport& report);
/// Running maxima and the constants gamma, c and 2^{e^-gamma} - 1.
void write_summary(std::ostream& out, const DiagnosticReport& report);

}  // namespace cflab
