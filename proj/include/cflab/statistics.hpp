#pragma once

#include "cflab/bigint.hpp"
#include "cflab/contfrac.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cflab {

struct StatPoint {
  std::size_t n = 0;
  double value = 0.0;
  friend bool operator==(const StatPoint&, const StatPoint&) = default;
};

/// Indexed real sequence n -> value with strictly increasing n.
struct StatSeries {
  std::string statistic;
  std::string source;
  std::optional<double> reference;
  std::vector<StatPoint> points;
  /// Optional column parallel to `points`: cumulative sign changes of value - reference.
  std::vector<std::uint64_t> sign_changes;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  const StatPoint& back() const { return points.back(); }
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Header `n,value[,reference,delta][,sign_changes]`, LF line endings.
void write_csv_header(std::ostream& out, const StatSeries& series);
void write_csv_row(std::ostream& out, const StatSeries& series, std::size_t index);
void write_csv(std::ostream& out, const StatSeries& series);
nlohmann::json to_json(const StatSeries& series);

// ---------------------------------------------------------------------------
// Reference constants

struct KhinchinEstimate {
  double value = 0.0;
  double error_bound = 0.0;  // |value - K| <= error_bound
  std::size_t terms = 0;
  std::string method;
};

/// K from ln K ln 2 = sum_{n>=1} (zeta(2n) - 1)/n * (1 - 1/2 + ... + 1/(2n-1)).
/// Truncation after N terms is bounded by 4^{-N}/(N+1) in ln K ln 2; the
/// returned error_bound adds a floating-point allowance.  Accepts targets in
/// (1e-12, 1e-3): smaller ones throw PrecisionError.
KhinchinEstimate khinchin_constant(double target_error);

/// Partial product over m = 1..m_max (a lower bound of K) and the integral
/// tail bound K / partial <= exp((ln m_max + 1)/(m_max ln 2)).
KhinchinEstimate khinchin_partial_product(std::uint64_t m_max);

/// e^{pi^2 / (12 ln 2)}.
double levy_constant();

// ---------------------------------------------------------------------------
// Running statistics

/// Geometric mean of the quotients seen so far, accumulated in log domain.
class RunningGeometricMean {
 public:
  void add(const BigInt& quotient) { add_log(log_of_bigint(quotient)); }
  void add_log(long double ln_quotient) {
    log_sum_ += ln_quotient;
    ++count_;
  }
  std::size_t count() const { return count_; }
  long double log_sum() const { return log_sum_; }
  double value() const;

  void restore(std::size_t count, long double log_sum) {
    count_ = count;
    log_sum_ = log_sum;
  }

 private:
  std::size_t count_ = 0;
  long double log_sum_ = 0.0L;
};

/// Counts strict sign changes of a sequence of deltas.  Exact zeros neither
/// count nor reset the remembered sign.
class SignChangeCounter {
 public:
  /// Returns true when this delta flips the sign.
  bool update(double delta);
  std::uint64_t count() const { return count_; }
  int last_sign() const { return last_sign_; }
  void restore(std::uint64_t count, int last_sign) {
    count_ = count;
    last_sign_ = last_sign;
  }

 private:
  std::uint64_t count_ = 0;
  int last_sign_ = 0;
};

/// Tracks progressively smaller distances; the first update is always a record.
class RecordTracker {
 public:
  bool update(double distance);
  bool has_record() const { return has_record_; }
  double best() const { return best_; }
  void restore(bool has_record, double best) {
    has_record_ = has_record;
    best_ = best;
  }

 private:
  bool has_record_ = false;
  double best_ = 0.0;
};

/// K(n) = (a_1 ... a_n)^{1/n}, emitted for n divisible by stride and at the end.
StatSeries running_khinchin(const CFExpansion& cf, std::size_t stride = 1);

/// L(n) = Q_n^{1/n} = exp(ln Q_n / n), same emission rule.
StatSeries running_levy(const CFExpansion& cf, std::size_t stride = 1);

/// Cumulative strict sign changes of value - reference at each point.
StatSeries sign_changes(const StatSeries& series, double reference);

/// Indices n where |value - reference| is strictly below every earlier distance.
std::vector<std::size_t> record_indices(const StatSeries& series, double reference);

// ---------------------------------------------------------------------------
// Gauss-Kuzmin

/// log2(1 + 1/(m(m+2))).
double gauss_kuzmin_probability(std::uint64_t m);
/// Limit frequency of quotients above m_max: log2((m_max + 2)/(m_max + 1)).
double gauss_kuzmin_tail(std::uint64_t m_max);

struct GaussKuzminHistogram {
  std::uint64_t m_max = 0;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> counts;  // counts[m - 1], m = 1..m_max
  std::uint64_t overflow = 0;

  void add(const BigInt& quotient);
  double frequency(std::uint64_t m) const;
  double overflow_frequency() const;
};

GaussKuzminHistogram gauss_kuzmin_histogram(std::span<const BigInt> quotients, std::uint64_t m_max);

// ---------------------------------------------------------------------------
// Power-law fits |value - reference| ~ amplitude * n^exponent

struct PowerLawFit {
  double amplitude = 0.0;
  double exponent = 0.0;
  std::size_t points = 0;
};

/// Log-log least squares over points with n in [n_min, n_max] and a non-zero delta.
PowerLawFit power_law_fit(const StatSeries& series, double reference, std::size_t n_min,
                          std::size_t n_max);

}  // namespace cflab
