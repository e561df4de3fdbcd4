#include "cflab/statistics.hpp"

#include "cflab/catalog.hpp"
#include "cflab/constants.hpp"
#include "cflab/error.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace cflab {

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("cannot format floating-point value");
  return {buf, ptr};
}

void write_csv_header(std::ostream& out, const StatSeries& series) {
  out << "n,value";
  if (series.reference) out << ",reference,delta";
  if (!series.sign_changes.empty()) out << ",sign_changes";
  out << '\n';
}

void write_csv_row(std::ostream& out, const StatSeries& series, std::size_t index) {
  const StatPoint& p = series.points[index];
  out << p.n << ',' << format_double(p.value);
  if (series.reference) {
    out << ',' << format_double(*series.reference) << ','
        << format_double(p.value - *series.reference);
  }
  if (!series.sign_changes.empty()) out << ',' << series.sign_changes[index];
  out << '\n';
}

void write_csv(std::ostream& out, const StatSeries& series) {
  write_csv_header(out, series);
  for (std::size_t i = 0; i < series.points.size(); ++i) write_csv_row(out, series, i);
}

nlohmann::json to_json(const StatSeries& series) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    nlohmann::json row{{"n", series.points[i].n}, {"value", series.points[i].value}};
    if (series.reference) row["delta"] = series.points[i].value - *series.reference;
    if (!series.sign_changes.empty()) row["sign_changes"] = series.sign_changes[i];
    rows.push_back(std::move(row));
  }
  nlohmann::json j{{"statistic", series.statistic}, {"source", series.source}, {"rows", rows}};
  j["reference"] = series.reference ? nlohmann::json(*series.reference) : nlohmann::json(nullptr);
  return j;
}

// ---------------------------------------------------------------------------

namespace {

// zeta(s) - 1 for even s >= 4: direct sum to N - 1 plus Euler-Maclaurin for
// the tail sum_{k >= N} k^{-s}.  Remainder is far below long double epsilon.
long double zeta_minus_one(unsigned s) {
  constexpr unsigned kCut = 64;
  long double sum = 0.0L;
  for (unsigned k = kCut - 1; k >= 2; --k) sum += std::pow(static_cast<long double>(k), -static_cast<long double>(s));
  const long double n = kCut;
  const long double ls = s;
  const long double ns = std::pow(n, -ls);
  const long double tail = n * ns / (ls - 1) + ns / 2 + ls * ns / (12 * n) -
                           ls * (ls + 1) * (ls + 2) * ns / (720 * n * n * n);
  return sum + tail;
}

}  // namespace

KhinchinEstimate khinchin_constant(double target_error) {
  if (!(target_error > 0.0) || target_error >= 1e-3) {
    throw DomainError("Khinchin target error must lie in (1e-12, 1e-3)");
  }
  if (target_error <= 1e-12) {
    throw PrecisionError("Khinchin target error below 1e-12 is out of reach in double precision");
  }
  // Floating-point allowance for ~50 terms of long double arithmetic.
  constexpr double kRounding = 1e-14;

  long double series = 0.0L;  // ln K * ln 2
  long double alternating = 0.0L;
  std::size_t terms = 0;
  double truncation = 1.0;
  for (unsigned n = 1;; ++n) {
    alternating += 1.0L / (2 * n - 1);
    if (n > 1) alternating -= 1.0L / (2 * n - 2);
    const long double zm1 = n == 1 ? constants::kPi * constants::kPi / 6 - 1 : zeta_minus_one(2 * n);
    series += zm1 / n * alternating;
    terms = n;
    // |remaining series| <= 4^{-n} / (n + 1); translate to K via K (e^t - 1).
    const double t = std::ldexp(1.0, -2 * static_cast<int>(n)) / (n + 1) / static_cast<double>(constants::kLn2);
    truncation = 2.7 * std::expm1(t);
    if (truncation + kRounding <= target_error / 2) break;
  }
  KhinchinEstimate est;
  est.value = static_cast<double>(std::exp(series / constants::kLn2));
  est.error_bound = truncation + kRounding;
  est.terms = terms;
  est.method = "zeta-series";
  return est;
}

KhinchinEstimate khinchin_partial_product(std::uint64_t m_max) {
  if (m_max < 1) throw DomainError("partial product needs m_max >= 1");
  long double log_product = 0.0L;
  for (std::uint64_t m = 2; m <= m_max; ++m) {
    const long double lm = static_cast<long double>(m);
    log_product += std::log2(lm) * std::log1p(1.0L / (lm * (lm + 2)));
  }
  const long double lm = static_cast<long double>(m_max);
  const long double tail = (std::log(lm) + 1) / (lm * constants::kLn2);
  KhinchinEstimate est;
  est.value = static_cast<double>(std::exp(log_product));
  est.error_bound = static_cast<double>(std::exp(log_product) * std::expm1(tail));
  est.terms = m_max;
  est.method = "direct-product";
  return est;
}

double levy_constant() {
  return static_cast<double>(std::exp(constants::kPi * constants::kPi / (12 * constants::kLn2)));
}

// ---------------------------------------------------------------------------

double RunningGeometricMean::value() const {
  if (count_ == 0) throw DomainError("geometric mean of no quotients");
  return static_cast<double>(std::exp(log_sum_ / static_cast<long double>(count_)));
}

bool SignChangeCounter::update(double delta) {
  const int sign = delta > 0 ? 1 : (delta < 0 ? -1 : 0);
  if (sign == 0) return false;
  const bool flipped = last_sign_ != 0 && sign != last_sign_;
  if (flipped) ++count_;
  last_sign_ = sign;
  return flipped;
}

bool RecordTracker::update(double distance) {
  if (!has_record_ || distance < best_) {
    has_record_ = true;
    best_ = distance;
    return true;
  }
  return false;
}

namespace {

bool emit_point(std::size_t n, std::size_t last, std::size_t stride) {
  return n % stride == 0 || n == last;
}

}  // namespace

StatSeries running_khinchin(const CFExpansion& cf, std::size_t stride) {
  if (stride == 0) throw DomainError("stride must be at least 1");
  if (cf.quotients.empty()) throw DomainError("running Khinchin mean needs at least one quotient");
  StatSeries series{"khinchin", "", constants::kKhinchin, {}, {}};
  RunningGeometricMean mean;
  const std::size_t last = cf.quotients.size();
  for (std::size_t n = 1; n <= last; ++n) {
    mean.add(cf.quotients[n - 1]);
    if (emit_point(n, last, stride)) series.points.push_back({n, mean.value()});
  }
  return series;
}

StatSeries running_levy(const CFExpansion& cf, std::size_t stride) {
  if (stride == 0) throw DomainError("stride must be at least 1");
  if (cf.quotients.empty()) throw DomainError("running Levy root needs at least one quotient");
  StatSeries series{"levy", "", constants::kLevy, {}, {}};
  ConvergentStream stream(cf.a0);
  const std::size_t last = cf.quotients.size();
  for (std::size_t n = 1; n <= last; ++n) {
    stream.push(cf.quotients[n - 1]);
    if (emit_point(n, last, stride)) {
      const long double ln_q = log_of_bigint(stream.q());
      series.points.push_back({n, static_cast<double>(std::exp(ln_q / static_cast<long double>(n)))});
    }
  }
  return series;
}

StatSeries sign_changes(const StatSeries& series, double reference) {
  if (series.empty()) throw DomainError("sign changes of an empty series");
  StatSeries out{series.statistic + "_signs", series.source, std::nullopt, {}, {}};
  SignChangeCounter counter;
  for (const auto& p : series.points) {
    counter.update(p.value - reference);
    out.points.push_back({p.n, static_cast<double>(counter.count())});
  }
  return out;
}

std::vector<std::size_t> record_indices(const StatSeries& series, double reference) {
  if (series.empty()) throw DomainError("records of an empty series");
  std::vector<std::size_t> records;
  RecordTracker tracker;
  for (const auto& p : series.points) {
    if (tracker.update(std::abs(p.value - reference))) records.push_back(p.n);
  }
  return records;
}

// ---------------------------------------------------------------------------

double gauss_kuzmin_probability(std::uint64_t m) {
  if (m == 0) throw DomainError("Gauss-Kuzmin probability is defined for m >= 1");
  const long double lm = static_cast<long double>(m);
  return static_cast<double>(std::log1p(1.0L / (lm * (lm + 2))) / constants::kLn2);
}

double gauss_kuzmin_tail(std::uint64_t m_max) {
  const long double lm = static_cast<long double>(m_max);
  return static_cast<double>(std::log1p(1.0L / (lm + 1)) / constants::kLn2);
}

void GaussKuzminHistogram::add(const BigInt& quotient) {
  ++total;
  if (quotient.fits_ulong_p()) {
    const unsigned long m = quotient.get_ui();
    if (m >= 1 && m <= m_max) {
      ++counts[m - 1];
      return;
    }
  }
  ++overflow;
}

double GaussKuzminHistogram::frequency(std::uint64_t m) const {
  if (m == 0 || m > m_max) throw DomainError("histogram bucket out of range");
  return total == 0 ? 0.0 : static_cast<double>(counts[m - 1]) / static_cast<double>(total);
}

double GaussKuzminHistogram::overflow_frequency() const {
  return total == 0 ? 0.0 : static_cast<double>(overflow) / static_cast<double>(total);
}

GaussKuzminHistogram gauss_kuzmin_histogram(std::span<const BigInt> quotients, std::uint64_t m_max) {
  if (m_max < 1) throw DomainError("histogram needs m_max >= 1");
  GaussKuzminHistogram h;
  h.m_max = m_max;
  h.counts.assign(m_max, 0);
  for (const auto& q : quotients) h.add(q);
  return h;
}

PowerLawFit power_law_fit(const StatSeries& series, double reference, std::size_t n_min,
                          std::size_t n_max) {
  std::vector<double> x, y;
  for (const auto& p : series.points) {
    if (p.n < n_min || p.n > n_max) continue;
    const double delta = std::abs(p.value - reference);
    if (delta == 0.0 || !std::isfinite(delta)) continue;
    x.push_back(std::log(static_cast<double>(p.n)));
    y.push_back(std::log(delta));
  }
  if (x.size() < 2) throw DomainError("power-law fit needs at least two usable points");
  const LineFit fit = least_squares_line(x, y);
  return {std::exp(fit.intercept), fit.slope, x.size()};
}

}  // namespace cflab
