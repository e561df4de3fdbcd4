#include "cflab/diagnostics.hpp"

#include "cflab/constants.hpp"
#include "cflab/error.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace cflab {

namespace {

constexpr long double kLog10Of2 = 0.301029995663981195213738894724493027L;

long double c_from_gamma(long double gamma) {
  return 1.0L / (std::exp2(std::exp(-gamma)) - 1.0L);
}

// Q_n >= 3 within the accuracy of log_of_bigint.
bool at_least_three(long double ln_q) { return ln_q >= std::log(3.0L) - 1e-15L; }

}  // namespace

WagstaffConstants WagstaffConstants::from_gamma(long double gamma) {
  WagstaffConstants k;
  k.gamma = gamma;
  k.growth = std::exp(-gamma);
  k.c = c_from_gamma(gamma);
  k.epsilon = std::exp2(k.growth) - 1.0L;
  return k;
}

WagstaffConstants WagstaffConstants::reference() {
  WagstaffConstants k = from_gamma(constants::kEulerGamma);
  k.c = 2.101893933L;  // printed value; 1/(2^{e^-0.57721566} - 1) = 2.1018939329
  return k;
}

// ---------------------------------------------------------------------------

std::vector<long double> log_denominators_exact(const CFExpansion& cf) {
  std::vector<long double> out{0.0L};
  out.reserve(cf.quotients.size() + 1);
  ConvergentStream stream(cf.a0);
  for (const auto& q : cf.quotients) {
    stream.push(q);
    out.push_back(log_of_bigint(stream.q()));
  }
  return out;
}

std::vector<long double> log_denominators_log_domain(std::span<const long double> ln_quotients) {
  std::vector<long double> out{0.0L};
  out.reserve(ln_quotients.size() + 1);
  long double prev = -std::numeric_limits<long double>::infinity();  // ln Q_{-1}
  for (const long double ln_a : ln_quotients) {
    const long double cur = out.back();
    out.push_back(ln_a + cur + std::log1p(std::exp(prev - ln_a - cur)));
    prev = cur;
  }
  return out;
}

std::vector<long double> mersenne_log_quotients(const MersenneCatalog& catalog, std::size_t count) {
  if (count > catalog.size()) throw DomainError("catalog has fewer exponents than requested");
  std::vector<long double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto p = catalog[i];
    out.push_back(static_cast<long double>(p) * constants::kLn2 +
                  std::log1p(-std::ldexp(1.0L, -static_cast<int>(std::min<std::uint64_t>(p, 20000)))));
  }
  return out;
}

std::vector<long double> log_quotients(const CFExpansion& cf) {
  std::vector<long double> out;
  out.reserve(cf.quotients.size());
  for (const auto& q : cf.quotients) out.push_back(log_of_bigint(q));
  return out;
}

// ---------------------------------------------------------------------------

StatSeries davenport_roth_stat(std::span<const long double> ln_q, std::size_t n_from) {
  if (n_from < 3) throw DomainError("Davenport-Roth statistic is defined for n >= 3");
  StatSeries s{"davenport_roth", "", std::nullopt, {}, {}};
  for (std::size_t n = n_from; n < ln_q.size(); ++n) {
    if (!at_least_three(ln_q[n])) {
      throw DomainError("Davenport-Roth statistic needs Q_n >= 3 (n = " + std::to_string(n) + ")");
    }
    const long double ln_n = std::log(static_cast<long double>(n));
    s.points.push_back({n, static_cast<double>(std::sqrt(ln_n) * std::log(ln_q[n]) / n)});
  }
  return s;
}

StatSeries adamczewski_bugeaud_stat(std::span<const long double> ln_q, std::size_t n_from) {
  if (n_from < 3) throw DomainError("Adamczewski-Bugeaud statistic is defined for n >= 3");
  StatSeries s{"adamczewski_bugeaud", "", std::nullopt, {}, {}};
  for (std::size_t n = n_from; n < ln_q.size(); ++n) {
    if (!at_least_three(ln_q[n])) {
      throw DomainError("Adamczewski-Bugeaud statistic needs Q_n >= 3 (n = " + std::to_string(n) + ")");
    }
    const long double ln_n = std::log(static_cast<long double>(n));
    const long double denom = std::pow(static_cast<long double>(n), 2.0L / 3) *
                              std::pow(ln_n, 2.0L / 3) * std::log(ln_n);
    s.points.push_back({n, static_cast<double>(std::log(ln_q[n]) / denom)});
  }
  return s;
}

KhinchinBoundCheck khinchin_B_check(std::span<const long double> ln_q, double B) {
  if (!(B > 0)) throw DomainError("Khinchin bound constant B must be positive");
  KhinchinBoundCheck out;
  out.growth.statistic = "log_q_over_n";
  for (std::size_t n = 1; n < ln_q.size(); ++n) {
    out.below.push_back(ln_q[n] < static_cast<long double>(B) * n);
    out.growth.points.push_back({n, static_cast<double>(ln_q[n] / n)});
  }
  return out;
}

long double WagstaffBoundRow::log10_q() const { return log2_q * kLog10Of2; }
long double WagstaffBoundRow::log10_bound() const { return log2_bound * kLog10Of2; }

std::vector<WagstaffBoundRow> wagstaff_lower_bound_check(std::span<const long double> ln_q,
                                                         const WagstaffConstants& k,
                                                         std::size_t n_from) {
  std::vector<WagstaffBoundRow> rows;
  for (std::size_t n = std::max<std::size_t>(n_from, 1); n < ln_q.size(); ++n) {
    WagstaffBoundRow row;
    row.n = n;
    row.log2_q = ln_q[n] / constants::kLn2;
    row.log2_bound = k.c * std::exp2(static_cast<long double>(n + 1) * k.growth);
    row.holds = row.log2_q > row.log2_bound;
    rows.push_back(row);
  }
  return rows;
}

bool wagstaff_bound_holds_exact(const BigInt& q_n, std::size_t n, const WagstaffConstants& k) {
  const long double exponent = k.c * std::exp2(static_cast<long double>(n + 1) * k.growth);
  const std::size_t bits = mpz_sizeinbase(q_n.get_mpz_t(), 2);
  if (static_cast<long double>(bits - 1) > exponent) return true;   // Q >= 2^{bits-1}
  if (static_cast<long double>(bits) <= exponent) return false;     // Q < 2^bits
  if (bits <= 63) {
    return static_cast<long double>(q_n.get_ui()) > std::exp2(exponent);
  }
  return log_of_bigint(q_n) / constants::kLn2 > exponent;
}

// ---------------------------------------------------------------------------

std::size_t delta_required_digits(const BigInt& q_n, const BigInt& q_next) {
  const BigInt scale = q_n * (q_n + q_next);
  return floor_log10(scale) + 1 + kDeltaGuardDigits;
}

DeltaResult tsr_delta(const BigRational& r, std::size_t value_digits, const Convergent& c_n,
                      const BigInt& q_next, const BigInt& a_next, std::size_t n) {
  if (c_n.q < 2) throw DomainError("delta(r; n) needs Q_n >= 2 (n = " + std::to_string(n) + ")");
  DeltaResult d;
  d.n = n;
  d.required_digits = delta_required_digits(c_n.q, q_next);
  if (value_digits != 0 && value_digits < d.required_digits) {
    throw PrecisionError("precision audit failed at n = " + std::to_string(n) + ": needs " +
                         std::to_string(d.required_digits) + " digits of r, have " +
                         std::to_string(value_digits));
  }
  const BigRational distance = (r - BigRational(c_n.p, c_n.q)).abs();
  if (distance.sign() == 0) {
    throw DomainError("r coincides with convergent " + std::to_string(n));
  }
  const long double ln_q = log_of_bigint(c_n.q);
  const long double ln_distance = log_of_bigint(distance.numerator()) - log_of_bigint(distance.denominator());
  d.delta = static_cast<double>(-ln_distance / ln_q);
  d.lower = static_cast<double>((ln_q + log_of_bigint(q_next)) / ln_q);
  d.upper = static_cast<double>((ln_q + log_of_bigint(c_n.q + q_next)) / ln_q);
  d.predicted = static_cast<double>(2.0L + log_of_bigint(a_next) / ln_q);
  const BigRational one(1, 1);
  d.bracketed = distance * BigRational(BigInt(c_n.q * q_next)) < one &&
                distance * BigRational(BigInt(c_n.q * (c_n.q + q_next))) > one;
  return d;
}

std::vector<DeltaResult> tsr_delta_series(const BigRational& r, std::size_t value_digits,
                                          const CFExpansion& cf, std::size_t n_from,
                                          std::size_t n_to) {
  if (n_from < 1 || n_from > n_to) throw DomainError("invalid delta index range");
  if (n_to + 1 > cf.quotients.size()) {
    throw DomainError("delta at n = " + std::to_string(n_to) + " needs quotient a_" +
                      std::to_string(n_to + 1));
  }
  // Audit the whole range before doing any work.
  {
    ConvergentStream stream(cf.a0);
    for (std::size_t n = 1; n <= n_to + 1; ++n) {
      BigInt q_n = stream.q();
      stream.push(cf.quotients[n - 1]);
      if (n - 1 >= n_from && n - 1 <= n_to && value_digits != 0) {
        const std::size_t need = delta_required_digits(q_n, stream.q());
        if (value_digits < need) {
          throw PrecisionError("precision audit failed at n = " + std::to_string(n - 1) +
                               ": needs " + std::to_string(need) + " digits of r, have " +
                               std::to_string(value_digits));
        }
      }
    }
  }
  std::vector<DeltaResult> out;
  ConvergentStream walk(cf.a0);
  for (std::size_t n = 0; n < n_from; ++n) walk.push(cf.quotients[n]);
  for (std::size_t n = n_from; n <= n_to; ++n) {
    const Convergent c_n = walk.current();
    const BigInt& a_next = cf.quotients[n];
    walk.push(a_next);
    out.push_back(tsr_delta(r, value_digits, c_n, walk.q(), a_next, n));
  }
  return out;
}

SondowSeries sondow_epsilon(std::span<const long double> ln_quotients,
                            std::span<const long double> ln_q) {
  if (ln_quotients.size() < 2) throw DomainError("Sondow ratio needs at least two quotients");
  SondowSeries s;
  s.ratio.statistic = "sondow_ratio";
  s.running_max.statistic = "sondow_running_max";
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < ln_quotients.size() && n < ln_q.size(); ++n) {
    if (ln_q[n] <= 0) continue;  // Q_n = 1
    const double ratio = static_cast<double>(ln_quotients[n] / ln_q[n]);
    best = std::max(best, ratio);
    s.ratio.points.push_back({n, ratio});
    s.running_max.points.push_back({n, best});
  }
  return s;
}

SondowSeries sondow_epsilon(const CFExpansion& cf) {
  return sondow_epsilon(log_quotients(cf), log_denominators_exact(cf));
}

// ---------------------------------------------------------------------------

DiagnosticReport build_diagnostic_report(const DiagnosticInput& input, const WagstaffConstants& k) {
  if (input.ln_q.size() != input.ln_quotients.size() + 1) {
    throw DomainError("diagnostic input: ln Q must have one more entry than ln a");
  }
  DiagnosticReport report;
  report.source = input.source;
  report.constants = k;
  const std::size_t last = input.ln_quotients.size();

  const auto wagstaff = wagstaff_lower_bound_check(input.ln_q, k, 1);
  double sum_delta = 0.0;
  for (std::size_t n = 1; n <= last; ++n) {
    DiagnosticRecord rec;
    rec.n = n;
    const long double ln_q = input.ln_q[n];
    rec.log10_q = static_cast<double>(ln_q / constants::kLn10);
    rec.log_q_over_n = static_cast<double>(ln_q / n);
    rec.log10_wagstaff_bound = static_cast<double>(wagstaff[n - 1].log10_bound());
    rec.wagstaff_holds = wagstaff[n - 1].holds;
    if (n >= 3 && at_least_three(ln_q)) {
      const long double ln_n = std::log(static_cast<long double>(n));
      rec.davenport_roth = static_cast<double>(std::sqrt(ln_n) * std::log(ln_q) / n);
      rec.adamczewski_bugeaud = static_cast<double>(
          std::log(ln_q) / (std::pow(static_cast<long double>(n), 2.0L / 3) *
                            std::pow(ln_n, 2.0L / 3) * std::log(ln_n)));
      report.max_davenport_roth = std::max(report.max_davenport_roth, *rec.davenport_roth);
      report.max_adamczewski_bugeaud = std::max(report.max_adamczewski_bugeaud, *rec.adamczewski_bugeaud);
    }
    if (n < last && ln_q > 0) {
      rec.sondow_ratio = static_cast<double>(input.ln_quotients[n] / ln_q);
      report.max_sondow_ratio = std::max(report.max_sondow_ratio, *rec.sondow_ratio);
    }
    for (const auto& d : input.deltas) {
      if (d.n == n) {
        rec.delta = d;
        sum_delta += d.delta;
        if (report.delta_count == 0) report.delta_n_from = n;
        report.delta_n_to = n;
        ++report.delta_count;
      }
    }
    report.records.push_back(std::move(rec));
  }
  if (report.delta_count > 0) report.mean_delta = sum_delta / static_cast<double>(report.delta_count);
  return report;
}

namespace {

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
std::string optional_csv(const std::optional<T>& v) {
  if (!v) return "";
  if constexpr (std::is_same_v<T, bool>) {
    return *v ? "true" : "false";
  } else {
    return format_double(*v);
  }
}

}  // namespace

nlohmann::json to_json(const DiagnosticReport& report) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : report.records) {
    nlohmann::json j{{"n", r.n},
                     {"log10_q", r.log10_q},
                     {"davenport_roth", optional_json(r.davenport_roth)},
                     {"adamczewski_bugeaud", optional_json(r.adamczewski_bugeaud)},
                     {"log_q_over_n", optional_json(r.log_q_over_n)},
                     {"log10_wagstaff_bound", optional_json(r.log10_wagstaff_bound)},
                     {"wagstaff_holds", optional_json(r.wagstaff_holds)},
                     {"sondow_ratio", optional_json(r.sondow_ratio)}};
    if (r.delta) {
      j["delta"] = {{"value", r.delta->delta},
                    {"lower", r.delta->lower},
                    {"upper", r.delta->upper},
                    {"predicted", r.delta->predicted},
                    {"required_digits", r.delta->required_digits},
                    {"bracketed", r.delta->bracketed}};
    } else {
      j["delta"] = nullptr;
    }
    records.push_back(std::move(j));
  }
  const auto& k = report.constants;
  return {{"source", report.source},
          {"constants",
           {{"gamma", static_cast<double>(k.gamma)},
            {"growth", static_cast<double>(k.growth)},
            {"c", static_cast<double>(k.c)},
            {"epsilon", static_cast<double>(k.epsilon)}}},
          {"summary",
           {{"max_davenport_roth", report.max_davenport_roth},
            {"max_adamczewski_bugeaud", report.max_adamczewski_bugeaud},
            {"max_sondow_ratio", report.max_sondow_ratio},
            {"mean_delta", optional_json(report.mean_delta)},
            {"delta_count", report.delta_count},
            {"delta_n_from", report.delta_n_from},
            {"delta_n_to", report.delta_n_to},
            {"disclaimer", DiagnosticReport::kDisclaimer}}},
          {"records", records}};
}

void write_csv(std::ostream& out, const DiagnosticReport& report) {
  out << "n,log10_q,davenport_roth,adamczewski_bugeaud,log_q_over_n,log10_wagstaff_bound,"
         "wagstaff_holds,sondow_ratio,delta,delta_lower,delta_upper,delta_predicted,delta_bracketed\n";
  for (const auto& r : report.records) {
    out << r.n << ',' << format_double(r.log10_q) << ',' << optional_csv(r.davenport_roth) << ','
        << optional_csv(r.adamczewski_bugeaud) << ',' << optional_csv(r.log_q_over_n) << ','
        << optional_csv(r.log10_wagstaff_bound) << ',' << optional_csv(r.wagstaff_holds) << ','
        << optional_csv(r.sondow_ratio);
    if (r.delta) {
      out << ',' << format_double(r.delta->delta) << ',' << format_double(r.delta->lower) << ','
          << format_double(r.delta->upper) << ',' << format_double(r.delta->predicted) << ','
          << (r.delta->bracketed ? "true" : "false");
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
}

void write_summary(std::ostream& out, const DiagnosticReport& report) {
  const auto& k = report.constants;
  out << "source: " << report.source << '\n';
  out << "n range: 1.." << report.records.size() << '\n';
  out << "max davenport-roth: " << format_double(report.max_davenport_roth) << '\n';
  out << "max adamczewski-bugeaud: " << format_double(report.max_adamczewski_bugeaud) << '\n';
  out << "max sondow ratio: " << format_double(report.max_sondow_ratio) << '\n';
  if (report.mean_delta) {
    out << "mean delta: " << format_double(*report.mean_delta) << " over " << report.delta_count
        << " values, n = " << report.delta_n_from << ".." << report.delta_n_to << '\n';
  }
  out << "gamma: " << format_double(static_cast<double>(k.gamma)) << '\n';
  out << "c: " << format_double(static_cast<double>(k.c)) << '\n';
  out << "2^{e^-gamma} - 1: " << format_double(static_cast<double>(k.epsilon)) << '\n';
  out << "note: " << DiagnosticReport::kDisclaimer << '\n';
}

}  // namespace cflab
