#include "cflab/catalog.hpp"

#include "cflab/constants.hpp"
#include "cflab/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cflab {

namespace {

// Exponents of the doubly exponential families are capped so a single term
// stays below 2^30 bits (128 MiB).
constexpr std::uint64_t kMaxTermExponent = std::uint64_t{1} << 30;

void validate(const std::vector<std::uint64_t>& exponents) {
  for (std::size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 2) {
      throw ConfigError("catalog entry " + std::to_string(i + 1) + " is below 2");
    }
    if (i > 0 && exponents[i] <= exponents[i - 1]) {
      throw ConfigError("catalog entry " + std::to_string(i + 1) + " (" +
                        std::to_string(exponents[i]) + ") is not greater than its predecessor");
    }
  }
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::uint64_t> fibonacci_exponents(std::size_t count) {
  std::vector<std::uint64_t> out;
  std::uint64_t a = 1, b = 2;
  while (out.size() < count && a <= kMaxTermExponent) {
    out.push_back(a);
    const std::uint64_t next = a + b;
    a = b;
    b = next;
  }
  return out;
}

std::vector<std::uint64_t> factorial_exponents(std::size_t count) {
  std::vector<std::uint64_t> out;
  std::uint64_t f = 1;
  for (std::uint64_t k = 1; out.size() < count; ++k) {
    f *= k;
    if (f > kMaxTermExponent) break;
    out.push_back(f);
  }
  return out;
}

}  // namespace

MersenneCatalog::MersenneCatalog(std::vector<std::uint64_t> exponents)
    : exponents_(std::move(exponents)) {
  validate(exponents_);
}

MersenneCatalog MersenneCatalog::parse(std::string_view text) {
  std::vector<std::uint64_t> exponents;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    while (!line.empty()) {
      const auto sep = line.find_first_of(", \t");
      const std::string_view token = trim(line.substr(0, sep));
      line = sep == std::string_view::npos ? std::string_view{} : line.substr(sep + 1);
      if (token.empty()) continue;

      std::uint64_t value = 0;
      const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ConfigError("catalog line " + std::to_string(line_no) + ": '" + std::string(token) +
                          "' is not a non-negative integer");
      }
      if (value < 2) {
        throw ConfigError("catalog line " + std::to_string(line_no) + ": exponent " +
                          std::to_string(value) + " is below 2");
      }
      if (!exponents.empty() && value == exponents.back()) {
        throw ConfigError("catalog line " + std::to_string(line_no) + ": duplicate exponent " +
                          std::to_string(value));
      }
      if (!exponents.empty() && value < exponents.back()) {
        throw ConfigError("catalog line " + std::to_string(line_no) + ": exponent " +
                          std::to_string(value) + " is non-increasing after " +
                          std::to_string(exponents.back()));
      }
      exponents.push_back(value);
    }
  }
  return MersenneCatalog(std::move(exponents));
}

MersenneCatalog MersenneCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open catalog file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

const MersenneCatalog& MersenneCatalog::builtin() {
  static const MersenneCatalog catalog = parse(builtin_catalog_text());
  return catalog;
}

MersenneCatalog MersenneCatalog::prefix(std::size_t count) const {
  if (count > exponents_.size()) {
    throw DomainError("requested " + std::to_string(count) + " exponents but the catalog has " +
                      std::to_string(exponents_.size()));
  }
  return MersenneCatalog({exponents_.begin(), exponents_.begin() + count});
}

std::string MersenneCatalog::canonical_text() const {
  std::string out;
  for (const auto p : exponents_) {
    out += std::to_string(p);
    out += '\n';
  }
  return out;
}

MersenneCatalog load_catalog_from_environment() {
  if (const char* path = std::getenv("CFLAB_CATALOG"); path != nullptr && *path != '\0') {
    return MersenneCatalog::load(path);
  }
  return MersenneCatalog::builtin();
}

BigInt mersenne_number(std::uint64_t p) {
  if (p < 2) throw DomainError("Mersenne exponent must be at least 2");
  BigInt m = pow2(p);
  m -= 1;
  return m;
}

Mod4Census mod4_census(const MersenneCatalog& catalog) {
  Mod4Census census;
  for (const auto p : catalog.exponents()) {
    switch (p % 4) {
      case 1: ++census.one_mod_4; break;
      case 3: ++census.three_mod_4; break;
      default: ++census.other; break;
    }
  }
  return census;
}

LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DomainError("least squares: x and y differ in length");
  if (x.size() < 2) throw DomainError("least squares: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mean_x = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0.0) throw DomainError("least squares: degenerate abscissae");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  fit.residuals.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    fit.residuals.push_back(y[i] - (fit.slope * x[i] + fit.intercept));
  }
  return fit;
}

WagstaffFit wagstaff_fit(const MersenneCatalog& catalog) {
  if (catalog.size() < 2) throw DomainError("Wagstaff fit needs at least two exponents");
  WagstaffFit result;
  std::vector<double> index;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    index.push_back(static_cast<double>(i + 1));
    // log2(M_n + 1) is exactly p_n.
    result.observed.push_back(std::log(static_cast<double>(catalog[i])));
  }
  result.fit = least_squares_line(index, result.observed);
  const long double growth = std::exp(-constants::kEulerGamma);
  result.model_slope = static_cast<double>(growth * constants::kLn2);
  result.model_intercept = static_cast<double>(-std::log(constants::kLn2));
  return result;
}

double wagstaff_model(double n) {
  return n * static_cast<double>(std::exp(-constants::kEulerGamma));
}

SequenceKind parse_sequence_kind(std::string_view name) {
  if (name == "mersenne") return SequenceKind::mersenne;
  if (name == "dyadic") return SequenceKind::dyadic;
  if (name == "fibonacci-power" || name == "fibonacci") return SequenceKind::fibonacci_power;
  if (name == "factorial-power" || name == "factorial") return SequenceKind::factorial_power;
  if (name == "custom") return SequenceKind::custom;
  throw ConfigError("unknown sequence kind '" + std::string(name) + "'");
}

std::string_view to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::mersenne: return "mersenne";
    case SequenceKind::dyadic: return "dyadic";
    case SequenceKind::fibonacci_power: return "fibonacci-power";
    case SequenceKind::factorial_power: return "factorial-power";
    case SequenceKind::custom: return "custom";
  }
  return "unknown";
}

std::size_t available_terms(const SequenceSpec& spec, const MersenneCatalog& catalog) {
  switch (spec.kind) {
    case SequenceKind::mersenne:
    case SequenceKind::dyadic:
      return spec.exponents.empty() ? catalog.size() : spec.exponents.size();
    case SequenceKind::fibonacci_power: return fibonacci_exponents(SIZE_MAX).size();
    case SequenceKind::factorial_power: return factorial_exponents(SIZE_MAX).size();
    case SequenceKind::custom: return spec.values.size();
  }
  return 0;
}

std::vector<BigInt> sequence_terms(const SequenceSpec& spec, std::size_t count,
                                   const MersenneCatalog& catalog) {
  const std::size_t available = available_terms(spec, catalog);
  if (count > available) {
    throw DomainError("sequence '" + std::string(to_string(spec.kind)) + "' supplies " +
                      std::to_string(available) + " terms, " + std::to_string(count) +
                      " requested");
  }

  std::vector<BigInt> terms;
  terms.reserve(count);
  switch (spec.kind) {
    case SequenceKind::mersenne:
    case SequenceKind::dyadic: {
      if (!spec.exponents.empty()) validate(spec.exponents);
      const auto exps = spec.exponents.empty() ? catalog.exponents()
                                               : std::span<const std::uint64_t>(spec.exponents);
      for (std::size_t i = 0; i < count; ++i) {
        terms.push_back(spec.kind == SequenceKind::mersenne ? mersenne_number(exps[i])
                                                            : pow2(exps[i]));
      }
      break;
    }
    case SequenceKind::fibonacci_power:
      for (const auto e : fibonacci_exponents(count)) terms.push_back(pow2(e));
      break;
    case SequenceKind::factorial_power:
      for (const auto e : factorial_exponents(count)) terms.push_back(pow2(e));
      break;
    case SequenceKind::custom:
      for (std::size_t i = 0; i < count; ++i) {
        if (spec.values[i] < 2 || (i > 0 && spec.values[i] <= spec.values[i - 1])) {
          throw DomainError("custom sequence must be strictly increasing and >= 2 (term " +
                            std::to_string(i + 1) + ")");
        }
        terms.push_back(spec.values[i]);
      }
      break;
  }
  return terms;
}

std::vector<std::uint64_t> scaled_exponents(std::span<const std::uint64_t> exponents,
                                            std::uint64_t divisor, std::uint64_t max_exponent) {
  if (divisor == 0) throw DomainError("scale divisor must be positive");
  std::vector<std::uint64_t> out;
  for (const auto p : exponents) {
    const std::uint64_t scaled = (p + divisor - 1) / divisor;
    if (scaled < 2 || scaled > max_exponent) continue;
    if (!out.empty() && scaled <= out.back()) continue;
    out.push_back(scaled);
  }
  return out;
}

}  // namespace cflab
