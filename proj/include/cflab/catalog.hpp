#pragma once

#include "cflab/bigint.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cflab {

/// Ordered list of Mersenne prime exponents.
///
/// Entries are strictly increasing and at least 2.  Exponents above
/// `kLastFullySearched` are flagged as lying in a range that has not been
/// exhaustively searched; the flag is metadata and never changes a result.
class MersenneCatalog {
 public:
  static constexpr std::uint64_t kLastFullySearched = 20996011;

  MersenneCatalog() = default;
  explicit MersenneCatalog(std::vector<std::uint64_t> exponents);

  /// Parses one integer per line; `#` starts a comment, commas and blanks
  /// also separate entries.  Throws ConfigError naming the offending line.
  static MersenneCatalog parse(std::string_view text);
  static MersenneCatalog load(const std::filesystem::path& path);

  /// The embedded default list (byte-identical to data/mersenne_exponents.txt).
  static const MersenneCatalog& builtin();

  std::span<const std::uint64_t> exponents() const { return exponents_; }
  std::size_t size() const { return exponents_.size(); }
  bool empty() const { return exponents_.empty(); }
  std::uint64_t operator[](std::size_t i) const { return exponents_[i]; }
  std::uint64_t max() const { return exponents_.back(); }
  bool fully_searched(std::size_t i) const { return exponents_[i] <= kLastFullySearched; }

  /// Leading `count` entries; throws DomainError if the catalog is shorter.
  MersenneCatalog prefix(std::size_t count) const;

  /// Canonical text (one exponent per line) used for checksums.
  std::string canonical_text() const;

 private:
  std::vector<std::uint64_t> exponents_;
};

std::string_view builtin_catalog_text();

/// Catalog named by the CFLAB_CATALOG environment variable, else the builtin.
MersenneCatalog load_catalog_from_environment();

/// 2^p - 1.
BigInt mersenne_number(std::uint64_t p);

struct Mod4Census {
  std::size_t one_mod_4 = 0;
  std::size_t three_mod_4 = 0;
  std::size_t other = 0;

  friend bool operator==(const Mod4Census&, const Mod4Census&) = default;
};

Mod4Census mod4_census(const MersenneCatalog& catalog);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> residuals;
};

/// Ordinary least squares y = slope * x + intercept.
LineFit least_squares_line(std::span<const double> x, std::span<const double> y);

/// Fit of ln log2(M_n + 1) = ln p_n against the 1-based index n, next to the
/// Wagstaff model line n e^{-gamma} ln 2 - ln ln 2 drawn with it.
struct WagstaffFit {
  LineFit fit;
  double model_slope = 0.0;
  double model_intercept = 0.0;
  std::vector<double> observed;  // ln p_n, n = 1..size
};

WagstaffFit wagstaff_fit(const MersenneCatalog& catalog);

/// Wagstaff heuristic: log2 log2 M_n ~ n e^{-gamma}.
double wagstaff_model(double n);

// ---------------------------------------------------------------------------
// Integer sequences whose reciprocals or values feed the constructions.

enum class SequenceKind {
  mersenne,         // 2^p - 1 over the catalog exponents
  dyadic,           // 2^p over the catalog exponents
  fibonacci_power,  // 2^{F_k}, F = 1, 2, 3, 5, 8, ...
  factorial_power,  // 2^{k!}, k = 1, 2, 3, ...
  custom,           // explicit list of big integers
};

SequenceKind parse_sequence_kind(std::string_view name);
std::string_view to_string(SequenceKind kind);

struct SequenceSpec {
  SequenceKind kind = SequenceKind::mersenne;
  /// Overrides the catalog exponents for mersenne/dyadic when non-empty.
  std::vector<std::uint64_t> exponents;
  /// Terms for SequenceKind::custom.
  std::vector<BigInt> values;
};

/// First `count` terms of the sequence; strictly increasing and >= 2.
std::vector<BigInt> sequence_terms(const SequenceSpec& spec, std::size_t count,
                                   const MersenneCatalog& catalog);

/// Number of terms the spec can supply (catalog length, list length, or a
/// size cap for the doubly exponential families).
std::size_t available_terms(const SequenceSpec& spec, const MersenneCatalog& catalog);

/// ceil(p / divisor) over `exponents`, keeping values in [2, max_exponent]
/// and dropping duplicates.  Shrinks a catalog while keeping its gap ratios,
/// which is how the dyadic contrast sum is reproduced at small digit counts.
std::vector<std::uint64_t> scaled_exponents(std::span<const std::uint64_t> exponents,
                                            std::uint64_t divisor, std::uint64_t max_exponent);

}  // namespace cflab
