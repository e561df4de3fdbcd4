#pragma once

#include "cflab/catalog.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cflab {

inline constexpr std::string_view kVersion = "0.3.0";

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
/// Writes bytes verbatim (binary mode, so LF stays LF).
void write_text_file(const std::filesystem::path& path, std::string_view content);

enum class ExpansionMode { exact, certified, paper };

ExpansionMode parse_expansion_mode(std::string_view name);
std::string_view to_string(ExpansionMode mode);

/// Everything a run needs.  Filled from an optional JSON config file, then
/// overridden by command-line flags.
struct RunConfig {
  std::string command;
  std::string preset;

  SequenceSpec sequence;
  std::optional<std::size_t> terms;
  std::optional<std::size_t> precision;  // decimal digits d
  ExpansionMode mode = ExpansionMode::exact;
  bool exact_decimal = false;  // sum: full terminating expansion

  std::vector<std::string> statistics;  // stats: khinchin, levy, signs, records, kuzmin, digits
  std::size_t stride = 1;
  std::uint64_t kuzmin_max = 20;

  std::string rational;         // explicit input "p/q"
  std::filesystem::path cf_file;     // input CF text file
  std::filesystem::path value_file;  // diagnostics: decimal value of r
  std::filesystem::path decimal_file;  // stats digits: decimal to census

  bool log_domain = false;
  bool summary = false;
  std::optional<std::size_t> delta_from;
  std::optional<std::size_t> delta_to;

  std::filesystem::path out;
  std::string name = "run";
  std::size_t checkpoint_interval = 10000;
  std::optional<std::size_t> stop_after;

  /// Applies preset defaults to fields the user left unset.
  void apply_preset();
  /// Throws ConfigError when an invariant is violated.
  void validate(const MersenneCatalog& catalog) const;
};

/// Recognised keys mirror the long command-line options.
RunConfig load_run_config(const std::filesystem::path& path);
void merge_config_json(RunConfig& config, const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);

/// manifest.json next to the outputs: config echo, version, catalog digest,
/// wall time, and one sha256 per output file.
class RunManifest {
 public:
  RunManifest(const RunConfig& config, const MersenneCatalog& catalog);

  void add_output(const std::filesystem::path& file);
  const std::map<std::string, std::string>& outputs() const { return outputs_; }
  nlohmann::json to_json(double wall_time_seconds) const;
  void write(const std::filesystem::path& dir, double wall_time_seconds) const;

 private:
  nlohmann::json config_;
  std::string catalog_sha256_;
  std::map<std::string, std::string> outputs_;
};

}  // namespace cflab
