#pragma once

#include "cflab/bigint.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cflab {

/// Line-oriented checkpoint:
///
///   cflab-checkpoint 1
///   kind <kind>
///   <key> <value>
///   ...
///   digest <sha256 of every preceding byte>
///
/// Big integers are stored in hex, floating values as hex floats, so a
/// restored run continues bit-for-bit.
class Checkpoint {
 public:
  static constexpr int kFormatVersion = 1;

  Checkpoint() = default;
  explicit Checkpoint(std::string kind) : kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

  void set(std::string_view key, std::string_view value);
  void set_uint(std::string_view key, std::uint64_t value);
  void set_int(std::string_view key, std::int64_t value);
  void set_bigint(std::string_view key, const BigInt& value);
  void set_real(std::string_view key, long double value);

  bool has(std::string_view key) const;
  const std::string& get(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  BigInt get_bigint(std::string_view key) const;
  long double get_real(std::string_view key) const;

  std::string serialize() const;
  static Checkpoint parse(std::string_view text);

  /// Writes to a temporary sibling and renames it into place.
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

 private:
  std::string kind_;
  std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace cflab
