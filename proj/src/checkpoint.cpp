#include "cflab/checkpoint.hpp"

#include "cflab/error.hpp"
#include "cflab/io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cflab {

namespace {

constexpr std::string_view kMagic = "cflab-checkpoint";

void check_token(std::string_view s, std::string_view what) {
  if (s.empty() || s.find_first_of(" \n\r") != std::string_view::npos) {
    throw CheckpointError(std::string(what) + " must be a non-empty token without spaces");
  }
}

}  // namespace

void Checkpoint::set(std::string_view key, std::string_view value) {
  check_token(key, "checkpoint key");
  if (value.find_first_of("\n\r") != std::string_view::npos) {
    throw CheckpointError("checkpoint value for '" + std::string(key) + "' contains a newline");
  }
  for (auto& [k, v] : fields_) {
    if (k == key) {
      v = value;
      return;
    }
  }
  fields_.emplace_back(key, value);
}

void Checkpoint::set_uint(std::string_view key, std::uint64_t value) { set(key, std::to_string(value)); }
void Checkpoint::set_int(std::string_view key, std::int64_t value) { set(key, std::to_string(value)); }
void Checkpoint::set_bigint(std::string_view key, const BigInt& value) { set(key, value.get_str(16)); }

void Checkpoint::set_real(std::string_view key, long double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%La", value);
  set(key, buf);
}

bool Checkpoint::has(std::string_view key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& Checkpoint::get(std::string_view key) const {
  for (const auto& [k, v] : fields_) {
    if (k == key) return v;
  }
  throw CheckpointError("checkpoint is missing '" + std::string(key) + "'");
}

std::uint64_t Checkpoint::get_uint(std::string_view key) const {
  const std::string& s = get(key);
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0 || s.front() == '-') {
    throw CheckpointError("checkpoint field '" + std::string(key) + "' is not an unsigned integer");
  }
  return v;
}

std::int64_t Checkpoint::get_int(std::string_view key) const {
  const std::string& s = get(key);
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || *end != '\0' || errno != 0) {
    throw CheckpointError("checkpoint field '" + std::string(key) + "' is not an integer");
  }
  return v;
}

BigInt Checkpoint::get_bigint(std::string_view key) const {
  BigInt v;
  if (v.set_str(get(key), 16) != 0) {
    throw CheckpointError("checkpoint field '" + std::string(key) + "' is not a hex integer");
  }
  return v;
}

long double Checkpoint::get_real(std::string_view key) const {
  const std::string& s = get(key);
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (s.empty() || *end != '\0') {
    throw CheckpointError("checkpoint field '" + std::string(key) + "' is not a hex float");
  }
  return v;
}

std::string Checkpoint::serialize() const {
  check_token(kind_, "checkpoint kind");
  std::string body;
  body += std::string(kMagic) + " " + std::to_string(kFormatVersion) + "\n";
  body += "kind " + kind_ + "\n";
  for (const auto& [k, v] : fields_) body += k + " " + v + "\n";
  return body + "digest " + sha256_hex(body) + "\n";
}

Checkpoint Checkpoint::parse(std::string_view text) {
  const auto digest_pos = text.rfind("digest ");
  if (digest_pos == std::string_view::npos || (digest_pos != 0 && text[digest_pos - 1] != '\n')) {
    throw CheckpointError("checkpoint has no digest line");
  }
  const std::string_view body = text.substr(0, digest_pos);
  std::string_view digest = text.substr(digest_pos + 7);
  while (!digest.empty() && (digest.back() == '\n' || digest.back() == '\r')) digest.remove_suffix(1);
  if (digest != sha256_hex(body)) throw CheckpointError("checkpoint digest mismatch (file corrupted)");

  std::istringstream in{std::string(body)};
  std::string line;
  std::getline(in, line);
  const std::string expected_header = std::string(kMagic) + " " + std::to_string(kFormatVersion);
  if (line.rfind(std::string(kMagic) + " ", 0) != 0) throw CheckpointError("not a cflab checkpoint");
  if (line != expected_header) {
    throw CheckpointError("unsupported checkpoint version: '" + line + "', expected '" + expected_header + "'");
  }
  Checkpoint cp;
  while (std::getline(in, line)) {
    const auto space = line.find(' ');
    if (space == std::string::npos) throw CheckpointError("malformed checkpoint line '" + line + "'");
    const std::string key = line.substr(0, space);
    const std::string value = line.substr(space + 1);
    if (key == "kind" && cp.kind_.empty()) {
      cp.kind_ = value;
    } else {
      cp.fields_.emplace_back(key, value);
    }
  }
  if (cp.kind_.empty()) throw CheckpointError("checkpoint has no kind");
  return cp;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  write_text_file(tmp, serialize());
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + ec.message());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace cflab
