#include "cflab/io.hpp"

#include "cflab/error.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <memory>
#include <sstream>

namespace cflab {

namespace {

using EvpContext = std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)>;

EvpContext new_sha256() {
  EvpContext ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error("cannot initialise SHA-256");
  }
  return ctx;
}

std::string finish_hex(EVP_MD_CTX* ctx) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md.data(), &len) != 1) throw Error("SHA-256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(kHex[md[i] >> 4]);
    out.push_back(kHex[md[i] & 15]);
  }
  return out;
}

const std::vector<std::string>& known_statistics() {
  static const std::vector<std::string> names{"khinchin", "levy", "signs", "records", "kuzmin", "digits"};
  return names;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  auto ctx = new_sha256();
  EVP_DigestUpdate(ctx.get(), data.data(), data.size());
  return finish_hex(ctx.get());
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  auto ctx = new_sha256();
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  return finish_hex(ctx.get());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ConfigError("write failed for " + path.string());
}

ExpansionMode parse_expansion_mode(std::string_view name) {
  if (name == "exact") return ExpansionMode::exact;
  if (name == "certified") return ExpansionMode::certified;
  if (name == "paper") return ExpansionMode::paper;
  throw ConfigError("unknown mode '" + std::string(name) + "' (exact, certified, paper)");
}

std::string_view to_string(ExpansionMode mode) {
  switch (mode) {
    case ExpansionMode::exact: return "exact";
    case ExpansionMode::certified: return "certified";
    case ExpansionMode::paper: return "paper";
  }
  return "exact";
}

// ---------------------------------------------------------------------------

void RunConfig::apply_preset() {
  if (preset.empty()) return;
  if (preset == "desk") {
    if (!terms) terms = 18;
    if (!precision) precision = 10000;
  } else if (preset == "stretch") {
    if (!terms) terms = 20;
    if (!precision) precision = 100000;
  } else {
    throw ConfigError("unknown preset '" + preset + "' (desk, stretch)");
  }
}

void RunConfig::validate(const MersenneCatalog& catalog) const {
  if (precision && *precision < 1) throw ConfigError("precision must be at least 1 digit");
  if (terms) {
    if (*terms < 1) throw ConfigError("term count must be at least 1");
    const std::size_t available = available_terms(sequence, catalog);
    if (*terms > available) {
      throw ConfigError("term count " + std::to_string(*terms) + " exceeds the " +
                        std::to_string(available) + " terms available for sequence '" +
                        std::string(to_string(sequence.kind)) + "'");
    }
  }
  if (stride < 1) throw ConfigError("stride must be at least 1");
  if (checkpoint_interval < 1) throw ConfigError("checkpoint interval must be at least 1");
  if (kuzmin_max < 1) throw ConfigError("kuzmin_max must be at least 1");
  for (const auto& s : statistics) {
    const auto& known = known_statistics();
    if (std::find(known.begin(), known.end(), s) == known.end()) {
      throw ConfigError("unknown statistic '" + s + "'");
    }
  }
  if (name.empty() || name.find('/') != std::string::npos) throw ConfigError("run name must be a plain file stem");
  if (delta_from && delta_to && *delta_from > *delta_to) throw ConfigError("delta_from exceeds delta_to");
}

void merge_config_json(RunConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "command") c.command = v.get<std::string>();
      else if (key == "preset") c.preset = v.get<std::string>();
      else if (key == "sequence") c.sequence.kind = parse_sequence_kind(v.get<std::string>());
      else if (key == "exponents") c.sequence.exponents = v.get<std::vector<std::uint64_t>>();
      else if (key == "values") {
        c.sequence.values.clear();
        for (const auto& e : v) {
          c.sequence.values.push_back(e.is_string() ? parse_bigint(e.get<std::string>()) : BigInt(e.get<long>()));
        }
      }
      else if (key == "terms") c.terms = v.get<std::size_t>();
      else if (key == "precision" || key == "digits") c.precision = v.get<std::size_t>();
      else if (key == "mode") c.mode = parse_expansion_mode(v.get<std::string>());
      else if (key == "exact") c.exact_decimal = v.get<bool>();
      else if (key == "statistics") c.statistics = v.get<std::vector<std::string>>();
      else if (key == "stride") c.stride = v.get<std::size_t>();
      else if (key == "kuzmin_max") c.kuzmin_max = v.get<std::uint64_t>();
      else if (key == "rational") c.rational = v.get<std::string>();
      else if (key == "cf") c.cf_file = v.get<std::string>();
      else if (key == "value") c.value_file = v.get<std::string>();
      else if (key == "decimal") c.decimal_file = v.get<std::string>();
      else if (key == "log_domain") c.log_domain = v.get<bool>();
      else if (key == "summary") c.summary = v.get<bool>();
      else if (key == "delta_from") c.delta_from = v.get<std::size_t>();
      else if (key == "delta_to") c.delta_to = v.get<std::size_t>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "name") c.name = v.get<std::string>();
      else if (key == "checkpoint_interval") c.checkpoint_interval = v.get<std::size_t>();
      else if (key == "stop_after") c.stop_after = v.get<std::size_t>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

RunConfig load_run_config(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  RunConfig c;
  merge_config_json(c, j);
  return c;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = c.command;
  if (!c.preset.empty()) j["preset"] = c.preset;
  j["sequence"] = std::string(to_string(c.sequence.kind));
  if (!c.sequence.exponents.empty()) j["exponents"] = c.sequence.exponents;
  if (!c.sequence.values.empty()) {
    nlohmann::json values = nlohmann::json::array();
    for (const auto& v : c.sequence.values) values.push_back(v.get_str());
    j["values"] = values;
  }
  if (c.terms) j["terms"] = *c.terms;
  if (c.precision) j["precision"] = *c.precision;
  j["mode"] = std::string(to_string(c.mode));
  if (c.exact_decimal) j["exact"] = true;
  if (!c.statistics.empty()) j["statistics"] = c.statistics;
  j["stride"] = c.stride;
  j["kuzmin_max"] = c.kuzmin_max;
  if (!c.rational.empty()) j["rational"] = c.rational;
  if (!c.cf_file.empty()) j["cf"] = c.cf_file.string();
  if (!c.value_file.empty()) j["value"] = c.value_file.string();
  if (!c.decimal_file.empty()) j["decimal"] = c.decimal_file.string();
  if (c.log_domain) j["log_domain"] = true;
  if (c.summary) j["summary"] = true;
  if (c.delta_from) j["delta_from"] = *c.delta_from;
  if (c.delta_to) j["delta_to"] = *c.delta_to;
  if (!c.out.empty()) j["out"] = c.out.string();
  j["name"] = c.name;
  j["checkpoint_interval"] = c.checkpoint_interval;
  if (c.stop_after) j["stop_after"] = *c.stop_after;
  return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig c;
  merge_config_json(c, j);
  return c;
}

// ---------------------------------------------------------------------------

RunManifest::RunManifest(const RunConfig& config, const MersenneCatalog& catalog)
    : config_(cflab::to_json(config)), catalog_sha256_(sha256_hex(catalog.canonical_text())) {
  // stop_after is an interruption knob, not part of the run's identity.
  config_.erase("stop_after");
}

void RunManifest::add_output(const std::filesystem::path& file) {
  outputs_[file.filename().string()] = sha256_file(file);
}

nlohmann::json RunManifest::to_json(double wall_time_seconds) const {
  nlohmann::json outputs = nlohmann::json::object();
  for (const auto& [name, digest] : outputs_) outputs[name] = {{"sha256", digest}};
  return {{"software", "cflab"},
          {"version", std::string(kVersion)},
          {"config", config_},
          {"catalog_sha256", catalog_sha256_},
          {"wall_time_seconds", wall_time_seconds},
          {"outputs", outputs}};
}

void RunManifest::write(const std::filesystem::path& dir, double wall_time_seconds) const {
  write_text_file(dir / "manifest.json", to_json(wall_time_seconds).dump(2) + "\n");
}

}  // namespace cflab
