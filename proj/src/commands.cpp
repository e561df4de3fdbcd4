#include "cflab/commands.hpp"

#include "cflab/checkpoint.hpp"
#include "cflab/constants.hpp"
#include "cflab/diagnostics.hpp"
#include "cflab/error.hpp"
#include "cflab/statistics.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace cflab {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path prepare_out(const RunConfig& c) {
  if (c.out.empty()) return {};
  std::error_code ec;
  fs::create_directories(c.out, ec);
  if (ec) throw ConfigError("cannot create output directory " + c.out.string() + ": " + ec.message());
  return c.out;
}

fs::path out_file(const fs::path& dir, const RunConfig& c, std::string_view suffix) {
  return dir / (c.name + "_" + std::string(suffix));
}

fs::path checkpoint_path(const fs::path& dir, const RunConfig& c) {
  return dir / (c.name + ".checkpoint");
}

std::size_t require_terms(const RunConfig& c) {
  if (!c.terms) throw ConfigError("a term count is required (--terms or a positional count)");
  return *c.terms;
}

std::size_t require_precision(const RunConfig& c, std::string_view why) {
  if (!c.precision) throw ConfigError("--precision is required " + std::string(why));
  return *c.precision;
}

std::string source_label(const RunConfig& c) {
  if (!c.cf_file.empty()) return c.cf_file.filename().string();
  if (!c.rational.empty()) return "rational " + c.rational;
  if (!c.terms && !c.decimal_file.empty()) return c.decimal_file.filename().string();
  return std::string(to_string(c.sequence.kind)) + ":" + (c.terms ? std::to_string(*c.terms) : "?");
}

std::string shorten(const std::string& digits, std::size_t keep) {
  if (digits.size() <= keep) return digits;
  return digits.substr(0, keep) + "... (" + std::to_string(digits.size()) + " digits)";
}

std::string first_digits(const DecimalApprox& d, std::size_t keep) {
  std::string s = d.integer_part + "." + d.fraction.substr(0, keep);
  if (d.fraction.size() > keep) s += "...";
  return s;
}

bool decimal_is_input(const RunConfig& c) {
  return c.cf_file.empty() && c.rational.empty() && !c.terms && !c.decimal_file.empty();
}

DecimalApprox read_decimal(const fs::path& path) {
  std::string text = read_text_file(path);
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r' || text.back() == ' ')) text.pop_back();
  try {
    return parse_decimal(text);
  } catch (const DomainError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

// Catalog digest kept in checkpoints to refuse resuming against another list.
std::string catalog_digest(const MersenneCatalog& catalog) { return sha256_hex(catalog.canonical_text()); }

struct LargestQuotient {
  BigInt value{0};
  std::size_t index = 0;

  void update(const BigInt& q, std::size_t n) {
    if (q > value) {
      value = q;
      index = n;
    }
  }
};

void report_quotients(std::ostream& out, std::size_t count, const LargestQuotient& largest) {
  out << "quotients: " << count << '\n';
  if (count > 0) {
    const std::string digits = largest.value.get_str();
    out << "largest: a_" << largest.index << " = " << shorten(digits, 60) << '\n';
  }
}

nlohmann::json cf_summary_json(const CFExpansion& header, std::size_t count, const LargestQuotient& largest,
                               ExpansionMode mode) {
  nlohmann::json j{{"mode", std::string(to_string(mode))},
                   {"a0", header.a0.get_str()},
                   {"quotients", count},
                   {"tail", header.tail == TailKind::exact ? "exact" : "truncated"},
                   {"precision", header.precision}};
  if (count > 0) {
    j["largest_index"] = largest.index;
    j["largest"] = largest.value.get_str();
    j["largest_digits"] = largest.value.get_str().size();
  }
  return j;
}

nlohmann::json parse_checkpoint_config(const Checkpoint& cp) {
  try {
    return nlohmann::json::parse(cp.get("config"));
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(std::string("checkpoint config is not valid JSON: ") + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string format_inverse_square(const BigInt& q) {
  if (q < 1) throw DomainError("1/Q^2 needs Q >= 1");
  const BigInt s = q * q;
  const std::size_t digits = floor_log10(s) + 1;
  BigInt mantissa = pow10(digits + 9) / s;  // in [10^9, 10^10]
  long exponent = -static_cast<long>(digits);
  if (mantissa == pow10(10)) {
    mantissa = pow10(9);
    exponent += 1;
  }
  const std::string m = mantissa.get_str();
  std::string e = std::to_string(exponent < 0 ? -exponent : exponent);
  if (e.size() < 2) e.insert(0, "0");
  return m.substr(0, 1) + "." + m.substr(1) + "e" + (exponent < 0 ? "-" : "+") + e;
}

BigRational run_rational(const RunConfig& c, const MersenneCatalog& catalog) {
  if (!c.rational.empty()) {
    try {
      return BigRational::parse(c.rational);
    } catch (const DomainError& e) {
      throw ConfigError("bad rational '" + c.rational + "': " + e.what());
    }
  }
  if (decimal_is_input(c)) return read_decimal(c.decimal_file).as_rational();
  return reciprocal_sum(c.sequence, require_terms(c), catalog);
}

CFExpansion run_cf(const RunConfig& c, const MersenneCatalog& catalog) {
  if (!c.cf_file.empty()) {
    std::ifstream in(c.cf_file, std::ios::binary);
    if (!in) throw ConfigError("cannot open " + c.cf_file.string());
    return read_cf_text(in);
  }
  if (decimal_is_input(c)) {
    const DecimalApprox approx = read_decimal(c.decimal_file);
    switch (c.mode) {
      case ExpansionMode::exact: return cf_expand_rational(approx.as_rational());
      case ExpansionMode::certified: return cf_expand_certified(approx);
      case ExpansionMode::paper: return cf_expand_paper(approx.as_rational(), approx.precision);
    }
  }
  const BigRational r = run_rational(c, catalog);
  if (c.mode == ExpansionMode::exact) return cf_expand_rational(r);
  const std::size_t d = require_precision(c, "for certified and paper modes");
  const DecimalApprox approx = to_decimal(r, d);
  if (c.mode == ExpansionMode::certified) return cf_expand_certified(approx);
  return cf_expand_paper(approx.as_rational(), d);
}

// ---------------------------------------------------------------------------
// sum

void cmd_sum(const RunConfig& c, const MersenneCatalog& catalog, std::ostream& out) {
  const auto start = Clock::now();
  const fs::path dir = prepare_out(c);
  const BigRational r = run_rational(c, catalog);

  DecimalApprox approx;
  if (c.exact_decimal) {
    auto full = terminating_decimal(r);
    if (!full) throw DomainError("the sum has no terminating decimal expansion");
    approx = std::move(*full);
  } else {
    approx = to_decimal(r, c.precision.value_or(60));
  }

  out << "sum: " << source_label(c) << '\n';
  out << "digits: " << approx.precision << '\n';
  out << "value: " << first_digits(approx, 60) << '\n';
  if (c.rational.empty() && c.terms &&
      (c.sequence.kind == SequenceKind::mersenne || c.sequence.kind == SequenceKind::dyadic)) {
    // sum_{p >= p_next} 1/(2^p - 1) < 2^{2 - p_next}
    const auto& exps = c.sequence.exponents.empty() ? catalog.exponents() : std::span<const std::uint64_t>(c.sequence.exponents);
    if (*c.terms < exps.size()) {
      const auto p_next = exps[*c.terms];
      const auto tail_digits = static_cast<std::uint64_t>(std::floor((p_next - 2) * std::log10(2.0)));
      out << "tail beyond " << *c.terms << " terms < 1e-" << tail_digits << '\n';
    }
  }

  if (dir.empty()) return;
  RunManifest manifest(c, catalog);
  const auto num = out_file(dir, c, "numerator.txt");
  const auto den = out_file(dir, c, "denominator.txt");
  const auto dec = out_file(dir, c, "decimal.txt");
  const auto js = out_file(dir, c, "sum.json");
  write_text_file(num, r.numerator().get_str() + "\n");
  write_text_file(den, r.denominator().get_str() + "\n");
  write_text_file(dec, approx.str() + "\n");
  nlohmann::json j{{"source", source_label(c)},
                   {"decimal", approx},
                   {"numerator_digits", r.numerator().get_str().size()},
                   {"denominator_digits", r.denominator().get_str().size()}};
  write_text_file(js, j.dump(2) + "\n");
  for (const auto& f : {num, den, dec, js}) manifest.add_output(f);
  manifest.write(dir, seconds_since(start));
}

// ---------------------------------------------------------------------------
// cf

namespace {

struct CfRun {
  RunConfig config;
  fs::path dir;
  BigInt a0;
  EuclidExpander expander;
  LargestQuotient largest;
  std::uint64_t offset = 0;  // bytes of the CF file covered by the state
  double elapsed = 0;
};

Checkpoint cf_checkpoint(const CfRun& run, const MersenneCatalog& catalog, bool complete) {
  Checkpoint cp("cf");
  cp.set("status", complete ? "complete" : "running");
  cp.set("config", to_json(run.config).dump());
  cp.set("catalog_sha256", catalog_digest(catalog));
  cp.set_bigint("a0", run.a0);
  cp.set_uint("emitted", run.expander.emitted());
  cp.set_bigint("rem_a", run.expander.remainder_a());
  cp.set_bigint("rem_b", run.expander.remainder_b());
  cp.set_bigint("largest", run.largest.value);
  cp.set_uint("largest_index", run.largest.index);
  cp.set_uint("offset", run.offset);
  cp.set_real("elapsed", run.elapsed);
  return cp;
}

void continue_cf(CfRun& run, const MersenneCatalog& catalog, std::ostream& out,
                 std::optional<std::size_t> stop_after) {
  const auto start = Clock::now();
  const RunConfig& c = run.config;
  const fs::path cf_path = out_file(run.dir, c, "cf.txt");
  const fs::path ckpt = checkpoint_path(run.dir, c);

  std::ofstream file(cf_path, std::ios::binary | std::ios::app);
  if (!file) throw ConfigError("cannot write " + cf_path.string());

  std::size_t next_checkpoint = (run.expander.emitted() / c.checkpoint_interval + 1) * c.checkpoint_interval;
  std::vector<BigInt> batch;
  std::string text;
  auto save = [&](bool complete) {
    file.flush();
    run.offset = static_cast<std::uint64_t>(file.tellp());
    const double before = run.elapsed;
    run.elapsed += seconds_since(start);
    cf_checkpoint(run, catalog, complete).save(ckpt);
    run.elapsed = before;
  };

  while (!run.expander.done()) {
    batch.clear();
    const std::size_t first = run.expander.emitted() + 1;
    run.expander.step(batch);
    text.clear();
    for (std::size_t i = 0; i < batch.size(); ++i) {
      run.largest.update(batch[i], first + i);
      text += batch[i].get_str();
      text += '\n';
    }
    file << text;
    if (stop_after && run.expander.emitted() >= *stop_after && !run.expander.done()) {
      save(false);
      out << "stopped after " << run.expander.emitted() << " quotients; resume with: cflab resume "
          << ckpt.string() << '\n';
      return;
    }
    if (run.expander.emitted() >= next_checkpoint) {
      save(false);
      next_checkpoint = (run.expander.emitted() / c.checkpoint_interval + 1) * c.checkpoint_interval;
    }
  }
  save(true);
  file.close();

  CFExpansion header;
  header.a0 = run.a0;
  const auto summary = out_file(run.dir, c, "cf_summary.json");
  write_text_file(summary, cf_summary_json(header, run.expander.emitted(), run.largest, c.mode).dump(2) + "\n");
  RunManifest manifest(c, catalog);
  manifest.add_output(cf_path);
  manifest.add_output(summary);
  manifest.write(run.dir, run.elapsed + seconds_since(start));
  report_quotients(out, run.expander.emitted(), run.largest);
}

}  // namespace

void cmd_cf(const RunConfig& c, const MersenneCatalog& catalog, std::ostream& out) {
  const auto start = Clock::now();
  const fs::path dir = prepare_out(c);

  if (c.mode == ExpansionMode::exact && c.cf_file.empty() && !dir.empty()) {
    // Streamed so that long expansions can be checkpointed.
    const BigRational r = run_rational(c, catalog);
    EuclidExpander e(r.numerator(), r.denominator());
    CfRun run{c, dir, e.a0(), std::move(e), {}, 0, 0};
    const fs::path cf_path = out_file(dir, c, "cf.txt");
    const std::string header = "a0=" + run.a0.get_str() + " tail=exact\n";
    write_text_file(cf_path, header);
    run.offset = header.size();
    out << "cf: " << source_label(c) << " (exact)\n";
    continue_cf(run, catalog, out, c.stop_after);
    return;
  }

  const CFExpansion cf = run_cf(c, catalog);
  LargestQuotient largest;
  for (std::size_t i = 0; i < cf.quotients.size(); ++i) largest.update(cf.quotients[i], i + 1);
  out << "cf: " << source_label(c) << " (" << to_string(c.mode) << ")\n";
  report_quotients(out, cf.quotients.size(), largest);
  if (dir.empty()) return;

  RunManifest manifest(c, catalog);
  const auto cf_path = out_file(dir, c, "cf.txt");
  std::ostringstream text;
  write_cf_text(text, cf);
  write_text_file(cf_path, text.str());
  const auto summary = out_file(dir, c, "cf_summary.json");
  write_text_file(summary, cf_summary_json(cf, cf.quotients.size(), largest, c.mode).dump(2) + "\n");
  manifest.add_output(cf_path);
  manifest.add_output(summary);
  manifest.write(dir, seconds_since(start));
}

// ---------------------------------------------------------------------------
// stats

namespace {

const std::vector<std::string> kStreamedStats{"khinchin", "levy", "signs", "records"};

struct StatsRun {
  RunConfig config;
  fs::path dir;
  std::string input_digest;
  std::size_t n = 0;
  RunningGeometricMean mean;
  ConvergentStream::State conv;
  SignChangeCounter k_signs, l_signs;
  RecordTracker k_records, l_records;
  std::vector<std::uint64_t> kuzmin_counts;
  std::uint64_t kuzmin_total = 0, kuzmin_overflow = 0;
  std::map<std::string, std::uint64_t> offsets;
  double elapsed = 0;

  bool wants(std::string_view s) const {
    for (const auto& x : config.statistics) {
      if (x == s) return true;
    }
    return false;
  }
};

std::string join_counts(const std::vector<std::uint64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s.empty() ? "-" : s;
}

std::vector<std::uint64_t> split_counts(const std::string& s) {
  std::vector<std::uint64_t> v;
  if (s == "-") return v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      v.push_back(std::stoull(item));
    } catch (const std::exception&) {
      throw CheckpointError("bad histogram counts in checkpoint");
    }
  }
  return v;
}

Checkpoint stats_checkpoint(const StatsRun& run, const MersenneCatalog& catalog, bool complete) {
  Checkpoint cp("stats");
  cp.set("status", complete ? "complete" : "running");
  cp.set("config", to_json(run.config).dump());
  cp.set("catalog_sha256", catalog_digest(catalog));
  cp.set("input_sha256", run.input_digest);
  cp.set_uint("n", run.n);
  cp.set_uint("mean_count", run.mean.count());
  cp.set_real("mean_log_sum", run.mean.log_sum());
  cp.set_uint("conv_n", run.conv.n);
  cp.set_bigint("p_prev", run.conv.p_prev);
  cp.set_bigint("q_prev", run.conv.q_prev);
  cp.set_bigint("p", run.conv.p);
  cp.set_bigint("q", run.conv.q);
  cp.set_uint("k_sign_count", run.k_signs.count());
  cp.set_int("k_sign_last", run.k_signs.last_sign());
  cp.set_uint("l_sign_count", run.l_signs.count());
  cp.set_int("l_sign_last", run.l_signs.last_sign());
  cp.set_uint("k_record_has", run.k_records.has_record());
  cp.set_real("k_record_best", run.k_records.best());
  cp.set_uint("l_record_has", run.l_records.has_record());
  cp.set_real("l_record_best", run.l_records.best());
  cp.set("kuzmin_counts", join_counts(run.kuzmin_counts));
  cp.set_uint("kuzmin_total", run.kuzmin_total);
  cp.set_uint("kuzmin_overflow", run.kuzmin_overflow);
  for (const auto& [stat, off] : run.offsets) cp.set_uint("offset_" + stat, off);
  cp.set_real("elapsed", run.elapsed);
  return cp;
}

void restore_stats(StatsRun& run, const Checkpoint& cp) {
  run.n = cp.get_uint("n");
  run.mean.restore(cp.get_uint("mean_count"), cp.get_real("mean_log_sum"));
  run.conv.n = cp.get_uint("conv_n");
  run.conv.p_prev = cp.get_bigint("p_prev");
  run.conv.q_prev = cp.get_bigint("q_prev");
  run.conv.p = cp.get_bigint("p");
  run.conv.q = cp.get_bigint("q");
  run.k_signs.restore(cp.get_uint("k_sign_count"), static_cast<int>(cp.get_int("k_sign_last")));
  run.l_signs.restore(cp.get_uint("l_sign_count"), static_cast<int>(cp.get_int("l_sign_last")));
  run.k_records.restore(cp.get_uint("k_record_has") != 0, static_cast<double>(cp.get_real("k_record_best")));
  run.l_records.restore(cp.get_uint("l_record_has") != 0, static_cast<double>(cp.get_real("l_record_best")));
  run.kuzmin_counts = split_counts(cp.get("kuzmin_counts"));
  run.kuzmin_total = cp.get_uint("kuzmin_total");
  run.kuzmin_overflow = cp.get_uint("kuzmin_overflow");
  for (const auto& stat : kStreamedStats) {
    if (run.wants(stat)) run.offsets[stat] = cp.get_uint("offset_" + stat);
  }
  run.elapsed = static_cast<double>(cp.get_real("elapsed"));
  if (run.wants("kuzmin") && run.kuzmin_counts.size() != run.config.kuzmin_max) {
    throw CheckpointError("histogram size in checkpoint does not match kuzmin_max");
  }
}

std::string cf_digest(const CFExpansion& cf) {
  std::ostringstream s;
  write_cf_text(s, cf);
  return sha256_hex(s.str());
}

void series_row(std::string& line, std::size_t n, double value, double reference, std::uint64_t signs) {
  line += std::to_string(n);
  line += ',';
  line += format_double(value);
  line += ',';
  line += format_double(reference);
  line += ',';
  line += format_double(value - reference);
  line += ',';
  line += std::to_string(signs);
  line += '\n';
}

void write_end_stats(const StatsRun& run, const MersenneCatalog& catalog, RunManifest& manifest) {
  const RunConfig& c = run.config;
  if (run.wants("kuzmin")) {
    const auto path = out_file(run.dir, c, "kuzmin.csv");
    std::string text = "m,count,frequency,theoretical\n";
    const double total = static_cast<double>(run.kuzmin_total);
    for (std::uint64_t m = 1; m <= c.kuzmin_max; ++m) {
      const auto count = run.kuzmin_counts[m - 1];
      text += std::to_string(m) + ',' + std::to_string(count) + ',' +
              format_double(total > 0 ? static_cast<double>(count) / total : 0.0) + ',' +
              format_double(gauss_kuzmin_probability(m)) + '\n';
    }
    text += ">" + std::to_string(c.kuzmin_max) + ',' + std::to_string(run.kuzmin_overflow) + ',' +
            format_double(total > 0 ? static_cast<double>(run.kuzmin_overflow) / total : 0.0) + ',' +
            format_double(gauss_kuzmin_tail(c.kuzmin_max)) + '\n';
    write_text_file(path, text);
    manifest.add_output(path);
  }
  if (run.wants("digits")) {
    DecimalApprox approx;
    if (!c.decimal_file.empty()) {
      approx = read_decimal(c.decimal_file);
    } else {
      approx = to_decimal(run_rational(c, catalog), require_precision(c, "for the digit census"));
    }
    const DigitCensus census = digit_census(approx);
    const auto path = out_file(run.dir, c, "digits.csv");
    std::string text = "digit,count,frequency\n";
    for (int d = 0; d < 10; ++d) {
      text += std::to_string(d) + ',' + std::to_string(census.counts[d]) + ',' +
              format_double(census.frequency(d)) + '\n';
    }
    text += "total," + std::to_string(census.total) + ",1\n";
    write_text_file(path, text);
    manifest.add_output(path);
  }
}

void continue_stats(StatsRun& run, const CFExpansion& cf, const MersenneCatalog& catalog,
                    std::ostream& out, std::optional<std::size_t> stop_after) {
  const auto start = Clock::now();
  const RunConfig& c = run.config;
  const fs::path ckpt = checkpoint_path(run.dir, c);
  const std::size_t last = cf.quotients.size();
  const double K = constants::kKhinchin;
  const double L = constants::kLevy;

  std::map<std::string, std::ofstream> files;
  for (const auto& stat : kStreamedStats) {
    if (!run.wants(stat)) continue;
    const auto path = out_file(run.dir, c, stat + ".csv");
    files[stat].open(path, std::ios::binary | std::ios::app);
    if (!files[stat]) throw ConfigError("cannot write " + path.string());
  }

  ConvergentStream stream = ConvergentStream::restore(run.conv);
  GaussKuzminHistogram hist;
  hist.m_max = c.kuzmin_max;
  hist.counts = run.kuzmin_counts;
  hist.total = run.kuzmin_total;
  hist.overflow = run.kuzmin_overflow;

  const bool need_mean = run.wants("khinchin") || run.wants("signs") || run.wants("records");
  const bool need_q = run.wants("levy") || run.wants("signs") || run.wants("records");

  auto save = [&](bool complete) {
    for (auto& [stat, f] : files) {
      f.flush();
      run.offsets[stat] = static_cast<std::uint64_t>(f.tellp());
    }
    run.conv = stream.state();
    run.kuzmin_counts = hist.counts;
    run.kuzmin_total = hist.total;
    run.kuzmin_overflow = hist.overflow;
    const double before = run.elapsed;
    run.elapsed += seconds_since(start);
    stats_checkpoint(run, catalog, complete).save(ckpt);
    run.elapsed = before;
  };

  std::string line;
  while (run.n < last) {
    const std::size_t n = ++run.n;
    const BigInt& a = cf.quotients[n - 1];
    if (need_mean) run.mean.add(a);
    if (need_q) stream.push(a);
    if (run.wants("kuzmin")) hist.add(a);

    double k_value = 0, l_value = 0;
    if (need_mean) k_value = run.mean.value();
    if (need_q) l_value = static_cast<double>(std::exp(log_of_bigint(stream.q()) / static_cast<long double>(n)));

    if (need_mean) {
      const bool flip = run.k_signs.update(k_value - K);
      if (flip && run.wants("signs")) {
        line.clear();
        line += std::to_string(n) + ",khinchin," + format_double(k_value - K) + ',' + std::to_string(run.k_signs.count()) + '\n';
        files["signs"] << line;
      }
      if (run.k_records.update(std::abs(k_value - K)) && run.wants("records")) {
        files["records"] << n << ",khinchin," << format_double(std::abs(k_value - K)) << '\n';
      }
    }
    if (need_q) {
      const bool flip = run.l_signs.update(l_value - L);
      if (flip && run.wants("signs")) {
        line.clear();
        line += std::to_string(n) + ",levy," + format_double(l_value - L) + ',' + std::to_string(run.l_signs.count()) + '\n';
        files["signs"] << line;
      }
      if (run.l_records.update(std::abs(l_value - L)) && run.wants("records")) {
        files["records"] << n << ",levy," << format_double(std::abs(l_value - L)) << '\n';
      }
    }
    if (n % c.stride == 0 || n == last) {
      if (run.wants("khinchin")) {
        line.clear();
        series_row(line, n, k_value, K, run.k_signs.count());
        files["khinchin"] << line;
      }
      if (run.wants("levy")) {
        line.clear();
        series_row(line, n, l_value, L, run.l_signs.count());
        files["levy"] << line;
      }
    }

    if (n == last) break;
    if (stop_after && n >= *stop_after) {
      save(false);
      out << "stopped at n = " << n << "; resume with: cflab resume " << ckpt.string() << '\n';
      return;
    }
    if (n % c.checkpoint_interval == 0) save(false);
  }

  save(true);
  for (auto& [stat, f] : files) f.close();

  RunManifest manifest(c, catalog);
  for (const auto& stat : kStreamedStats) {
    if (run.wants(stat)) manifest.add_output(out_file(run.dir, c, stat + ".csv"));
  }
  run.kuzmin_counts = hist.counts;
  run.kuzmin_total = hist.total;
  run.kuzmin_overflow = hist.overflow;
  write_end_stats(run, catalog, manifest);
  manifest.write(run.dir, run.elapsed + seconds_since(start));

  out << "stats: " << source_label(c) << ", n = " << last << '\n';
  if (need_mean && last > 0) {
    out << "K(" << last << ") = " << format_double(run.mean.value()) << "  (sign changes "
        << run.k_signs.count() << ", closest " << format_double(run.k_records.best()) << ")\n";
  }
  if (need_q && last > 0) {
    const double lv = static_cast<double>(std::exp(log_of_bigint(stream.q()) / static_cast<long double>(last)));
    out << "L(" << last << ") = " << format_double(lv) << "  (sign changes " << run.l_signs.count()
        << ", closest " << format_double(run.l_records.best()) << ")\n";
  }
}

}  // namespace

void cmd_stats(const RunConfig& config, const MersenneCatalog& catalog, std::ostream& out) {
  RunConfig c = config;
  if (c.statistics.empty()) c.statistics = {"khinchin", "levy"};
  if (c.out.empty()) throw ConfigError("stats needs an output directory (--out)");
  const fs::path dir = prepare_out(c);

  StatsRun run;
  run.config = c;
  run.dir = dir;

  const bool streamed = run.wants("khinchin") || run.wants("levy") || run.wants("signs") ||
                        run.wants("records") || run.wants("kuzmin");
  CFExpansion cf;
  if (streamed) cf = run_cf(c, catalog);
  if (streamed && cf.quotients.empty()) throw DomainError("statistics need at least one partial quotient");
  run.input_digest = cf_digest(cf);
  run.conv = ConvergentStream(cf.a0).state();
  if (run.wants("kuzmin")) run.kuzmin_counts.assign(c.kuzmin_max, 0);

  for (const auto& stat : kStreamedStats) {
    if (!run.wants(stat)) continue;
    std::string header;
    if (stat == "khinchin" || stat == "levy") header = "n,value,reference,delta,sign_changes\n";
    if (stat == "signs") header = "n,statistic,delta,sign_changes\n";
    if (stat == "records") header = "n,statistic,distance\n";
    write_text_file(out_file(dir, c, stat + ".csv"), header);
    run.offsets[stat] = header.size();
  }
  continue_stats(run, cf, catalog, out, c.stop_after);
}

// ---------------------------------------------------------------------------
// um

void cmd_um(const RunConfig& c, const MersenneCatalog& catalog, std::ostream& out) {
  const auto start = Clock::now();
  const fs::path dir = prepare_out(c);
  const std::size_t terms = require_terms(c);
  const auto value = cf_from_quotient_sequence(c.sequence, terms, c.precision.value_or(0), catalog);

  out << "value of [0; " << to_string(c.sequence.kind) << " terms 1.." << terms << "]\n";
  out << "certified digits: " << value.certified_digits << '\n';
  if (value.decimal) out << "value: " << first_digits(*value.decimal, 60) << '\n';

  std::string table = "k,q_digits,inverse_q_squared\n";
  ConvergentStream stream(value.cf.a0);
  out << "k  1/Q_k^2\n";
  for (std::size_t k = 1; k <= terms; ++k) {
    stream.push(value.cf.quotients[k - 1]);
    const std::string inv = format_inverse_square(stream.q());
    table += std::to_string(k) + ',' + std::to_string(floor_log10(stream.q()) + 1) + ',' + inv + '\n';
    out << k << "  " << inv << '\n';
  }

  if (dir.empty()) return;
  RunManifest manifest(c, catalog);
  const auto table_path = out_file(dir, c, "um_table.csv");
  write_text_file(table_path, table);
  manifest.add_output(table_path);
  if (value.decimal) {
    const auto dec = out_file(dir, c, "um_decimal.txt");
    write_text_file(dec, value.decimal->str() + "\n");
    manifest.add_output(dec);
  }
  manifest.write(dir, seconds_since(start));
}

// ---------------------------------------------------------------------------
// diagnostics

void cmd_diagnostics(const RunConfig& c, const MersenneCatalog& catalog, std::ostream& out) {
  const auto start = Clock::now();
  const fs::path dir = prepare_out(c);

  DiagnosticInput input;
  input.source = source_label(c);
  const bool need_cf = !c.log_domain || !c.value_file.empty();
  const bool from_sequence = c.cf_file.empty();

  CFExpansion cf;
  if (need_cf) {
    if (from_sequence) {
      cf.quotients = sequence_terms(c.sequence, require_terms(c), catalog);
    } else {
      cf = run_cf(c, catalog);
      if (c.terms && *c.terms < cf.quotients.size()) cf.quotients.resize(*c.terms);
    }
  }

  if (c.log_domain) {
    if (from_sequence && c.sequence.kind == SequenceKind::mersenne && c.sequence.exponents.empty()) {
      input.ln_quotients = mersenne_log_quotients(catalog, require_terms(c));
    } else if (need_cf) {
      input.ln_quotients = log_quotients(cf);
    } else {
      for (const auto& t : sequence_terms(c.sequence, require_terms(c), catalog)) {
        input.ln_quotients.push_back(log_of_bigint(t));
      }
    }
    input.ln_q = log_denominators_log_domain(input.ln_quotients);
  } else {
    input.ln_quotients = log_quotients(cf);
    input.ln_q = log_denominators_exact(cf);
  }
  if (input.ln_quotients.empty()) throw DomainError("diagnostics need at least one partial quotient");

  if (!c.value_file.empty()) {
    const DecimalApprox r = read_decimal(c.value_file);
    if (cf.quotients.size() < 2) throw DomainError("delta needs at least two partial quotients");
    std::size_t from = c.delta_from.value_or(1);
    // delta needs Q_n >= 2
    if (!c.delta_from) {
      ConvergentStream s(cf.a0);
      for (std::size_t n = 1; n < cf.quotients.size(); ++n) {
        s.push(cf.quotients[n - 1]);
        if (s.q() >= 2) {
          from = n;
          break;
        }
      }
    }
    const std::size_t to = c.delta_to.value_or(cf.quotients.size() - 1);
    input.deltas = tsr_delta_series(r.as_rational(), r.precision, cf, from, to);
  }

  const DiagnosticReport report = build_diagnostic_report(input, WagstaffConstants::reference());
  if (c.summary) write_summary(out, report);
  out << "diagnostics: " << report.source << ", n = 1.." << report.records.size();
  if (report.mean_delta) {
    out << ", mean delta " << format_double(*report.mean_delta) << " over n = " << report.delta_n_from
        << ".." << report.delta_n_to;
  }
  out << '\n';

  if (dir.empty()) return;
  RunManifest manifest(c, catalog);
  const auto json_path = out_file(dir, c, "diagnostics.json");
  const auto csv_path = out_file(dir, c, "diagnostics.csv");
  const auto sum_path = out_file(dir, c, "diagnostics_summary.txt");
  write_text_file(json_path, to_json(report).dump(2) + "\n");
  std::ostringstream csv, summary;
  write_csv(csv, report);
  write_summary(summary, report);
  write_text_file(csv_path, csv.str());
  write_text_file(sum_path, summary.str());
  for (const auto& f : {json_path, csv_path, sum_path}) manifest.add_output(f);
  manifest.write(dir, seconds_since(start));
}

// ---------------------------------------------------------------------------
// resume

void cmd_resume(const fs::path& path, const MersenneCatalog& catalog, std::ostream& out,
                std::optional<std::size_t> stop_after) {
  const Checkpoint cp = Checkpoint::load(path);
  if (cp.get("catalog_sha256") != catalog_digest(catalog)) {
    throw CheckpointError("checkpoint was written with a different exponent catalog");
  }
  if (cp.get("status") == "complete") {
    out << "run already complete (" << path.string() << "); nothing to do\n";
    return;
  }
  if (cp.get("status") != "running") throw CheckpointError("unknown checkpoint status '" + cp.get("status") + "'");

  RunConfig config;
  try {
    config = run_config_from_json(parse_checkpoint_config(cp));
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("checkpoint config: ") + e.what());
  }
  config.stop_after.reset();
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();

  auto truncate_to = [](const fs::path& file, std::uint64_t offset) {
    std::error_code ec;
    const auto size = fs::file_size(file, ec);
    if (ec) throw CheckpointError("output " + file.string() + " is missing");
    if (size < offset) throw CheckpointError("output " + file.string() + " is shorter than the checkpoint");
    fs::resize_file(file, offset, ec);
    if (ec) throw CheckpointError("cannot truncate " + file.string() + ": " + ec.message());
  };

  if (cp.kind() == "cf") {
    CfRun run{config,
              dir,
              cp.get_bigint("a0"),
              EuclidExpander::resume(cp.get_bigint("a0"), cp.get_bigint("rem_a"), cp.get_bigint("rem_b"),
                                     cp.get_uint("emitted")),
              {cp.get_bigint("largest"), cp.get_uint("largest_index")},
              cp.get_uint("offset"),
              static_cast<double>(cp.get_real("elapsed"))};
    truncate_to(out_file(dir, config, "cf.txt"), run.offset);
    out << "resuming cf after " << run.expander.emitted() << " quotients\n";
    continue_cf(run, catalog, out, stop_after);
    return;
  }
  if (cp.kind() == "stats") {
    StatsRun run;
    run.config = config;
    run.dir = dir;
    const CFExpansion cf = run_cf(config, catalog);
    run.input_digest = cf_digest(cf);
    if (run.input_digest != cp.get("input_sha256")) {
      throw CheckpointError("the continued fraction input changed since the checkpoint was written");
    }
    restore_stats(run, cp);
    for (const auto& [stat, off] : run.offsets) truncate_to(out_file(dir, config, stat + ".csv"), off);
    out << "resuming stats at n = " << run.n << '\n';
    continue_stats(run, cf, catalog, out, stop_after);
    return;
  }
  throw CheckpointError("unknown checkpoint kind '" + cp.kind() + "'");
}

}  // namespace cflab
