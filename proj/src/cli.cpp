#include "cflab/commands.hpp"
#include "cflab/error.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>

namespace cflab {

namespace {

// Raw command-line values; only options actually given override the config file.
struct Flags {
  std::string config;
  std::string preset;
  std::string kind;
  std::size_t count = 0;
  std::string out;
  std::size_t precision = 0;
  std::size_t terms = 0;
  std::string mode;
  std::size_t stride = 1;
  std::string name;
  std::size_t checkpoint_interval = 0;
  std::size_t stop_after = 0;
  std::vector<std::uint64_t> exponents;
  std::vector<std::string> which;
  std::uint64_t kuzmin_max = 0;
  std::string rational;
  std::string cf_file;
  std::string decimal_file;
  std::string value_file;
  std::size_t delta_from = 0;
  std::size_t delta_to = 0;
  bool exact = false;
  bool log_domain = false;
  bool summary = false;
  std::string checkpoint;

  CLI::App* chosen = nullptr;

  // `option` is the option name as registered: "--precision", "count", ...
  bool given(const std::string& option) const {
    const CLI::Option* o = chosen->get_option_no_throw(option);
    return o != nullptr && o->count() > 0;
  }
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run configuration");
  sub->add_option("--preset", f.preset, "desk or stretch defaults");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--precision,--digits", f.precision, "decimal digits d");
  sub->add_option("--terms", f.terms, "number of sequence terms");
  sub->add_option("--mode", f.mode, "exact, certified or paper");
  sub->add_option("--stride", f.stride, "emit every k-th point");
  sub->add_option("--name", f.name, "file name stem for outputs");
  sub->add_option("--exponents", f.exponents, "explicit exponent list")->delimiter(',');
  sub->add_option("--checkpoint-interval", f.checkpoint_interval, "steps between checkpoints");
  sub->add_option("--stop-after", f.stop_after, "stop (resumably) after N steps");
}

void add_sequence_positionals(CLI::App* sub, Flags& f) {
  sub->add_option("sequence", f.kind, "mersenne, dyadic, fibonacci-power, factorial-power, custom");
  sub->add_option("count", f.count, "number of terms");
}

RunConfig build_config(const std::string& command, const Flags& f) {
  RunConfig c;
  if (f.given("--config")) c = load_run_config(f.config);
  c.command = command;
  if (f.given("--preset")) c.preset = f.preset;
  if (f.given("sequence")) c.sequence.kind = parse_sequence_kind(f.kind);
  if (f.given("count")) c.terms = f.count;
  if (f.given("--terms")) c.terms = f.terms;
  if (f.given("--out")) c.out = f.out;
  if (f.given("--precision")) c.precision = f.precision;
  if (f.given("--mode")) c.mode = parse_expansion_mode(f.mode);
  if (f.given("--stride")) c.stride = f.stride;
  if (f.given("--name")) c.name = f.name;
  if (f.given("--exponents")) c.sequence.exponents = f.exponents;
  if (f.given("--checkpoint-interval")) c.checkpoint_interval = f.checkpoint_interval;
  if (f.given("--stop-after")) c.stop_after = f.stop_after;
  if (f.given("--which")) {
    c.statistics.clear();
    for (const auto& w : f.which) c.statistics.push_back(w);
  }
  if (f.given("--kuzmin-max")) c.kuzmin_max = f.kuzmin_max;
  if (f.given("--rational")) c.rational = f.rational;
  if (f.given("--cf")) c.cf_file = f.cf_file;
  if (f.given("--decimal")) c.decimal_file = f.decimal_file;
  if (f.given("--value")) c.value_file = f.value_file;
  if (f.given("--delta-from")) c.delta_from = f.delta_from;
  if (f.given("--delta-to")) c.delta_to = f.delta_to;
  if (f.given("--exact")) c.exact_decimal = true;
  if (f.given("--log-domain")) c.log_domain = true;
  if (f.given("--summary")) c.summary = true;
  c.apply_preset();
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cflab: continued fractions of reciprocal sums and their statistics", "cflab"};
  app.require_subcommand(1);
  Flags f;

  auto* sum = app.add_subcommand("sum", "exact reciprocal sum and its decimal expansion");
  add_sequence_positionals(sum, f);
  add_common(sum, f);
  sum->add_flag("--exact", f.exact, "full terminating expansion (dyadic sums)");
  sum->add_option("--rational", f.rational, "use p/q instead of a sequence");

  auto* cf = app.add_subcommand("cf", "continued fraction expansion");
  add_sequence_positionals(cf, f);
  add_common(cf, f);
  cf->add_option("--rational", f.rational, "expand p/q");
  cf->add_option("--decimal", f.decimal_file, "expand a decimal value read from a file");

  auto* stats = app.add_subcommand("stats", "running statistics of a continued fraction");
  add_sequence_positionals(stats, f);
  add_common(stats, f);
  stats->add_option("--which", f.which, "khinchin,levy,signs,records,kuzmin,digits")->delimiter(',');
  stats->add_option("--cf", f.cf_file, "continued fraction text file");
  stats->add_option("--rational", f.rational, "expand p/q");
  stats->add_option("--decimal", f.decimal_file, "decimal value file (digit census input)");
  stats->add_option("--kuzmin-max", f.kuzmin_max, "largest histogram bucket");

  auto* um = app.add_subcommand("um", "value of the continued fraction with quotients taken from a sequence");
  add_sequence_positionals(um, f);
  add_common(um, f);

  auto* diag = app.add_subcommand("diagnostics", "growth and approximation diagnostics");
  add_sequence_positionals(diag, f);
  add_common(diag, f);
  diag->add_option("--cf", f.cf_file, "continued fraction text file");
  diag->add_option("--value", f.value_file, "decimal value of r for delta(r; n)");
  diag->add_flag("--log-domain", f.log_domain, "never form Q_n");
  diag->add_flag("--summary", f.summary, "print running maxima and constants");
  diag->add_option("--delta-from", f.delta_from, "first n for delta");
  diag->add_option("--delta-to", f.delta_to, "last n for delta");

  auto* resume = app.add_subcommand("resume", "continue an interrupted cf or stats run");
  resume->add_option("checkpoint", f.checkpoint, "checkpoint file")->required();
  resume->add_option("--stop-after", f.stop_after, "stop (resumably) after N steps");

  std::vector<std::string> argv_storage{"cflab"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  f.chosen = app.get_subcommands().front();
  try {
    const MersenneCatalog catalog = load_catalog_from_environment();
    const std::string command = f.chosen->get_name();
    if (command == "resume") {
      std::optional<std::size_t> stop;
      if (f.given("--stop-after")) stop = f.stop_after;
      cmd_resume(f.checkpoint, catalog, out, stop);
      return 0;
    }
    const RunConfig config = build_config(command, f);
    config.validate(catalog);
    if (command == "sum") cmd_sum(config, catalog, out);
    else if (command == "cf") cmd_cf(config, catalog, out);
    else if (command == "stats") cmd_stats(config, catalog, out);
    else if (command == "um") cmd_um(config, catalog, out);
    else if (command == "diagnostics") cmd_diagnostics(config, catalog, out);
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const PrecisionError& e) {
    err << "precision error: " << e.what() << '\n';
    return 3;
  } catch (const CheckpointError& e) {
    err << "checkpoint error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cflab
