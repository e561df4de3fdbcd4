#pragma once

#include "cflab/catalog.hpp"
#include "cflab/contfrac.hpp"
#include "cflab/exact.hpp"
#include "cflab/io.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace cflab {

/// 1/q^2 in scientific notation with 10 significant digits, truncated
/// (not rounded), and at least two exponent digits: "2.131173743e-06".
std::string format_inverse_square(const BigInt& q);

/// Input value of a run: `rational` if set, else the reciprocal sum of the
/// configured sequence.
BigRational run_rational(const RunConfig& config, const MersenneCatalog& catalog);

/// Input CF of a run: `cf_file`, else the rational (or decimal file) expanded
/// in the configured mode.
CFExpansion run_cf(const RunConfig& config, const MersenneCatalog& catalog);

// Each command writes its files under config.out (when set) plus a
// manifest.json, and prints a short report to `out`.  Errors are thrown as
// ConfigError / PrecisionError / CheckpointError / DomainError.
void cmd_sum(const RunConfig& config, const MersenneCatalog& catalog, std::ostream& out);
void cmd_cf(const RunConfig& config, const MersenneCatalog& catalog, std::ostream& out);
void cmd_stats(const RunConfig& config, const MersenneCatalog& catalog, std::ostream& out);
void cmd_um(const RunConfig& config, const MersenneCatalog& catalog, std::ostream& out);
void cmd_diagnostics(const RunConfig& config, const MersenneCatalog& catalog, std::ostream& out);
/// Continues an interrupted cf or stats run; a finished run is left alone.
void cmd_resume(const std::filesystem::path& checkpoint, const MersenneCatalog& catalog,
                std::ostream& out, std::optional<std::size_t> stop_after = std::nullopt);

/// Full command line (args[0] is the subcommand).  Returns the exit code:
/// 0 ok, 1 other failure, 2 config error, 3 precision audit, 4 checkpoint.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cflab
