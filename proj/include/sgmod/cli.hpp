#pragma once

#include "sgmod/capacity_analysis.hpp"
#include "sgmod/density_evolution.hpp"
#include "sgmod/link_sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace sgmod {

enum class Command { De, Sic, LinkSim, Capacity, Sweep };
enum class OutputFormat { Csv, Json };

const char* to_string(Command c);

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct CapacityQuery {
  double alpha = 100.0;
  std::optional<double> s;
  std::optional<double> ebn0_db;
  double delta = 0.0;
};

/// Fully validated invocation. Only the block matching `command` is meaningful.
struct RunConfig {
  Command command = Command::De;

  // de / sic
  SystemParams system;
  Receiver receiver = Receiver::TwoStagePic;
  GridSpec grid;
  DeOptions de_options;

  // linksim
  LinkSimConfig link;
  int compare_seeds = 0;  // > 0: also average this many seeds against density evolution

  CapacityQuery capacity;
  SweepSpec sweep;

  std::filesystem::path output;
  OutputFormat format = OutputFormat::Csv;
};

/// Parse outcome: a config to run, or an exit code with the text to print
/// (help goes to stdout with code 0, errors to stderr with code 2).
struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = kExitOk;
  std::string message;
};

/**
 * Parses `sgmod <command> [options]`. A `--config FILE` INI file supplies
 * defaults with one section per command ([de], [sweep], ...); flags on the
 * command line win, and unknown keys are rejected. Relative default output
 * names are placed in $SGMOD_OUTPUT_DIR when it is set.
 */
ParseResult parse_config(const std::vector<std::string>& args);

/// Runs a parsed configuration, writes its files, and prints a one-line
/// summary to `out`. Throws on runtime failure.
void execute(const RunConfig& config, std::ostream& out);

/// parse_config + execute with the exit-code contract (0 ok, 1 runtime, 2 usage).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sgmod
