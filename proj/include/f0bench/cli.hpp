#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "f0bench/harness.hpp"

namespace f0bench {

enum class Subcommand { synth, estimate, sweep, stats };

struct CliInvocation {
  Subcommand subcommand = Subcommand::synth;
  std::optional<std::filesystem::path> config_path;
  std::filesystem::path input_path;
  std::filesystem::path output_path;  // "-" writes to the given stream
  Method method = Method::iec;
  GroupVar group_by = GroupVar::f_m;
  Profile profile = Profile::desk;
  std::vector<std::pair<std::string, std::string>> overrides;  // dotted key, value
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
};

/// Thrown by parse_cli for --help; what() is the formatted help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses argv. Throws CLI::ParseError subclasses on bad usage.
CliInvocation parse_cli(int argc, const char* const* argv);

/// Executes the invocation; diagnostics go to `err`. Returns the exit status.
int run_cli(const CliInvocation& invocation, std::ostream& out, std::ostream& err);

/// parse_cli + run_cli, with usage errors mapped to an exit status.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace f0bench
