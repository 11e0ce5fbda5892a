#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qdim::cli {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

enum ExitCode : int {
  kOk = 0,
  kMalformedSpec = 1,
  kNumericalFailure = 2,
  kVerificationGap = 3,
};

struct CommandSpec {
  std::string subcommand;
  std::string system_path;
  /// Empty: write to stdout.
  std::string out_path;
  std::optional<double> q;
  std::optional<double> t;
  std::optional<double> r;
  std::vector<std::size_t> n_list;
  std::vector<std::size_t> m_list;
  std::optional<std::size_t> depth;
  std::optional<std::size_t> samples;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tol;
  unsigned threads = 1;
  /// Largest accepted relative gap |D_hat - kappa_r| / kappa_r in `verify`.
  double gap = 0.15;
};

/// Parses argv into a CommandSpec; throws qdim::SpecError on bad usage.
/// Returns std::nullopt when help was requested (text written to `out`).
[[nodiscard]] std::optional<CommandSpec> parse_command_line(const std::vector<std::string>& args,
                                                            std::ostream& out);

/// Runs one command; artifacts go to spec.out_path or `out`.
[[nodiscard]] int run_command(const CommandSpec& spec, std::ostream& out, std::ostream& err);

/// parse_command_line + run_command with exit-code mapping.
[[nodiscard]] int run_cli(const std::vector<std::string>& args, std::ostream& out,
                          std::ostream& err);

}  // namespace qdim::cli
