#pragma once

// Command-line front end. Exit codes: 0 success, 1 computation/domain error,
// 2 usage/config error.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "attrdesc/optimizer.hpp"
#include "attrdesc/oracle.hpp"

namespace attrdesc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

enum class Method { descent, random_search, reinforce, random_attributes };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view name);

struct RunConfig {
  std::filesystem::path config_path;
  std::string config_text;
  AttributeSchema schema;
  std::string schema_ref;
  std::string renderer = "oracle";  // "oracle", "command:...", "tcp:HOST:PORT" or a bare command
  std::optional<OracleConfig> oracle;
  std::vector<std::filesystem::path> targets;
  Method method = Method::descent;
  EvalConfig eval;
  std::optional<std::size_t> budget;
  ReinforceHyper reinforce;
  std::filesystem::path output_dir = ".";
  std::size_t jobs = 1;
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
  std::string seed_source = "default";
};

/// Parses a run configuration ([run] plus optional [oracle] section). The
/// ATTRDESC_SEED environment variable, when set, overrides the configured seed.
RunConfig load_run_config(const std::filesystem::path& path);

/// Evaluation budget the method will spend: J * sum |S_i| for descent.
std::size_t effective_budget(const RunConfig& config);

/// Entry point shared by the attrdesc binary and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace attrdesc::cli
