#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fkpde/poly1d.hpp"
#include "fkpde/solvers.hpp"
#include "json.hpp"

namespace fkpde::cli {

enum class SolverKind { ScvFixed, AdaptiveExact, AdaptivePerturbed, ScvAdaptive };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

/// How scv-fixed obtains its index set.
struct IndexSetSpec {
  std::string kind = "adaptive";  // adaptive | total-degree | tensor | file
  int degree = 2;                 // total-degree, tensor
  std::size_t card = 26;          // adaptive: largest adaptive set with at most this many indices
  std::string path;               // file
};

struct RunConfig {
  std::string problem = "tc1";
  SolverKind solver = SolverKind::AdaptivePerturbed;
  std::uint64_t seed = 0;
  PointFamily family = PointFamily::OffsetLeja;
  std::int64_t error_samples = 100000;
  bool timing = false;
  std::string output = "out";
  SCVConfig scv;
  AdaptiveConfig adaptive;
  IndexSetSpec index_set;
  std::string initial;  // optional warm-start expansion file for scv-fixed

  void validate() const;
};

/// Raised for malformed or out-of-range configuration.
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// Parses a JSON config. A "preset" key merges the named preset underneath
/// the remaining keys. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Fully resolved config; parse_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

/// Names of the shipped presets.
std::vector<std::string> preset_names();
nlohmann::json preset(const std::string& name);

/// Applies FKPDE_SEED (if set) and then the command-line seed (if given).
void apply_seed_overrides(RunConfig& config, std::optional<std::uint64_t> cli_seed);

}  // namespace fkpde::cli
