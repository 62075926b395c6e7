#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"
#include "fkpde/problem.hpp"
#include "fkpde/solvers.hpp"

namespace fkpde::cli {

inline constexpr const char* kTraceHeader = "step,card_lambda,epsilon_n,stagnation,l2_error,linf_error,path_steps,wall_ms";

/// One row per record, 17 significant digits. wall_ms is written as 0
/// unless `timing` is set, so traces stay byte-reproducible.
void write_trace(std::ostream& out, const SolverReport& report, bool timing);

/// Index set used by scv-fixed.
MultiIndexSet resolve_index_set(const RunConfig& config, const DiffusionProblem& problem);

/// Runs the configured solver and writes trace.csv, solution.expansion and
/// run.json into the output directory.
SolverReport run(const RunConfig& config);

struct Trace {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
Trace read_trace(const std::string& path);

/// Joins traces on `key` (step or card_lambda) and writes their error columns
/// side by side with differences to the first trace. Rows whose key is not
/// present in every trace are dropped with a note on `diag`.
void compare(const std::vector<std::string>& paths, const std::string& key, std::ostream& out, std::ostream& diag);

void list_problems(std::ostream& out);

}  // namespace fkpde::cli
