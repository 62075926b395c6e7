#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "config.hpp"
#include "fkpde/errors.hpp"
#include "fkpde/parallel.hpp"

namespace {

int fail(const char* kind, const std::string& message, int code) {
  std::cerr << nlohmann::json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feynman-Kac Monte-Carlo solver with sequential control variates and adaptive sparse interpolation",
               "fkpde"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run the solver described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Master seed (overrides the config and FKPDE_SEED)");
  run->add_option("--threads", threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "Output directory (overrides the config)");

  std::vector<std::string> traces;
  std::string key = "step";
  auto* cmp = app.add_subcommand("compare", "Merge traces side by side");
  cmp->add_option("traces", traces, "trace.csv files")->required();
  cmp->add_option("--key", key, "Alignment column")->check(CLI::IsMember({"step", "card_lambda"}));

  auto* problems = app.add_subcommand("problems", "List registered problems");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      auto config = fkpde::cli::load_config(config_path);
      fkpde::cli::apply_seed_overrides(config, seed);
      if (out_dir) config.output = *out_dir;
      if (threads) fkpde::set_num_threads(*threads);
      const auto report = fkpde::cli::run(config);
      std::cerr << report.algorithm << ": " << report.records.size() << " records, stop: " << report.stop_reason
                << ", output: " << config.output << '\n';
    } else if (*cmp) {
      fkpde::cli::compare(traces, key, std::cout, std::cerr);
    } else if (*problems) {
      fkpde::cli::list_problems(std::cout);
    }
  } catch (const fkpde::NonExitError& e) {
    return fail("non-exit", e.what(), 4);
  } catch (const fkpde::SolverError& e) {
    return fail("numeric", e.what(), 3);
  } catch (const fkpde::InvalidArgument& e) {
    return fail("config", e.what(), 2);
  } catch (const nlohmann::json::exception& e) {
    return fail("config", e.what(), 2);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 1);
  }
  return 0;
}
