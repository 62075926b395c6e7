#include "fkpde/sde.hpp"

#include "fkpde/parallel.hpp"

namespace fkpde {

void EulerConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("Euler time step must be positive");
  if (max_steps < 1) throw InvalidArgument("Euler step guard must be at least 1");
}

void PathWorkspace::prepare(const DiffusionProblem& problem) {
  const std::size_t d = problem.dimension();
  increment.resize(d);
  drift.resize(d);
  if (problem.constant_diagonal_diffusion()) {
    sigma_diagonal.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      sigma_diagonal[i] = problem.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    }
  }
}

SampleStatistics sample_statistics(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("statistics of an empty sample");
  const auto n = static_cast<double>(values.size());
  const double mean = pairwise_sum(values) / n;
  if (values.size() == 1) return {mean, 0.0};
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double variance = pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(variance / n)};
}

ExitTimeEstimate estimate_mean_exit_time(const DiffusionProblem& problem, std::span<const double> x,
                                         const EulerConfig& cfg, std::int64_t M, std::uint64_t run) {
  cfg.validate();
  if (M < 1) throw InvalidArgument("sample count must be at least 1");
  std::vector<double> times(static_cast<std::size_t>(M));
  std::vector<std::int64_t> steps(static_cast<std::size_t>(M));
  const auto zero = [](std::span<const double>) { return 0.0; };
  parallel_for(
      times.size(), [] { return PathWorkspace{}; },
      [&](PathWorkspace& ws, std::size_t m) {
        const StreamId id{cfg.seed, run, 0, 0, m};
        const auto s = simulate_functional(problem, zero, zero, x, cfg, id, ws);
        times[m] = s.exit_time;
        steps[m] = s.steps;
      });
  const auto stats = sample_statistics(times);
  std::int64_t total = 0;
  for (auto s : steps) total += s;
  return {stats.mean, stats.std_error, total};
}

}  // namespace fkpde
