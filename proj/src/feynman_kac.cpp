#include "fkpde/feynman_kac.hpp"

#include <optional>

#include "fkpde/parallel.hpp"

namespace fkpde {

namespace {

struct ResidualWorker {
  PathWorkspace path;
  std::optional<ExpansionEvaluator> evaluator;
};

bool trivial(const PolynomialExpansion& p) { return p.size() == 0 || p.is_zero(); }

PathFunctionalSample run_path(const DiffusionProblem& problem, const PolynomialExpansion& u_tilde, bool plain,
                              std::span<const double> x, const EulerConfig& cfg, const StreamId& id,
                              ResidualWorker& w) {
  if (plain) {
    return simulate_functional(
        problem, [&](std::span<const double> y) { return problem.boundary(y); },
        [&](std::span<const double> y) { return problem.source(y); }, x, cfg, id, w.path);
  }
  if (!w.evaluator) w.evaluator.emplace(u_tilde);
  auto& ev = *w.evaluator;
  return simulate_functional(
      problem, [&](std::span<const double> y) { return problem.boundary(y) - ev.value(y); },
      [&](std::span<const double> y) { return problem.source(y) - ev.apply_operator(y, problem); }, x, cfg, id,
      w.path);
}

void check_inputs(const DiffusionProblem& problem, const EulerConfig& cfg, std::int64_t M) {
  cfg.validate();
  if (M < 1) throw InvalidArgument("sample count must be at least 1");
  if (!problem.boundary || !problem.source) throw InvalidArgument("problem needs boundary and source functions");
}

}  // namespace

std::vector<PointEstimate> estimate_residual_batch(const DiffusionProblem& problem,
                                                   const PolynomialExpansion& u_tilde,
                                                   std::span<const Point> points,
                                                   std::span<const std::uint64_t> point_ids, const EulerConfig& cfg,
                                                   std::int64_t M, const StreamId& stream) {
  check_inputs(problem, cfg, M);
  if (points.size() != point_ids.size()) throw InvalidArgument("one stream id per point is required");
  if (!trivial(u_tilde) && u_tilde.dimension() != problem.dimension()) {
    throw InvalidArgument("control variate dimension does not match the problem");
  }
  const bool plain = trivial(u_tilde);
  const auto m_count = static_cast<std::size_t>(M);
  std::vector<double> values(points.size() * m_count);
  std::vector<std::int64_t> steps(values.size());
  parallel_for(
      values.size(), [] { return ResidualWorker{}; },
      [&](ResidualWorker& w, std::size_t i) {
        const std::size_t p = i / m_count;
        const std::size_t m = i % m_count;
        const StreamId id{cfg.seed, stream.run, stream.iteration, point_ids[p], m};
        const auto s = run_path(problem, u_tilde, plain, points[p], cfg, id, w);
        values[i] = s.value;
        steps[i] = s.steps;
      });

  std::vector<PointEstimate> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const auto stats = sample_statistics(std::span<const double>(values).subspan(p * m_count, m_count));
    std::int64_t total = 0;
    for (std::size_t m = 0; m < m_count; ++m) total += steps[p * m_count + m];
    out[p] = {stats.mean, stats.std_error, M, total};
  }
  return out;
}

PointEstimate estimate_residual(const DiffusionProblem& problem, const PolynomialExpansion& u_tilde,
                                std::span<const double> x, const EulerConfig& cfg, std::int64_t M,
                                const StreamId& stream) {
  const Point pt(x.begin(), x.end());
  const std::uint64_t id = stream.point;
  return estimate_residual_batch(problem, u_tilde, std::span<const Point>(&pt, 1), std::span<const std::uint64_t>(&id, 1),
                                 cfg, M, stream)
      .front();
}

PointEstimate estimate_u(const DiffusionProblem& problem, std::span<const double> x, const EulerConfig& cfg,
                         std::int64_t M, const StreamId& stream) {
  return estimate_residual(problem, PolynomialExpansion{}, x, cfg, M, stream);
}

std::vector<PathFunctionalSample> sample_residual(const DiffusionProblem& problem, const PolynomialExpansion& u_tilde,
                                                  std::span<const double> x, const EulerConfig& cfg, std::int64_t M,
                                                  const StreamId& stream) {
  check_inputs(problem, cfg, M);
  const bool plain = trivial(u_tilde);
  std::vector<PathFunctionalSample> out(static_cast<std::size_t>(M));
  parallel_for(
      out.size(), [] { return ResidualWorker{}; },
      [&](ResidualWorker& w, std::size_t m) {
        const StreamId id{cfg.seed, stream.run, stream.iteration, stream.point, m};
        out[m] = run_path(problem, u_tilde, plain, x, cfg, id, w);
      });
  return out;
}

}  // namespace fkpde
