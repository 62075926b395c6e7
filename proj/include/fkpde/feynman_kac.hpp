#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fkpde/interp.hpp"
#include "fkpde/problem.hpp"
#include "fkpde/rng.hpp"
#include "fkpde/sde.hpp"

namespace fkpde {

/// Monte-Carlo estimate of a pointwise value. The spread of the mean is the
/// sampling error; its offset from the true value is the time-step bias.
struct PointEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::int64_t path_steps = 0;
};

// All estimators draw sample m from the stream
// {cfg.seed, stream.run, stream.iteration, stream.point, m}; the `seed` and
// `sample` fields of the passed StreamId are ignored.

/// u_{dt,M}(x): boundary f, source g.
PointEstimate estimate_u(const DiffusionProblem& problem, std::span<const double> x, const EulerConfig& cfg,
                         std::int64_t M, const StreamId& stream = {});

/// e^k_{dt,M}(x) for the residual problem of u_tilde: boundary f - u_tilde,
/// source g - A(u_tilde). A zero u_tilde reproduces estimate_u exactly.
PointEstimate estimate_residual(const DiffusionProblem& problem, const PolynomialExpansion& u_tilde,
                                std::span<const double> x, const EulerConfig& cfg, std::int64_t M,
                                const StreamId& stream = {});

/// The individual path functionals behind estimate_residual.
std::vector<PathFunctionalSample> sample_residual(const DiffusionProblem& problem, const PolynomialExpansion& u_tilde,
                                                  std::span<const double> x, const EulerConfig& cfg, std::int64_t M,
                                                  const StreamId& stream = {});

/// estimate_residual at many points in one parallel batch; point j uses
/// stream.point = point_ids[j].
std::vector<PointEstimate> estimate_residual_batch(const DiffusionProblem& problem,
                                                   const PolynomialExpansion& u_tilde,
                                                   std::span<const Point> points,
                                                   std::span<const std::uint64_t> point_ids, const EulerConfig& cfg,
                                                   std::int64_t M, const StreamId& stream);

}  // namespace fkpde
