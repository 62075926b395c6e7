#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fkpde/errors.hpp"
#include "fkpde/problem.hpp"
#include "fkpde/rng.hpp"

namespace fkpde {

struct EulerConfig {
  double dt = 1e-3;
  std::int64_t max_steps = 10'000'000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// One realisation of the discretised Feynman-Kac functional.
struct PathFunctionalSample {
  double value = 0.0;
  double exit_time = 0.0;
  std::int64_t steps = 0;
};

/// Per-worker scratch buffers for path simulation.
struct PathWorkspace {
  Point state;
  std::vector<double> increment;
  std::vector<double> drift;
  std::vector<double> sigma_diagonal;
  Eigen::MatrixXd sigma;

  void prepare(const DiffusionProblem& problem);
};

/// Euler-Maruyama path from x until it first leaves the open box, returning
/// boundary(X_n) D_n + I_n with the left-point discount and source sums
///   D_{n+1} = D_n exp(-k(X_n) dt),  I_{n+1} = I_n + source(X_n) D_n dt.
/// A start on the boundary returns boundary(x) with exit time 0.
template <class BoundaryFn, class SourceFn>
PathFunctionalSample simulate_functional(const DiffusionProblem& problem, BoundaryFn&& boundary, SourceFn&& source,
                                         std::span<const double> x, const EulerConfig& cfg, const StreamId& stream,
                                         PathWorkspace& ws) {
  const auto& box = problem.domain;
  const std::size_t d = box.dimension();
  if (x.size() != d) throw InvalidArgument("start point has the wrong dimension");
  if (!box.contains_closure(x)) throw InvalidArgument("start point lies outside the closed domain");
  if (!box.contains(x)) return {boundary(x), 0.0, 0};

  ws.prepare(problem);
  auto& X = ws.state;
  X.assign(x.begin(), x.end());
  const double dt = cfg.dt;
  const double sqrt_dt = std::sqrt(dt);
  const bool diagonal = problem.constant_diagonal_diffusion();
  const bool drift = problem.has_drift();
  const bool killing = problem.has_killing();

  GaussianStream rng(stream);
  double discount = 1.0;
  double integral = 0.0;
  for (std::int64_t n = 0;; ++n) {
    if (n >= cfg.max_steps) {
      throw NonExitError("path from the start point did not leave the domain within " +
                         std::to_string(cfg.max_steps) + " steps");
    }
    integral += source(std::span<const double>(X)) * discount * dt;
    if (killing) discount *= std::exp(-problem.killing(X) * dt);

    for (std::size_t i = 0; i < d; ++i) ws.increment[i] = sqrt_dt * rng.next();
    if (drift) problem.drift(X, ws.drift);
    if (diagonal) {
      for (std::size_t i = 0; i < d; ++i) X[i] += ws.sigma_diagonal[i] * ws.increment[i];
    } else {
      problem.diffusion_at(X, ws.sigma);
      for (std::size_t i = 0; i < d; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += ws.sigma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * ws.increment[j];
        X[i] += s;
      }
    }
    if (drift) {
      for (std::size_t i = 0; i < d; ++i) X[i] += dt * ws.drift[i];
    }

    bool finite = true;
    for (double xi : X) finite = finite && std::isfinite(xi);
    if (!finite || !std::isfinite(integral) || !std::isfinite(discount)) {
      throw NumericError("non-finite state in Euler-Maruyama path");
    }
    if (!box.contains(X)) {
      const double value = boundary(std::span<const double>(X)) * discount + integral;
      if (!std::isfinite(value)) throw NumericError("non-finite path functional value");
      return {value, static_cast<double>(n + 1) * dt, n + 1};
    }
  }
}

template <class BoundaryFn, class SourceFn>
PathFunctionalSample simulate_functional(const DiffusionProblem& problem, BoundaryFn&& boundary, SourceFn&& source,
                                         std::span<const double> x, const EulerConfig& cfg, const StreamId& stream) {
  PathWorkspace ws;
  return simulate_functional(problem, boundary, source, x, cfg, stream, ws);
}

struct ExitTimeEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t path_steps = 0;
};

/// Mean of the discrete first exit time over M streams (seed, run, 0, 0, m).
ExitTimeEstimate estimate_mean_exit_time(const DiffusionProblem& problem, std::span<const double> x,
                                         const EulerConfig& cfg, std::int64_t M, std::uint64_t run = 0);

/// Sample mean and unbiased standard error, summed pairwise in index order.
struct SampleStatistics {
  double mean = 0.0;
  double std_error = 0.0;
};
SampleStatistics sample_statistics(std::span<const double> values);

}  // namespace fkpde
