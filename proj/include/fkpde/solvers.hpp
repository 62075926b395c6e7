#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fkpde/feynman_kac.hpp"
#include "fkpde/interp.hpp"
#include "fkpde/multiindex.hpp"
#include "fkpde/problem.hpp"

namespace fkpde {

struct SCVConfig {
  int K = 30;
  double eps_tol = 1e-6;
  int n_s = 5;
  EulerConfig euler;
  std::int64_t M = 1000;

  void validate() const;
};

struct AdaptiveConfig {
  double theta = 0.5;
  double eps = 1e-10;
  int N = 50;
  int degree_cap = 30;
  int n_inner = 15;

  void validate() const;
};

/// Estimates of the residual solution at a batch of points for the control
/// variate u_tilde. Point j is identified by point_ids[j]; `stream` carries
/// the run and iteration tags.
using ResidualEstimator = std::function<std::vector<PointEstimate>(
    const PolynomialExpansion& u_tilde, std::span<const Point> points, std::span<const std::uint64_t> point_ids,
    const StreamId& stream)>;

/// Feynman-Kac Monte-Carlo residual estimates with cfg.euler and cfg.M.
ResidualEstimator monte_carlo_estimator(const DiffusionProblem& problem, const SCVConfig& cfg);
/// exact(x) - u_tilde(x) with zero standard error; the noise-free limit.
ResidualEstimator exact_residual_estimator(ScalarField exact);

/// Sampled L2 (uniform probability measure) and sup-norm errors over a fixed
/// set of uniform points of the box. The points and exact values are drawn
/// once, so successive calls compare approximations on the same sample.
class ErrorSampler {
 public:
  ErrorSampler(const Box& domain, ScalarField exact, std::int64_t n_samples, const StreamId& stream);

  struct Norms {
    double l2 = 0.0;
    double linf = 0.0;
  };
  Norms operator()(const PolynomialExpansion& p) const;

 private:
  std::vector<Point> points_;
  std::vector<double> exact_;
};

ErrorSampler::Norms error_norms(const PolynomialExpansion& p, const ScalarField& exact, std::int64_t n_samples,
                                const StreamId& stream);

struct StepRecord {
  int step = 0;
  std::size_t card_lambda = 0;
  double epsilon_n = std::numeric_limits<double>::quiet_NaN();
  double stagnation = std::numeric_limits<double>::quiet_NaN();
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  double linf_error = std::numeric_limits<double>::quiet_NaN();
  std::int64_t path_steps = 0;  // cumulative
  double wall_ms = 0.0;         // cumulative
};

struct SolverReport {
  std::string algorithm;
  std::vector<StepRecord> records;
  /// Index set after each record (Lambda_{n+1} for the adaptive drivers).
  std::vector<MultiIndexSet> lambdas;
  PolynomialExpansion solution;
  std::string stop_reason;
};

struct SolverOptions {
  PointFamily family = PointFamily::OffsetLeja;
  std::uint64_t run = 0;
  /// Empty means Monte-Carlo estimation on the problem.
  ResidualEstimator estimator;
  /// Reference solution for the error columns; empty leaves them NaN.
  ScalarField exact;
  std::int64_t error_samples = 100000;
  std::uint64_t error_seed = 0;
};

/// Sequential control variates on a fixed index set. Starts from `initial`
/// (zero when absent) and stops after K iterations or n_s consecutive
/// stagnations ||e^k|| <= eps_tol ||u^{k-1}||.
SolverReport scv_fixed(const MultiIndexSet& lambda, const DiffusionProblem& problem, const SCVConfig& cfg,
                       const SolverOptions& options = {},
                       const std::optional<PolynomialExpansion>& initial = std::nullopt);

/// Interpolant on a downward-closed set for adaptive step n.
using InterpolantProvider = std::function<PolynomialExpansion(const MultiIndexSet& set, int n)>;
/// Path steps spent by a provider so far.
using CostCounter = std::function<std::int64_t()>;

/// Bulk-chasing adaptive interpolation driven by `provide`. `reported` gives
/// the approximation reported for Lambda_{n+1} from the Lambda* interpolant.
SolverReport adaptive_interpolation(std::size_t dimension, const Box& domain, const AdaptiveConfig& cfg,
                                    const InterpolantProvider& provide,
                                    const std::function<PolynomialExpansion(const MultiIndexSet& next,
                                                                            const PolynomialExpansion& star, int n)>&
                                        reported,
                                    const SolverOptions& options, const CostCounter& cost = {});

/// Smallest prefix of the margin, ranked by squared coefficient (ties in
/// canonical order), holding at least theta of the margin energy.
MultiIndexSet bulk_select(const PolynomialExpansion& p, const MultiIndexSet& margin, double theta);

/// Adaptive interpolation of a deterministic function; node values are
/// evaluated once and recycled across steps.
SolverReport adaptive_exact(const ScalarField& eval, const Box& domain, const AdaptiveConfig& cfg,
                            const SolverOptions& options = {});

/// Adaptive interpolation where each interpolant is a fresh scv_fixed run on
/// Lambda* and on Lambda_{n+1}.
SolverReport adaptive_perturbed(const DiffusionProblem& problem, const AdaptiveConfig& cfg_a, const SCVConfig& cfg_s,
                                const SolverOptions& options = {});

/// Sequential control variates whose correction at iteration k is an
/// adaptive interpolant (at most n_inner steps) of cached residual estimates.
SolverReport scv_adaptive(const DiffusionProblem& problem, const SCVConfig& cfg_s, const AdaptiveConfig& cfg_a,
                          const SolverOptions& options = {});

}  // namespace fkpde
