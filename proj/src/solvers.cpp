#include "fkpde/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "fkpde/errors.hpp"
#include "fkpde/parallel.hpp"

namespace fkpde {

void SCVConfig::validate() const {
  if (K < 1) throw InvalidArgument("K must be at least 1");
  if (!(eps_tol > 0.0)) throw InvalidArgument("eps_tol must be positive");
  if (n_s < 1) throw InvalidArgument("n_s must be at least 1");
  if (M < 1) throw InvalidArgument("M must be at least 1");
  euler.validate();
}

void AdaptiveConfig::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidArgument("theta must lie in (0, 1)");
  if (!(eps >= 0.0)) throw InvalidArgument("eps must be non-negative");
  if (N < 1) throw InvalidArgument("N must be at least 1");
  if (degree_cap < 1) throw InvalidArgument("degree cap must be at least 1");
  if (n_inner < 1) throw InvalidArgument("n_inner must be at least 1");
}

namespace {

// Tags separating the purposes that draw from the master seed.
constexpr std::uint64_t kErrorStream = 0x6572726f72ULL;

std::uint64_t derive_run(std::uint64_t run, std::uint64_t tag) { return splitmix64(run ^ splitmix64(tag)); }

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::optional<ErrorSampler> make_sampler(const Box& domain, const SolverOptions& options) {
  if (!options.exact) return std::nullopt;
  return ErrorSampler(domain, options.exact, options.error_samples, StreamId{options.error_seed, kErrorStream});
}

void fill_errors(StepRecord& r, const std::optional<ErrorSampler>& sampler, const PolynomialExpansion& p) {
  if (!sampler) return;
  const auto norms = (*sampler)(p);
  r.l2_error = norms.l2;
  r.linf_error = norms.linf;
}

std::vector<std::uint64_t> node_ids(const MultiIndexSet& set) {
  std::vector<std::uint64_t> ids;
  ids.reserve(set.size());
  for (const auto& nu : set) ids.push_back(fingerprint(nu));
  return ids;
}

}  // namespace

ResidualEstimator monte_carlo_estimator(const DiffusionProblem& problem, const SCVConfig& cfg) {
  return [problem, euler = cfg.euler, M = cfg.M](const PolynomialExpansion& u_tilde, std::span<const Point> points,
                                                 std::span<const std::uint64_t> ids, const StreamId& stream) {
    return estimate_residual_batch(problem, u_tilde, points, ids, euler, M, stream);
  };
}

ResidualEstimator exact_residual_estimator(ScalarField exact) {
  if (!exact) throw InvalidArgument("exact residual estimator needs a function");
  return [exact = std::move(exact)](const PolynomialExpansion& u_tilde, std::span<const Point> points,
                                    std::span<const std::uint64_t>, const StreamId&) {
    std::vector<PointEstimate> out(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      const double control = u_tilde.size() == 0 ? 0.0 : evaluate(u_tilde, points[j]);
      out[j] = {exact(points[j]) - control, 0.0, 1, 0};
    }
    return out;
  };
}

ErrorSampler::ErrorSampler(const Box& domain, ScalarField exact, std::int64_t n_samples, const StreamId& stream) {
  domain.validate();
  if (!exact) throw InvalidArgument("error sampler needs a reference function");
  if (n_samples < 1) throw InvalidArgument("error sample count must be at least 1");
  const std::size_t d = domain.dimension();
  points_.resize(static_cast<std::size_t>(n_samples));
  exact_.resize(points_.size());
  parallel_for(
      points_.size(), [] { return 0; },
      [&](int&, std::size_t i) {
        StreamId id = stream;
        id.sample = i;
        GaussianStream rng(id);
        Point x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = domain.lower[j] + (domain.upper[j] - domain.lower[j]) * rng.uniform();
        exact_[i] = exact(x);
        points_[i] = std::move(x);
      });
}

ErrorSampler::Norms ErrorSampler::operator()(const PolynomialExpansion& p) const {
  std::vector<double> sq(points_.size());
  std::vector<double> abs_diff(points_.size());
  const bool empty = p.size() == 0;
  parallel_for(
      points_.size(), [&] { return empty ? std::optional<ExpansionEvaluator>{} : std::optional<ExpansionEvaluator>(p); },
      [&](std::optional<ExpansionEvaluator>& ev, std::size_t i) {
        const double approx = ev ? ev->value(points_[i]) : 0.0;
        const double diff = exact_[i] - approx;
        sq[i] = diff * diff;
        abs_diff[i] = std::abs(diff);
      });
  Norms n;
  n.l2 = std::sqrt(pairwise_sum(sq) / static_cast<double>(sq.size()));
  n.linf = *std::max_element(abs_diff.begin(), abs_diff.end());
  return n;
}

ErrorSampler::Norms error_norms(const PolynomialExpansion& p, const ScalarField& exact, std::int64_t n_samples,
                                const StreamId& stream) {
  return ErrorSampler(p.domain(), exact, n_samples, stream)(p);
}

SolverReport scv_fixed(const MultiIndexSet& lambda, const DiffusionProblem& problem, const SCVConfig& cfg,
                       const SolverOptions& options, const std::optional<PolynomialExpansion>& initial) {
  cfg.validate();
  if (lambda.dimension() != problem.dimension()) throw InvalidArgument("index set dimension does not match the problem");
  Stopwatch clock;
  const TensorGrid grid(lambda, problem.domain, options.family);
  const CollocationSystem system(grid);
  const auto ids = node_ids(lambda);
  const ResidualEstimator estimator = options.estimator ? options.estimator : monte_carlo_estimator(problem, cfg);
  const auto sampler = make_sampler(problem.domain, options);

  SolverReport report;
  report.algorithm = "scv-fixed";
  PolynomialExpansion u = initial ? *initial : PolynomialExpansion::zero(lambda, problem.domain);
  if (u.dimension() != problem.dimension()) throw InvalidArgument("initial expansion dimension does not match");
  std::int64_t path_steps = 0;
  int stagnations = 0;
  report.stop_reason = "max-iterations";
  std::vector<double> values(grid.size());
  for (int k = 1; k <= cfg.K; ++k) {
    const auto est = estimator(u, grid.points(), ids, StreamId{0, options.run, static_cast<std::uint64_t>(k), 0, 0});
    for (std::size_t j = 0; j < est.size(); ++j) {
      values[j] = est[j].mean;
      path_steps += est[j].path_steps;
    }
    const PolynomialExpansion e = interpolate(grid, system, values);
    const double previous = u.l2_norm();
    const double delta = e.l2_norm();
    PolynomialExpansion next = u + e;

    StepRecord r;
    r.step = k;
    r.card_lambda = lambda.size();
    bool stagnated = false;
    if (previous > 0.0) {
      r.stagnation = delta / previous;
      stagnated = delta <= cfg.eps_tol * previous;
    } else {
      r.stagnation = delta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      stagnated = next.l2_norm() == 0.0;
    }
    u = std::move(next);
    fill_errors(r, sampler, u);
    r.path_steps = path_steps;
    r.wall_ms = clock.elapsed_ms();
    report.records.push_back(r);
    report.lambdas.push_back(u.set());

    stagnations = stagnated ? stagnations + 1 : 0;
    if (stagnations >= cfg.n_s) {
      report.stop_reason = "stagnation";
      break;
    }
  }
  report.solution = std::move(u);
  return report;
}

MultiIndexSet bulk_select(const PolynomialExpansion& p, const MultiIndexSet& margin, double theta) {
  if (margin.empty()) throw InvalidArgument("bulk selection needs a non-empty margin");
  const double total = energy(p, margin);
  struct Entry {
    long long rank;
    double weight;
    const MultiIndex* nu;
  };
  std::vector<Entry> entries;
  entries.reserve(margin.size());
  for (const auto& nu : margin) {
    const double c = p.coefficient(nu);
    const double w = c * c;
    // Energies equal to 12 relative digits count as ties, so rounding noise
    // does not reorder symmetric coefficients.
    const long long rank = total > 0.0 ? std::llround(w / total * 1e12) : 0;
    entries.push_back({rank, w, &nu});
  }
  // Margin members already come in canonical order; a stable sort keeps it
  // among ties.
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.rank > b.rank; });
  std::vector<MultiIndex> chosen;
  double captured = 0.0;
  for (const auto& e : entries) {
    chosen.push_back(*e.nu);
    captured += e.weight;
    if (captured >= theta * total) break;
  }
  return MultiIndexSet(margin.dimension(), std::move(chosen));
}

SolverReport adaptive_interpolation(
    std::size_t dimension, const Box& domain, const AdaptiveConfig& cfg, const InterpolantProvider& provide,
    const std::function<PolynomialExpansion(const MultiIndexSet&, const PolynomialExpansion&, int)>& reported,
    const SolverOptions& options, const CostCounter& cost) {
  cfg.validate();
  domain.validate();
  if (domain.dimension() != dimension) throw InvalidArgument("box dimension does not match");
  Stopwatch clock;
  const auto sampler = make_sampler(domain, options);

  SolverReport report;
  report.algorithm = "adaptive";
  report.stop_reason = "max-steps";
  MultiIndexSet lambda = MultiIndexSet::root(dimension);
  for (int n = 1; n <= cfg.N; ++n) {
    const MultiIndexSet margin = reduced_margin(lambda);
    const MultiIndexSet star = set_union(lambda, margin);
    const PolynomialExpansion p = provide(star, n);
    const double e_margin = energy(p, margin);
    const double e_star = energy(p, star);

    double eps_n = 0.0;
    MultiIndexSet next = lambda;
    if (e_star > 0.0) {
      eps_n = e_margin / e_star;
      const MultiIndexSet selected = bulk_select(p, margin, cfg.theta);
      for (const auto& nu : selected) {
        if (nu.max_degree() > cfg.degree_cap) throw DegreeCapExceeded(nu.max_degree(), cfg.degree_cap);
      }
      next = set_union(lambda, selected);
    }

    PolynomialExpansion approx = reported(next, p, n);
    StepRecord r;
    r.step = n;
    r.card_lambda = next.size();
    r.epsilon_n = eps_n;
    fill_errors(r, sampler, approx);
    r.path_steps = cost ? cost() : 0;
    r.wall_ms = clock.elapsed_ms();
    report.records.push_back(r);
    report.lambdas.push_back(next);
    report.solution = std::move(approx);
    lambda = std::move(next);

    if (e_star == 0.0) {
      report.stop_reason = "zero-interpolant";
      break;
    }
    if (eps_n <= cfg.eps) {
      report.stop_reason = "tolerance";
      break;
    }
  }
  return report;
}

namespace {

// Node values keyed by multi-index; nested grids make the node of an index
// independent of the set it belongs to.
using NodeCache = std::unordered_map<MultiIndex, double, MultiIndexHash>;

PolynomialExpansion restrict_star(const MultiIndexSet& next, const PolynomialExpansion& star, int) {
  return star.restricted(next);
}

}  // namespace

SolverReport adaptive_exact(const ScalarField& eval, const Box& domain, const AdaptiveConfig& cfg,
                            const SolverOptions& options) {
  if (!eval) throw InvalidArgument("adaptive interpolation needs a function");
  NodeCache cache;
  auto provide = [&](const MultiIndexSet& set, int) {
    const TensorGrid grid(set, domain, options.family);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      auto [it, inserted] = cache.try_emplace(set[i], 0.0);
      if (inserted) it->second = eval(grid.point(i));
      values[i] = it->second;
    }
    return interpolate(grid, values);
  };
  auto report = adaptive_interpolation(domain.dimension(), domain, cfg, provide, restrict_star, options);
  report.algorithm = "adaptive-exact";
  return report;
}

SolverReport adaptive_perturbed(const DiffusionProblem& problem, const AdaptiveConfig& cfg_a, const SCVConfig& cfg_s,
                                const SolverOptions& options) {
  cfg_s.validate();
  std::int64_t path_steps = 0;
  SolverOptions inner = options;
  inner.exact = nullptr;
  auto run_scv = [&](const MultiIndexSet& set, std::uint64_t tag) {
    inner.run = derive_run(options.run, tag);
    auto r = scv_fixed(set, problem, cfg_s, inner);
    if (!r.records.empty()) path_steps += r.records.back().path_steps;
    return std::move(r.solution);
  };
  auto provide = [&](const MultiIndexSet& star, int n) { return run_scv(star, 2 * static_cast<std::uint64_t>(n)); };
  auto reported = [&](const MultiIndexSet& next, const PolynomialExpansion&, int n) {
    return run_scv(next, 2 * static_cast<std::uint64_t>(n) + 1);
  };
  auto report = adaptive_interpolation(problem.dimension(), problem.domain, cfg_a, provide, reported, options,
                                       [&] { return path_steps; });
  report.algorithm = "adaptive-perturbed";
  return report;
}

SolverReport scv_adaptive(const DiffusionProblem& problem, const SCVConfig& cfg_s, const AdaptiveConfig& cfg_a,
                          const SolverOptions& options) {
  cfg_s.validate();
  cfg_a.validate();
  Stopwatch clock;
  const ResidualEstimator estimator = options.estimator ? options.estimator : monte_carlo_estimator(problem, cfg_s);
  const auto sampler = make_sampler(problem.domain, options);
  AdaptiveConfig inner_cfg = cfg_a;
  inner_cfg.N = cfg_a.n_inner;
  SolverOptions inner_options = options;
  inner_options.exact = nullptr;

  SolverReport report;
  report.algorithm = "scv-adaptive";
  report.stop_reason = "max-iterations";
  PolynomialExpansion u;  // empty: the zero function
  std::int64_t path_steps = 0;
  int stagnations = 0;
  for (int k = 1; k <= cfg_s.K; ++k) {
    NodeCache cache;
    auto provide = [&](const MultiIndexSet& set, int) {
      const TensorGrid grid(set, problem.domain, options.family);
      std::vector<Point> points;
      std::vector<std::uint64_t> ids;
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        if (cache.contains(set[i])) continue;
        points.push_back(grid.point(i));
        ids.push_back(fingerprint(set[i]));
        slots.push_back(i);
      }
      if (!points.empty()) {
        const auto est = estimator(u, points, ids, StreamId{0, options.run, static_cast<std::uint64_t>(k), 0, 0});
        for (std::size_t j = 0; j < est.size(); ++j) {
          cache.emplace(set[slots[j]], est[j].mean);
          path_steps += est[j].path_steps;
        }
      }
      std::vector<double> values(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) values[i] = cache.at(set[i]);
      return interpolate(grid, values);
    };
    const auto inner = adaptive_interpolation(problem.dimension(), problem.domain, inner_cfg, provide, restrict_star,
                                              inner_options);
    const PolynomialExpansion& e = inner.solution;
    const double previous = u.size() == 0 ? 0.0 : u.l2_norm();
    const double delta = e.l2_norm();
    PolynomialExpansion next = u.size() == 0 ? e : u + e;

    StepRecord r;
    r.step = k;
    r.card_lambda = e.size();
    r.epsilon_n = inner.records.back().epsilon_n;
    bool stagnated = false;
    if (previous > 0.0) {
      r.stagnation = delta / previous;
      stagnated = delta <= cfg_s.eps_tol * previous;
    } else {
      r.stagnation = delta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      stagnated = next.l2_norm() == 0.0;
    }
    u = std::move(next);
    fill_errors(r, sampler, u);
    r.path_steps = path_steps;
    r.wall_ms = clock.elapsed_ms();
    report.records.push_back(r);
    report.lambdas.push_back(e.set());

    stagnations = stagnated ? stagnations + 1 : 0;
    if (stagnations >= cfg_s.n_s) {
      report.stop_reason = "stagnation";
      break;
    }
  }
  report.solution = std::move(u);
  return report;
}

}  // namespace fkpde
