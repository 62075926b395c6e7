#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "fkpde/multiindex.hpp"
#include "fkpde/problems.hpp"
#include "fkpde/solvers.hpp"

namespace fkpde::testing {

// All mu <= nu componentwise, by odometer enumeration.
inline std::vector<MultiIndex> lower_box(const MultiIndex& nu) {
  std::vector<MultiIndex> out;
  std::vector<int> mu(nu.size(), 0);
  while (true) {
    out.emplace_back(mu);
    std::size_t i = 0;
    while (i < mu.size() && mu[i] == nu[i]) mu[i++] = 0;
    if (i == mu.size()) break;
    ++mu[i];
  }
  return out;
}

inline bool brute_force_downward_closed(const MultiIndexSet& set) {
  for (const auto& nu : set) {
    for (const auto& mu : lower_box(nu)) {
      if (!set.contains(mu)) return false;
    }
  }
  return true;
}

// Reduced margin by scanning every index with entries up to max degree + 1.
inline MultiIndexSet brute_force_margin(const MultiIndexSet& set) {
  const std::size_t d = set.dimension();
  MultiIndex top(std::vector<int>(d, set.max_degree() + 1));
  std::vector<MultiIndex> out;
  for (const auto& nu : lower_box(top)) {
    if (set.contains(nu)) continue;
    bool ok = true;
    for (std::size_t j = 0; j < d && ok; ++j) {
      if (nu[j] > 0) ok = set.contains(nu.shifted(j, -1));
    }
    if (ok) out.push_back(nu);
  }
  return MultiIndexSet(d, std::move(out));
}

// Random downward-closed set grown by adding random margin elements while
// respecting a per-coordinate degree bound.
inline MultiIndexSet random_downward_closed(std::size_t d, std::size_t target, int max_degree, std::mt19937_64& rng) {
  MultiIndexSet set = MultiIndexSet::root(d);
  while (set.size() < target) {
    std::vector<MultiIndex> options;
    for (const auto& nu : reduced_margin(set)) {
      if (nu.max_degree() <= max_degree) options.push_back(nu);
    }
    if (options.empty()) break;
    std::uniform_int_distribution<std::size_t> pick(0, options.size() - 1);
    set = set_union(set, MultiIndexSet(d, {options[pick(rng)]}));
  }
  return set;
}

// n-point Gauss-Legendre rule on [-1, 1] (Golub-Welsch).
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    J(k, k - 1) = b;
    J(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = eig.eigenvalues()[i];
    const double v = eig.eigenvectors()(0, i);
    weights[i] = 2.0 * v * v;
  }
}

// sup over a dense grid of [-1, 1] of sum_j |l_j(x)| for the nodes z (Lagrange form).
inline double univariate_lebesgue(const std::vector<double>& z, int samples = 20001) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double x = -1.0 + 2.0 * s / (samples - 1);
    double total = 0.0;
    for (std::size_t j = 0; j < z.size(); ++j) {
      double l = 1.0;
      for (std::size_t m = 0; m < z.size(); ++m) {
        if (m != j) l *= (x - z[m]) / (z[j] - z[m]);
      }
      total += std::abs(l);
    }
    worst = std::max(worst, total);
  }
  return worst;
}

// The adaptive TC1 index set of about `card` members: the largest set of the
// noise-free adaptive sequence with at most `card` members.
inline MultiIndexSet tc1_adaptive_set(std::size_t card = 26) {
  const auto problem = tc1();
  AdaptiveConfig cfg;
  cfg.eps = 0.0;
  cfg.N = static_cast<int>(card);
  const auto report = adaptive_exact(problem.exact, problem.domain, cfg);
  MultiIndexSet best = MultiIndexSet::root(problem.dimension());
  for (const auto& set : report.lambdas) {
    if (set.size() <= card) best = set;
  }
  return best;
}

}  // namespace fkpde::testing
