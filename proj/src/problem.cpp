#include "fkpde/problem.hpp"

#include <cmath>

#include "fkpde/errors.hpp"

namespace fkpde {

Box Box::cube(std::size_t dimension, double lower, double upper) {
  if (dimension == 0) throw InvalidArgument("box dimension must be positive");
  Box b{std::vector<double>(dimension, lower), std::vector<double>(dimension, upper)};
  b.validate();
  return b;
}

bool Box::contains(std::span<const double> x) const noexcept {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(x[i] > lower[i] && x[i] < upper[i])) return false;
  }
  return true;
}

bool Box::contains_closure(std::span<const double> x) const noexcept {
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  }
  return true;
}

double Box::volume() const noexcept {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

void Box::validate() const {
  if (lower.empty() || lower.size() != upper.size()) throw InvalidArgument("box bounds have inconsistent sizes");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i]) || !std::isfinite(lower[i]) || !std::isfinite(upper[i])) {
      throw InvalidArgument("box needs finite lower < upper in every coordinate");
    }
  }
}

bool DiffusionProblem::constant_diagonal_diffusion() const noexcept {
  if (diffusion) return false;
  for (Eigen::Index i = 0; i < sigma.rows(); ++i) {
    for (Eigen::Index j = 0; j < sigma.cols(); ++j) {
      if (i != j && sigma(i, j) != 0.0) return false;
    }
  }
  return true;
}

void DiffusionProblem::diffusion_at(std::span<const double> x, Eigen::MatrixXd& out) const {
  const auto d = static_cast<Eigen::Index>(dimension());
  if (diffusion) {
    out.resize(d, d);
    diffusion(x, out);
  } else {
    out = sigma;
  }
}

Eigen::MatrixXd DiffusionProblem::covariance_at(std::span<const double> x) const {
  Eigen::MatrixXd s;
  diffusion_at(x, s);
  return s * s.transpose();
}

void halton_point(std::uint64_t index, std::span<double> out) {
  static constexpr int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                                   59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131,
                                   137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199};
  if (out.size() > std::size(primes)) throw InvalidArgument("Halton sequence supports at most 46 dimensions");
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto base = static_cast<std::uint64_t>(primes[i]);
    double f = 1.0, r = 0.0;
    for (std::uint64_t n = index; n > 0; n /= base) {
      f /= static_cast<double>(base);
      r += f * static_cast<double>(n % base);
    }
    out[i] = r;
  }
}

void validate(const DiffusionProblem& problem, int n_samples) {
  problem.domain.validate();
  const auto d = problem.dimension();
  if (!problem.source) throw InvalidArgument("problem '" + problem.name + "' has no source term");
  if (!problem.boundary) throw InvalidArgument("problem '" + problem.name + "' has no boundary function");
  if (!problem.diffusion && (problem.sigma.rows() != static_cast<Eigen::Index>(d) ||
                             problem.sigma.cols() != static_cast<Eigen::Index>(d))) {
    throw InvalidArgument("problem '" + problem.name + "' has a diffusion matrix of the wrong size");
  }
  Point u(d), x(d);
  for (int s = 0; s < n_samples; ++s) {
    halton_point(static_cast<std::uint64_t>(s) + 1, u);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = problem.domain.lower[i] + u[i] * (problem.domain.upper[i] - problem.domain.lower[i]);
    }
    if (problem.killing && !(problem.killing(x) >= 0.0)) {
      throw InvalidArgument("problem '" + problem.name + "' has a negative killing rate");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(problem.covariance_at(x));
    if (llt.info() != Eigen::Success) {
      throw InvalidArgument("problem '" + problem.name + "' is not uniformly elliptic (sigma sigma^T singular)");
    }
  }
}

}  // namespace fkpde
