#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace fkpde {

using Point = std::vector<double>;
using ScalarField = std::function<double(std::span<const double>)>;
using VectorField = std::function<void(std::span<const double>, std::span<double>)>;
using MatrixField = std::function<void(std::span<const double>, Eigen::Ref<Eigen::MatrixXd>)>;

/// Axis-aligned hyperrectangle prod_i (lower_i, upper_i).
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  static Box cube(std::size_t dimension, double lower = -1.0, double upper = 1.0);

  std::size_t dimension() const noexcept { return lower.size(); }
  /// Strict interior test; boundary points are outside D.
  bool contains(std::span<const double> x) const noexcept;
  bool contains_closure(std::span<const double> x) const noexcept;
  double volume() const noexcept;
  void validate() const;
};

/// A(u) = -L(u) + k u = g in D, u = f on the boundary, with
/// L(u) = 1/2 sum_ij (sigma sigma^T)_ij d2u/dxi dxj + sum_i b_i du/dxi.
///
/// Empty std::function members mean "identically zero" (drift, killing) or
/// "use the constant matrix" (diffusion). `boundary` must be defined on all
/// of R^d because discrete exit states land outside the closed domain.
struct DiffusionProblem {
  std::string name;
  Box domain;
  VectorField drift;
  MatrixField diffusion;
  Eigen::MatrixXd sigma;
  ScalarField killing;
  ScalarField source;
  ScalarField boundary;
  ScalarField exact;

  std::size_t dimension() const noexcept { return domain.dimension(); }
  bool has_drift() const noexcept { return static_cast<bool>(drift); }
  bool has_killing() const noexcept { return static_cast<bool>(killing); }
  bool has_exact() const noexcept { return static_cast<bool>(exact); }
  /// Constant sigma with no off-diagonal entries: the Euler step and the
  /// operator both reduce to per-coordinate work.
  bool constant_diagonal_diffusion() const noexcept;

  void diffusion_at(std::span<const double> x, Eigen::MatrixXd& out) const;
  /// sigma(x) sigma(x)^T
  Eigen::MatrixXd covariance_at(std::span<const double> x) const;
};

/// Structural checks plus spot checks of k >= 0 and uniform ellipticity on
/// `n_samples` quasi-random points of the closed domain.
void validate(const DiffusionProblem& problem, int n_samples = 64);

/// Halton point in [0,1)^d (bases: first d primes), index >= 1.
void halton_point(std::uint64_t index, std::span<double> out);

}  // namespace fkpde
