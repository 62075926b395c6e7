#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fkpde/multiindex.hpp"
#include "fkpde/poly1d.hpp"
#include "fkpde/problem.hpp"

namespace fkpde {

/// Interpolation nodes z_nu = (z_{nu_1}, ..., z_{nu_d}) for nu in a
/// downward-closed set, built from one nested sequence per coordinate.
/// Points are stored in the canonical order of the set.
class TensorGrid {
 public:
  TensorGrid(MultiIndexSet set, Box domain, PointFamily family = PointFamily::OffsetLeja);

  const MultiIndexSet& set() const noexcept { return set_; }
  const Box& domain() const noexcept { return domain_; }
  PointFamily family() const noexcept { return family_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dimension() const noexcept { return set_.dimension(); }

  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const noexcept { return points_; }
  /// Node of an arbitrary multi-index (it need not belong to the set).
  Point node(const MultiIndex& nu) const;
  const PointSequence& sequence(std::size_t dim) const { return sequences_[dim]; }

 private:
  MultiIndexSet set_;
  Box domain_;
  PointFamily family_;
  std::vector<PointSequence> sequences_;
  std::vector<Point> points_;
};

/// sum_nu c_nu phi_nu(x) in the tensorised orthonormal Legendre basis of
/// the box (orthonormal for the uniform probability measure).
class PolynomialExpansion {
 public:
  PolynomialExpansion() = default;
  PolynomialExpansion(MultiIndexSet set, Eigen::VectorXd coefficients, Box domain);

  static PolynomialExpansion zero(MultiIndexSet set, Box domain);

  const MultiIndexSet& set() const noexcept { return set_; }
  const Eigen::VectorXd& coefficients() const noexcept { return coefficients_; }
  const Box& domain() const noexcept { return domain_; }
  std::size_t dimension() const noexcept { return set_.dimension(); }
  std::size_t size() const noexcept { return set_.size(); }

  /// c_nu, or 0 when nu is not in the set.
  double coefficient(const MultiIndex& nu) const;
  /// L2 norm for the uniform probability measure on the box.
  double l2_norm() const { return coefficients_.norm(); }
  bool is_zero() const { return coefficients_.isZero(0.0); }

  /// Coefficients restricted to `subset` (members outside the set get 0).
  PolynomialExpansion restricted(const MultiIndexSet& subset) const;

  double operator()(std::span<const double> x) const;

  // Sparse view used by the evaluator: for term t, the coordinates with
  // non-zero degree are support_[offset_[t] .. offset_[t+1]).
  struct Factor {
    std::uint32_t coord;
    std::uint32_t degree;
  };
  std::span<const Factor> support(std::size_t term) const {
    return {support_.data() + offset_[term], offset_[term + 1] - offset_[term]};
  }

 private:
  void build_support();

  MultiIndexSet set_;
  Eigen::VectorXd coefficients_;
  Box domain_;
  std::vector<Factor> support_;
  std::vector<std::size_t> offset_;
};

/// Sum of two expansions on the union of their index sets.
PolynomialExpansion operator+(const PolynomialExpansion& a, const PolynomialExpansion& b);
PolynomialExpansion operator-(const PolynomialExpansion& a, const PolynomialExpansion& b);

/// Reusable workspace for evaluating one expansion at many points. Not
/// thread-safe; give each worker its own.
class ExpansionEvaluator {
 public:
  explicit ExpansionEvaluator(const PolynomialExpansion& p);

  double value(std::span<const double> x);
  /// A(p)(x) = -1/2 sum_ij a_ij d2p/dxi dxj - sum_i b_i dp/dxi + k p, with
  /// a = sigma sigma^T, using analytic basis derivatives.
  double apply_operator(std::span<const double> x, const DiffusionProblem& problem);

 private:
  void tabulate(std::span<const double> x, bool derivatives);

  const PolynomialExpansion* p_;
  std::vector<UnivariateBasis> bases_;
  std::vector<int> max_degree_;
  std::vector<std::vector<double>> val_, d1_, d2_;
  std::vector<double> prefix_, suffix_, drift_;
  Eigen::MatrixXd sigma_, cov_;
  const DiffusionProblem* cov_owner_ = nullptr;
};

double evaluate(const PolynomialExpansion& p, std::span<const double> x);
double apply_operator(const PolynomialExpansion& p, std::span<const double> x, const DiffusionProblem& problem);

/// Phi[nu, mu] = phi_mu(z_nu) with a rank-revealing factorisation.
class CollocationSystem {
 public:
  /// Throws IllConditionedGrid above `max_condition`.
  explicit CollocationSystem(const TensorGrid& grid, double max_condition = 1e12);

  double condition() const noexcept { return condition_; }
  const Eigen::MatrixXd& matrix() const noexcept { return phi_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(phi_.rows()); }

  Eigen::VectorXd solve(const Eigen::VectorXd& values) const;
  /// Cardinal functions l_nu(x), nu in canonical order (rows of Phi^{-T} phi(x)).
  Eigen::VectorXd cardinal_values(std::span<const double> x) const;

 private:
  MultiIndexSet set_;
  Box domain_;
  Eigen::MatrixXd phi_;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::MatrixXd inverse_transpose_;
  double condition_ = 0.0;
};

/// I_Lambda(w) from node values in the grid's canonical order.
PolynomialExpansion interpolate(const TensorGrid& grid, const CollocationSystem& system,
                                std::span<const double> values);
PolynomialExpansion interpolate(const TensorGrid& grid, std::span<const double> values);
PolynomialExpansion interpolate(const TensorGrid& grid, const std::function<double(std::span<const double>)>& w);

/// E_N(p) = sum_{nu in N} c_nu^2
double energy(const PolynomialExpansion& p, const MultiIndexSet& subset);

/// [phi_nu(x)] for nu in the canonical order of `set`.
Eigen::VectorXd basis_row(const MultiIndexSet& set, const Box& domain, std::span<const double> x);

/// Lower bound of the Lebesgue constant: max of sum_nu |l_nu(x)| over the
/// grid nodes and `n_samples` Halton points of the box.
double lebesgue_estimate(const TensorGrid& grid, int n_samples = 20000);

// "d n" header, then "nu_1 ... nu_d c_nu" per line, 17 significant digits.
void write_expansion(std::ostream& out, const PolynomialExpansion& p);
/// The format does not carry the box; `domain` defaults to [-1,1]^d.
PolynomialExpansion read_expansion(std::istream& in, std::optional<Box> domain = std::nullopt);

}  // namespace fkpde
