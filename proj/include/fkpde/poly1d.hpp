#pragma once

#include <span>
#include <string>
#include <vector>

namespace fkpde {

/// Legendre polynomials on [a, b], rescaled to be orthonormal for the
/// uniform probability measure: phi_k(x) = sqrt(2k+1) P_k(t), t = (2x-a-b)/(b-a).
class UnivariateBasis {
 public:
  UnivariateBasis() = default;
  UnivariateBasis(double lower, double upper);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  /// False for points outside [a, b]. Evaluation there is still valid
  /// (polynomial extension); callers use this to flag extrapolation.
  bool in_interval(double x) const noexcept { return x >= lower_ && x <= upper_; }

  /// [phi_0(x), ..., phi_kmax(x)]
  std::vector<double> eval(int k_max, double x) const;
  /// Derivatives of order 1 or 2 of every basis function.
  std::vector<double> eval_derivs(int k_max, double x, int order) const;

  /// Allocation-free kernel. Each span is either empty (skipped) or has
  /// length >= k_max + 1.
  void eval_into(int k_max, double x, std::span<double> values, std::span<double> first,
                 std::span<double> second) const;

 private:
  double lower_ = -1.0;
  double upper_ = 1.0;
};

enum class PointFamily {
  Leja,          // z0 = 1, z1 = -1, z2 = 0, ...
  CenteredLeja,  // z0 = 0, z1 = -1, z2 = 1, ...
  OffsetLeja,    // z0 = 1/2, z1 = -1, z2 = 1, ...
  Magic,         // reserved, not implemented
};

std::string to_string(PointFamily family);
PointFamily point_family_from_string(const std::string& name);

/// Nested univariate nodes z_0, z_1, ... on [a, b].
struct PointSequence {
  PointFamily kind = PointFamily::OffsetLeja;
  double lower = -1.0;
  double upper = 1.0;
  std::vector<double> points;

  std::size_t size() const noexcept { return points.size(); }
  double operator[](std::size_t k) const { return points[k]; }
};

/// Number of candidates of the discrete Leja maximisation (Chebyshev-Lobatto
/// nodes on [-1, 1]; odd so that 0 is a candidate).
inline constexpr int kLejaCandidates = 10001;

/// First n points of the discrete Leja sequence started at `start` in [-1, 1].
/// Each new point maximises prod_j |x - z_j| over the candidate grid, ties
/// going to the smallest abscissa.
std::vector<double> leja_points(int n, double start);

/// First n points of the requested family, mapped to [lower, upper].
PointSequence point_sequence(PointFamily kind, int n, double lower = -1.0, double upper = 1.0);

/// Classic Leja sequence on [-1, 1] (z0 = 1).
PointSequence leja_sequence(int n);

}  // namespace fkpde
