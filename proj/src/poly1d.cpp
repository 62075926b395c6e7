#include "fkpde/poly1d.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "fkpde/errors.hpp"

namespace fkpde {

UnivariateBasis::UnivariateBasis(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!(lower < upper)) throw InvalidArgument("basis interval needs lower < upper");
}

std::vector<double> UnivariateBasis::eval(int k_max, double x) const {
  if (k_max < 0) throw InvalidArgument("k_max must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
  eval_into(k_max, x, out, {}, {});
  return out;
}

std::vector<double> UnivariateBasis::eval_derivs(int k_max, double x, int order) const {
  if (k_max < 0) throw InvalidArgument("k_max must be non-negative");
  if (order != 1 && order != 2) throw InvalidArgument("derivative order must be 1 or 2");
  std::vector<double> out(static_cast<std::size_t>(k_max) + 1);
  if (order == 1) {
    eval_into(k_max, x, {}, out, {});
  } else {
    eval_into(k_max, x, {}, {}, out);
  }
  return out;
}

void UnivariateBasis::eval_into(int k_max, double x, std::span<double> values, std::span<double> first,
                                std::span<double> second) const {
  const double scale = 2.0 / (upper_ - lower_);
  const double t = (2.0 * x - lower_ - upper_) / (upper_ - lower_);

  // Legendre recurrences for P_k, P_k' and P_k'' in t:
  //   (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
  //   P'_{k+1}  = P'_{k-1}  + (2k+1) P_k
  //   P''_{k+1} = P''_{k-1} + (2k+1) P'_k
  double p_prev = 0.0, p = 1.0;
  double d_prev = 0.0, d = 0.0;
  double s_prev = 0.0, s = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    const double norm = std::sqrt(2.0 * k + 1.0);
    if (!values.empty()) values[k] = norm * p;
    if (!first.empty()) first[k] = norm * scale * d;
    if (!second.empty()) second[k] = norm * scale * scale * s;
    const double p_next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
    const double d_next = d_prev + (2.0 * k + 1.0) * p;
    const double s_next = s_prev + (2.0 * k + 1.0) * d;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
    s_prev = s;
    s = s_next;
  }
}

std::string to_string(PointFamily family) {
  switch (family) {
    case PointFamily::Leja:
      return "leja";
    case PointFamily::CenteredLeja:
      return "centered-leja";
    case PointFamily::OffsetLeja:
      return "offset-leja";
    case PointFamily::Magic:
      return "magic";
  }
  return "unknown";
}

PointFamily point_family_from_string(const std::string& name) {
  if (name == "leja") return PointFamily::Leja;
  if (name == "centered-leja") return PointFamily::CenteredLeja;
  if (name == "offset-leja") return PointFamily::OffsetLeja;
  if (name == "magic") return PointFamily::Magic;
  throw InvalidArgument("unknown point family '" + name + "'");
}

namespace {

std::vector<double> leja_candidates() {
  constexpr int n = kLejaCandidates;
  constexpr int half = (n - 1) / 2;
  std::vector<double> c(n);
  const double pi = std::acos(-1.0);
  for (int j = 0; j < half; ++j) {
    c[j] = -std::cos(pi * j / (n - 1));
    c[n - 1 - j] = -c[j];
  }
  c[half] = 0.0;
  return c;
}

// Greedy Leja construction; log-products avoid under/overflow.
std::vector<double> build_leja(int n, double start) {
  static const std::vector<double> candidates = leja_candidates();
  std::vector<double> log_prod(candidates.size(), 0.0);
  std::vector<double> pts;
  pts.reserve(n);
  double z = start;
  for (int k = 0; k < n; ++k) {
    pts.push_back(z);
    if (k + 1 == n) break;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double gap = std::abs(candidates[i] - z);
      log_prod[i] += gap > 0.0 ? std::log(gap) : -std::numeric_limits<double>::infinity();
    }
    // Candidates are sorted ascending, so keeping the first maximiser breaks
    // ties toward the smallest abscissa. Symmetric candidates differ only by
    // rounding, hence the tolerance.
    std::size_t best = 0;
    for (std::size_t i = 1; i < candidates.size(); ++i) {
      if (log_prod[i] > log_prod[best] + 1e-12) best = i;
    }
    z = candidates[best];
  }
  return pts;
}

}  // namespace

std::vector<double> leja_points(int n, double start) {
  if (n < 1) throw InvalidArgument("need at least one Leja point");
  if (start < -1.0 || start > 1.0) throw InvalidArgument("Leja start must lie in [-1, 1]");
  // Sequences are nested, so one cached prefix per start serves every n.
  static std::mutex mu;
  static std::map<double, std::vector<double>> cache;
  std::lock_guard lock(mu);
  auto& seq = cache[start];
  if (static_cast<int>(seq.size()) < n) seq = build_leja(std::max(n, 64), start);
  return {seq.begin(), seq.begin() + n};
}

PointSequence point_sequence(PointFamily kind, int n, double lower, double upper) {
  if (!(lower < upper)) throw InvalidArgument("point sequence interval needs lower < upper");
  std::vector<double> ref;
  switch (kind) {
    case PointFamily::Leja:
      ref = leja_points(n, 1.0);
      break;
    case PointFamily::CenteredLeja:
      ref = leja_points(n, 0.0);
      break;
    case PointFamily::OffsetLeja:
      ref = leja_points(n, 0.5);
      break;
    case PointFamily::Magic:
      throw InvalidArgument("magic point sequences are not implemented");
  }
  PointSequence seq{kind, lower, upper, {}};
  seq.points.reserve(ref.size());
  for (double t : ref) {
    // Endpoints map exactly so boundary nodes stay on the boundary.
    if (t == -1.0) {
      seq.points.push_back(lower);
    } else if (t == 1.0) {
      seq.points.push_back(upper);
    } else {
      seq.points.push_back(0.5 * (lower + upper) + 0.5 * (upper - lower) * t);
    }
  }
  return seq;
}

PointSequence leja_sequence(int n) { return point_sequence(PointFamily::Leja, n); }

}  // namespace fkpde
