#include "fkpde/interp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "fkpde/errors.hpp"

namespace fkpde {

namespace {

void check_domain(const MultiIndexSet& set, const Box& domain) {
  domain.validate();
  if (domain.dimension() != set.dimension()) {
    throw InvalidArgument("box dimension does not match the multi-index set");
  }
}

}  // namespace

TensorGrid::TensorGrid(MultiIndexSet set, Box domain, PointFamily family)
    : set_(std::move(set)), domain_(std::move(domain)), family_(family) {
  if (set_.empty()) throw InvalidArgument("tensor grid needs a non-empty index set");
  check_domain(set_, domain_);
  if (!is_downward_closed(set_)) throw InvalidArgument("tensor grid needs a downward-closed index set");
  const std::size_t d = set_.dimension();
  sequences_.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    sequences_.push_back(point_sequence(family_, set_.max_degree(i) + 1, domain_.lower[i], domain_.upper[i]));
  }
  points_.reserve(set_.size());
  for (const auto& nu : set_) {
    Point z(d);
    for (std::size_t i = 0; i < d; ++i) z[i] = sequences_[i][static_cast<std::size_t>(nu[i])];
    points_.push_back(std::move(z));
  }
}

Point TensorGrid::node(const MultiIndex& nu) const {
  const std::size_t d = dimension();
  if (nu.size() != d) throw InvalidArgument("node index has the wrong dimension");
  Point z(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (static_cast<std::size_t>(nu[i]) < sequences_[i].size()) {
      z[i] = sequences_[i][static_cast<std::size_t>(nu[i])];
    } else {
      z[i] = point_sequence(family_, nu[i] + 1, domain_.lower[i], domain_.upper[i])[static_cast<std::size_t>(nu[i])];
    }
  }
  return z;
}

PolynomialExpansion::PolynomialExpansion(MultiIndexSet set, Eigen::VectorXd coefficients, Box domain)
    : set_(std::move(set)), coefficients_(std::move(coefficients)), domain_(std::move(domain)) {
  if (set_.dimension() == 0) throw InvalidArgument("expansion needs a positive dimension");
  check_domain(set_, domain_);
  if (static_cast<std::size_t>(coefficients_.size()) != set_.size()) {
    throw InvalidArgument("expansion has " + std::to_string(coefficients_.size()) + " coefficients for " +
                          std::to_string(set_.size()) + " indices");
  }
  build_support();
}

PolynomialExpansion PolynomialExpansion::zero(MultiIndexSet set, Box domain) {
  const auto n = static_cast<Eigen::Index>(set.size());
  return PolynomialExpansion(std::move(set), Eigen::VectorXd::Zero(n), std::move(domain));
}

void PolynomialExpansion::build_support() {
  support_.clear();
  offset_.assign(1, 0);
  for (const auto& nu : set_) {
    for (std::size_t i = 0; i < nu.size(); ++i) {
      if (nu[i] > 0) support_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(nu[i])});
    }
    offset_.push_back(support_.size());
  }
}

double PolynomialExpansion::coefficient(const MultiIndex& nu) const {
  auto pos = set_.position(nu);
  return pos ? coefficients_[static_cast<Eigen::Index>(*pos)] : 0.0;
}

PolynomialExpansion PolynomialExpansion::restricted(const MultiIndexSet& subset) const {
  Eigen::VectorXd c(static_cast<Eigen::Index>(subset.size()));
  for (std::size_t i = 0; i < subset.size(); ++i) c[static_cast<Eigen::Index>(i)] = coefficient(subset[i]);
  return PolynomialExpansion(subset, std::move(c), domain_);
}

double PolynomialExpansion::operator()(std::span<const double> x) const { return evaluate(*this, x); }

namespace {

PolynomialExpansion combine(const PolynomialExpansion& a, const PolynomialExpansion& b, double sign) {
  if (a.domain().lower != b.domain().lower || a.domain().upper != b.domain().upper) {
    throw InvalidArgument("cannot combine expansions on different boxes");
  }
  MultiIndexSet u = set_union(a.set(), b.set());
  Eigen::VectorXd c(static_cast<Eigen::Index>(u.size()));
  for (std::size_t i = 0; i < u.size(); ++i) {
    c[static_cast<Eigen::Index>(i)] = a.coefficient(u[i]) + sign * b.coefficient(u[i]);
  }
  return PolynomialExpansion(std::move(u), std::move(c), a.domain());
}

}  // namespace

PolynomialExpansion operator+(const PolynomialExpansion& a, const PolynomialExpansion& b) {
  return combine(a, b, 1.0);
}

PolynomialExpansion operator-(const PolynomialExpansion& a, const PolynomialExpansion& b) {
  return combine(a, b, -1.0);
}

ExpansionEvaluator::ExpansionEvaluator(const PolynomialExpansion& p) : p_(&p) {
  const std::size_t d = p.dimension();
  bases_.reserve(d);
  for (std::size_t i = 0; i < d; ++i) bases_.emplace_back(p.domain().lower[i], p.domain().upper[i]);
  max_degree_.resize(d);
  val_.resize(d);
  d1_.resize(d);
  d2_.resize(d);
  std::size_t max_support = 0;
  for (std::size_t i = 0; i < d; ++i) {
    max_degree_[i] = p.set().max_degree(i);
    const auto n = static_cast<std::size_t>(max_degree_[i]) + 1;
    val_[i].resize(n);
    d1_[i].resize(n);
    d2_[i].resize(n);
  }
  for (std::size_t t = 0; t < p.size(); ++t) max_support = std::max(max_support, p.support(t).size());
  prefix_.resize(max_support + 1);
  suffix_.resize(max_support + 1);
  drift_.resize(d);
}

void ExpansionEvaluator::tabulate(std::span<const double> x, bool derivatives) {
  for (std::size_t i = 0; i < bases_.size(); ++i) {
    if (max_degree_[i] == 0) continue;
    if (derivatives) {
      bases_[i].eval_into(max_degree_[i], x[i], val_[i], d1_[i], d2_[i]);
    } else {
      bases_[i].eval_into(max_degree_[i], x[i], val_[i], {}, {});
    }
  }
}

double ExpansionEvaluator::value(std::span<const double> x) {
  tabulate(x, false);
  const auto& c = p_->coefficients();
  double sum = 0.0;
  for (std::size_t t = 0; t < p_->size(); ++t) {
    double term = c[static_cast<Eigen::Index>(t)];
    for (const auto& f : p_->support(t)) term *= val_[f.coord][f.degree];
    sum += term;
  }
  return sum;
}

double ExpansionEvaluator::apply_operator(std::span<const double> x, const DiffusionProblem& problem) {
  tabulate(x, true);
  const bool diagonal = problem.constant_diagonal_diffusion();
  if (diagonal) {
    if (cov_owner_ != &problem) {
      cov_ = problem.sigma.cwiseProduct(problem.sigma);  // sigma sigma^T for diagonal sigma
      cov_owner_ = &problem;
    }
  } else {
    problem.diffusion_at(x, sigma_);
    cov_.noalias() = sigma_ * sigma_.transpose();
    cov_owner_ = nullptr;
  }
  const bool drift = problem.has_drift();
  if (drift) problem.drift(x, drift_);
  const double k = problem.has_killing() ? problem.killing(x) : 0.0;

  const auto& c = p_->coefficients();
  double sum = 0.0;
  for (std::size_t t = 0; t < p_->size(); ++t) {
    const auto supp = p_->support(t);
    const std::size_t m = supp.size();
    // prefix_[s] = prod_{r<s} v_r, suffix_[s] = prod_{r>=s} v_r
    prefix_[0] = 1.0;
    for (std::size_t s = 0; s < m; ++s) prefix_[s + 1] = prefix_[s] * val_[supp[s].coord][supp[s].degree];
    suffix_[m] = 1.0;
    for (std::size_t s = m; s-- > 0;) suffix_[s] = suffix_[s + 1] * val_[supp[s].coord][supp[s].degree];

    double second = 0.0;  // sum_ij a_ij d2/dxi dxj
    double first = 0.0;   // sum_i b_i d/dxi
    for (std::size_t s = 0; s < m; ++s) {
      const auto i = supp[s].coord;
      const auto deg = supp[s].degree;
      const double others = prefix_[s] * suffix_[s + 1];
      second += cov_(i, i) * d2_[i][deg] * others;
      if (drift) first += drift_[i] * d1_[i][deg] * others;
      if (!diagonal) {
        // Mixed partials only involve coordinates in the support (phi_0' = 0).
        double middle = 1.0;
        for (std::size_t r = s + 1; r < m; ++r) {
          const auto j = supp[r].coord;
          const double rest = prefix_[s] * middle * suffix_[r + 1];
          second += (cov_(i, j) + cov_(j, i)) * d1_[i][deg] * d1_[j][supp[r].degree] * rest;
          middle *= val_[j][supp[r].degree];
        }
      }
    }
    double term = -0.5 * second - first;
    if (k != 0.0) term += k * prefix_[m];
    sum += c[static_cast<Eigen::Index>(t)] * term;
  }
  return sum;
}

double evaluate(const PolynomialExpansion& p, std::span<const double> x) {
  if (p.size() == 0) return 0.0;
  ExpansionEvaluator ev(p);
  return ev.value(x);
}

double apply_operator(const PolynomialExpansion& p, std::span<const double> x, const DiffusionProblem& problem) {
  if (p.size() == 0) return 0.0;
  ExpansionEvaluator ev(p);
  return ev.apply_operator(x, problem);
}

Eigen::VectorXd basis_row(const MultiIndexSet& set, const Box& domain, std::span<const double> x) {
  const std::size_t d = set.dimension();
  std::vector<std::vector<double>> tab(d);
  for (std::size_t i = 0; i < d; ++i) {
    tab[i] = UnivariateBasis(domain.lower[i], domain.upper[i]).eval(set.max_degree(i), x[i]);
  }
  Eigen::VectorXd row(static_cast<Eigen::Index>(set.size()));
  for (std::size_t c = 0; c < set.size(); ++c) {
    double v = 1.0;
    for (std::size_t i = 0; i < d; ++i) v *= tab[i][static_cast<std::size_t>(set[c][i])];
    row[static_cast<Eigen::Index>(c)] = v;
  }
  return row;
}

CollocationSystem::CollocationSystem(const TensorGrid& grid, double max_condition)
    : set_(grid.set()), domain_(grid.domain()) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  phi_.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) phi_.row(r) = basis_row(set_, domain_, grid.point(static_cast<std::size_t>(r)));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(phi_);
  const auto& sv = svd.singularValues();
  const double smallest = sv[n - 1];
  condition_ = smallest > 0.0 ? sv[0] / smallest : std::numeric_limits<double>::infinity();
  if (!(condition_ <= max_condition)) throw IllConditionedGrid(condition_);
  qr_.compute(phi_);
  inverse_transpose_ = qr_.inverse().transpose();
}

Eigen::VectorXd CollocationSystem::solve(const Eigen::VectorXd& values) const {
  if (values.size() != phi_.rows()) throw InvalidArgument("value count does not match the grid size");
  Eigen::VectorXd c = qr_.solve(values);
  const double scale = std::max(values.norm(), std::numeric_limits<double>::min());
  const double residual = (phi_ * c - values).norm() / scale;
  if (!(residual <= 1e-10 * std::max(condition_, 1.0))) {
    throw NumericError("collocation solve residual " + std::to_string(residual) + " exceeds tolerance");
  }
  return c;
}

Eigen::VectorXd CollocationSystem::cardinal_values(std::span<const double> x) const {
  return inverse_transpose_ * basis_row(set_, domain_, x);
}

PolynomialExpansion interpolate(const TensorGrid& grid, const CollocationSystem& system,
                                std::span<const double> values) {
  if (values.size() != grid.size()) throw InvalidArgument("one value per grid node is required");
  if (system.size() != grid.size()) throw InvalidArgument("collocation system does not match the grid");
  Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return PolynomialExpansion(grid.set(), system.solve(v), grid.domain());
}

PolynomialExpansion interpolate(const TensorGrid& grid, std::span<const double> values) {
  CollocationSystem system(grid);
  return interpolate(grid, system, values);
}

PolynomialExpansion interpolate(const TensorGrid& grid, const std::function<double(std::span<const double>)>& w) {
  std::vector<double> values;
  values.reserve(grid.size());
  for (const auto& z : grid.points()) values.push_back(w(z));
  return interpolate(grid, values);
}

double energy(const PolynomialExpansion& p, const MultiIndexSet& subset) {
  double e = 0.0;
  for (const auto& nu : subset) {
    const double c = p.coefficient(nu);
    e += c * c;
  }
  return e;
}

double lebesgue_estimate(const TensorGrid& grid, int n_samples) {
  CollocationSystem system(grid);
  double best = 0.0;
  for (const auto& z : grid.points()) best = std::max(best, system.cardinal_values(z).lpNorm<1>());
  const std::size_t d = grid.dimension();
  Point u(d), x(d);
  const auto& box = grid.domain();
  for (int s = 1; s <= n_samples; ++s) {
    halton_point(static_cast<std::uint64_t>(s), u);
    for (std::size_t i = 0; i < d; ++i) x[i] = box.lower[i] + u[i] * (box.upper[i] - box.lower[i]);
    best = std::max(best, system.cardinal_values(x).lpNorm<1>());
  }
  return best;
}

void write_expansion(std::ostream& out, const PolynomialExpansion& p) {
  out << p.dimension() << ' ' << p.size() << '\n';
  char buf[64];
  for (std::size_t t = 0; t < p.size(); ++t) {
    const auto& nu = p.set()[t];
    for (std::size_t i = 0; i < nu.size(); ++i) out << nu[i] << ' ';
    std::snprintf(buf, sizeof buf, "%.17g", p.coefficients()[static_cast<Eigen::Index>(t)]);
    out << buf << '\n';
  }
}

PolynomialExpansion read_expansion(std::istream& in, std::optional<Box> domain) {
  std::size_t d = 0, n = 0;
  std::string header;
  if (!std::getline(in, header)) throw InvalidArgument("expansion file is empty");
  {
    std::istringstream hs(header);
    if (!(hs >> d >> n) || d == 0) throw InvalidArgument("expansion header must be 'dimension count'");
  }
  std::vector<MultiIndex> members;
  std::vector<double> coeffs;
  std::string line;
  while (members.size() < n && std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<int> nu(d);
    for (auto& v : nu) {
      if (!(ls >> v) || v < 0) throw InvalidArgument("malformed expansion line: '" + line + "'");
    }
    double c = 0.0;
    if (!(ls >> c)) throw InvalidArgument("missing coefficient on line: '" + line + "'");
    members.emplace_back(std::move(nu));
    coeffs.push_back(c);
  }
  if (members.size() != n) throw InvalidArgument("expansion file is truncated");
  MultiIndexSet set(d, members);
  if (set.size() != n) throw InvalidArgument("expansion file has duplicate indices");
  Eigen::VectorXd c(static_cast<Eigen::Index>(n));
  for (std::size_t t = 0; t < n; ++t) c[static_cast<Eigen::Index>(*set.position(members[t]))] = coeffs[t];
  return PolynomialExpansion(std::move(set), std::move(c), domain ? *domain : Box::cube(d));
}

}  // namespace fkpde
