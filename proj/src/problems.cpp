#include "fkpde/problems.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <memory>

#include "fkpde/errors.hpp"

namespace fkpde {

DiffusionProblem make_manufactured(std::string name, std::size_t dimension, ScalarField u, ScalarField laplacian,
                                   Box domain) {
  if (dimension == 0) throw InvalidArgument("dimension must be positive");
  if (!u || !laplacian) throw InvalidArgument("manufactured problem needs u and its Laplacian");
  if (domain.dimension() == 0) domain = Box::cube(dimension);
  if (domain.dimension() != dimension) throw InvalidArgument("domain dimension does not match");
  domain.validate();

  DiffusionProblem p;
  p.name = std::move(name);
  p.domain = std::move(domain);
  p.sigma = std::sqrt(2.0) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dimension),
                                                       static_cast<Eigen::Index>(dimension));
  p.source = [lap = std::move(laplacian)](std::span<const double> x) { return -lap(x); };
  p.boundary = u;
  p.exact = std::move(u);
  return p;
}

namespace {

// Source evaluation happens at every Euler step from many workers, so each
// thread keeps its own evaluator for the most recent expansion.
struct SharedPolynomial {
  PolynomialExpansion p;
  DiffusionProblem op;
  std::uint64_t generation = 0;
};

std::atomic<std::uint64_t> g_generation{1};

double polynomial_operator(const SharedPolynomial& s, std::span<const double> x) {
  thread_local std::uint64_t cached = 0;
  thread_local std::unique_ptr<ExpansionEvaluator> ev;
  if (cached != s.generation) {
    ev = std::make_unique<ExpansionEvaluator>(s.p);
    cached = s.generation;
  }
  return ev->apply_operator(x, s.op);
}

double polynomial_value(const SharedPolynomial& s, std::span<const double> x) {
  thread_local std::uint64_t cached = 0;
  thread_local std::unique_ptr<ExpansionEvaluator> ev;
  if (cached != s.generation) {
    ev = std::make_unique<ExpansionEvaluator>(s.p);
    cached = s.generation;
  }
  return ev->value(x);
}

}  // namespace

DiffusionProblem manufactured_from_expansion(std::string name, const PolynomialExpansion& p) {
  if (p.size() == 0) throw InvalidArgument("expansion is empty");
  const std::size_t d = p.dimension();
  auto shared = std::make_shared<SharedPolynomial>();
  shared->p = p;
  shared->op.domain = p.domain();
  shared->op.sigma = std::sqrt(2.0) * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  shared->generation = g_generation.fetch_add(1);

  DiffusionProblem out;
  out.name = std::move(name);
  out.domain = p.domain();
  out.sigma = shared->op.sigma;
  out.source = [shared](std::span<const double> x) { return polynomial_operator(*shared, x); };
  out.boundary = [shared](std::span<const double> x) { return polynomial_value(*shared, x); };
  out.exact = out.boundary;
  return out;
}

DiffusionProblem tc1() {
  auto u = [](std::span<const double> x) {
    return x[0] * x[0] + std::sin(x[1]) + std::exp(x[2]) + std::sin(x[3]) * (x[4] + 1.0);
  };
  auto lap = [](std::span<const double> x) {
    return 2.0 - std::sin(x[1]) + std::exp(x[2]) - std::sin(x[3]) * (x[4] + 1.0);
  };
  return make_manufactured("tc1", 5, u, lap);
}

DiffusionProblem tc2() {
  constexpr std::size_t d = 10;
  auto u = [](std::span<const double> x) {
    double quad = 0.0, cubic = 0.0, quartic = 0.0;
    for (std::size_t i = 0; i < d; ++i) quad += x[i] * x[i];
    for (std::size_t i = 0; i + 1 < d; ++i) {
      cubic += x[i] * x[i + 1] * x[i + 1] - x[i] * x[i] * x[i];
      const double r = x[i] * x[i] + x[i + 1] * x[i + 1];
      quartic += r * r;
    }
    return 0.5 * quad + 0.2 * cubic + 2.5e-3 * quartic;
  };
  // Laplace(x_i x_{i+1}^2 - x_i^3) = 2 x_i - 6 x_i;
  // Laplace((x_i^2 + x_{i+1}^2)^2) = 16 (x_i^2 + x_{i+1}^2).
  auto lap = [](std::span<const double> x) {
    double linear = 0.0, radial = 0.0;
    for (std::size_t i = 0; i + 1 < d; ++i) {
      linear += x[i];
      radial += x[i] * x[i] + x[i + 1] * x[i + 1];
    }
    return static_cast<double>(d) - 0.8 * linear + 0.04 * radial;
  };
  return make_manufactured("tc2", d, u, lap);
}

DiffusionProblem tc3() {
  auto u = [](std::span<const double> x) {
    return x[0] * x[0] + std::sin(x[11]) + std::exp(x[4]) + std::sin(x[14]) * (x[7] + 1.0);
  };
  auto lap = [](std::span<const double> x) {
    return 2.0 - std::sin(x[11]) + std::exp(x[4]) - std::sin(x[14]) * (x[7] + 1.0);
  };
  return make_manufactured("tc3", 20, u, lap);
}

std::vector<ProblemInfo> list_problems() {
  return {
      {"tc1", 5, "x1^2 + sin x2 + exp x3 + sin(x4)(x5+1) on (-1,1)^5"},
      {"tc2", 10, "Henon-Heiles potential on (-1,1)^10 (degree-4 polynomial)"},
      {"tc3", 20, "x1^2 + sin x12 + exp x5 + sin(x15)(x8+1) on (-1,1)^20"},
      {"manufactured:<file>", 0, "polynomial solution read from an expansion file"},
  };
}

DiffusionProblem make_problem(std::string_view name) {
  if (name == "tc1") return tc1();
  if (name == "tc2") return tc2();
  if (name == "tc3") return tc3();
  constexpr std::string_view prefix = "manufactured:";
  if (name.starts_with(prefix)) {
    const std::string path(name.substr(prefix.size()));
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open expansion file '" + path + "'");
    return manufactured_from_expansion(std::string(name), read_expansion(in));
  }
  throw InvalidArgument("unknown problem '" + std::string(name) + "'");
}

}  // namespace fkpde
