#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "doctest.h"
#include "fkpde/errors.hpp"
#include "fkpde/feynman_kac.hpp"
#include "fkpde/problems.hpp"

using namespace fkpde;

namespace {

Point unit(std::size_t d, std::size_t j) {
  Point x(d, 0.0);
  x[j] = 1.0;
  return x;
}

double fd_laplacian(const ScalarField& u, const Point& x, double h = 1e-3) {
  double lap = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Point p = x, m = x;
    p[i] += h;
    m[i] -= h;
    lap += (u(p) - 2.0 * u(x) + u(m)) / (h * h);
  }
  return lap;
}

}  // namespace

TEST_CASE("manufactured construction") {
  const auto c = make_manufactured("c", 2, [](std::span<const double>) { return 4.0; },
                                   [](std::span<const double>) { return 0.0; });
  const Point x{0.3, 1.7};
  CHECK(c.source(x) == 0.0);
  CHECK(c.boundary(x) == 4.0);
  CHECK(c.exact(x) == 4.0);
  CHECK_FALSE(c.has_drift());
  CHECK_FALSE(c.has_killing());
  CHECK(c.constant_diagonal_diffusion());
  CHECK(c.sigma(0, 0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(c.domain.lower == std::vector<double>{-1.0, -1.0});
  const auto sq = make_manufactured("sq", 3, [](std::span<const double> y) { return y[0] * y[0]; },
                                    [](std::span<const double>) { return 2.0; });
  CHECK(sq.source(Point{0.1, 0.2, 0.3}) == -2.0);
  CHECK_THROWS_AS(make_manufactured("bad", 0, sq.exact, sq.exact), InvalidArgument);
  CHECK_THROWS_AS(make_manufactured("bad", 2, sq.exact, nullptr), InvalidArgument);
  CHECK_THROWS_AS(make_manufactured("bad", 2, sq.exact, sq.exact, Box::cube(3)), InvalidArgument);
}

TEST_CASE("TC1 values") {
  const auto p = tc1();
  CHECK(p.dimension() == 5);
  CHECK(p.exact(Point(5, 0.0)) == 1.0);
  CHECK(p.exact(unit(5, 0)) == 2.0);
  CHECK(p.source(Point(5, 0.0)) == -3.0);
}

TEST_CASE("TC2 values") {
  const auto p = tc2();
  CHECK(p.dimension() == 10);
  CHECK(p.exact(Point(10, 0.0)) == 0.0);
  CHECK(p.exact(unit(10, 0)) == doctest::Approx(0.3025).epsilon(1e-15));
  CHECK(p.source(Point(10, 0.0)) == doctest::Approx(-10.0).epsilon(1e-15));
}

TEST_CASE("TC3 values and effective dimension") {
  const auto p = tc3();
  CHECK(p.dimension() == 20);
  CHECK(p.exact(Point(20, 0.0)) == 1.0);
  CHECK(p.source(Point(20, 0.0)) == -3.0);
  // One-based coordinates 1, 5, 8, 12, 15 are active.
  const std::vector<std::size_t> active = {0, 4, 7, 11, 14};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point x(20);
  for (auto& v : x) v = u(rng);
  const double base = p.exact(x);
  for (std::size_t j = 0; j < 20; ++j) {
    Point y = x;
    y[j] += 0.3;
    const bool moves = p.exact(y) != base;
    CHECK(moves == (std::find(active.begin(), active.end(), j) != active.end()));
  }
  // x1^2 + sin(x12) + exp(x5) + sin(x15)(x8 + 1)
  const double expected = x[0] * x[0] + std::sin(x[11]) + std::exp(x[4]) + std::sin(x[14]) * (x[7] + 1.0);
  CHECK(base == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("sources match finite-difference Laplacians") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-0.99, 0.99);
  for (const auto& p : {tc1(), tc2(), tc3()}) {
    CAPTURE(p.name);
    for (int t = 0; t < 100; ++t) {
      Point x(p.dimension());
      for (auto& v : x) v = u(rng);
      CHECK(std::abs(fd_laplacian(p.exact, x) + p.source(x)) <= 1e-5);
    }
  }
}

TEST_CASE("boundary data is the global solution formula") {
  for (const auto& p : {tc1(), tc2(), tc3()}) {
    Point x(p.dimension(), 1.3);
    x[0] = -2.1;
    CHECK(p.boundary(x) == p.exact(x));
  }
}

TEST_CASE("Feynman-Kac estimates match the exact solutions") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-0.8, 0.8);
  std::uint64_t seed = 10;
  for (const auto& p : {tc1(), tc2(), tc3()}) {
    for (int t = 0; t < 5; ++t) {
      Point x(p.dimension());
      for (auto& v : x) v = u(rng);
      const auto e = estimate_u(p, x, EulerConfig{1e-3, 10'000'000, seed++}, 10000);
      CAPTURE(p.name);
      CHECK(std::abs(e.mean - p.exact(x)) <= 3.0 * e.std_error + 0.05);
    }
  }
}

TEST_CASE("structural validation") {
  auto p = tc1();
  CHECK_NOTHROW(validate(p));
  auto negative = p;
  negative.killing = [](std::span<const double> x) { return x[0]; };
  CHECK_THROWS_AS(validate(negative), InvalidArgument);
  auto degenerate = p;
  degenerate.sigma = Eigen::MatrixXd::Zero(5, 5);
  degenerate.sigma(0, 0) = 1.0;
  CHECK_THROWS_AS(validate(degenerate), InvalidArgument);
  auto wrong_size = p;
  wrong_size.sigma = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(validate(wrong_size), InvalidArgument);
  auto no_source = p;
  no_source.source = nullptr;
  CHECK_THROWS_AS(validate(no_source), InvalidArgument);
}

TEST_CASE("registry") {
  const auto listed = list_problems();
  std::vector<std::string> names;
  for (const auto& info : listed) names.push_back(info.name);
  for (const char* n : {"tc1", "tc2", "tc3"}) CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK(make_problem("tc1").dimension() == 5);
  CHECK(make_problem("tc2").dimension() == 10);
  CHECK(make_problem("tc3").dimension() == 20);
  CHECK_THROWS_AS(make_problem("tc4"), InvalidArgument);
  CHECK_THROWS_AS(make_problem("manufactured:/nonexistent/file"), InvalidArgument);
}

TEST_CASE("manufactured problems from an expansion file") {
  const auto dir = std::filesystem::temp_directory_path() / "fkpde_test_problems";
  std::filesystem::create_directories(dir);
  const auto path = dir / "poly.expansion";
  {
    std::ofstream out(path);
    // 1 + 0.5 phi_1(x1) + 0.25 phi_2(x2)
    out << "2 3\n0 0 1\n1 0 0.5\n0 2 0.25\n";
  }
  const auto p = make_problem("manufactured:" + path.string());
  CHECK(p.dimension() == 2);
  const Point x{0.3, -0.6};
  const double phi1 = std::sqrt(3.0) * 0.3;
  const double phi2 = std::sqrt(5.0) * 0.5 * (3.0 * 0.36 - 1.0);
  CHECK(p.exact(x) == doctest::Approx(1.0 + 0.5 * phi1 + 0.25 * phi2).epsilon(1e-14));
  // -Laplace: phi_2'' = 3 sqrt(5).
  CHECK(p.source(x) == doctest::Approx(-0.25 * 3.0 * std::sqrt(5.0)).epsilon(1e-14));
  CHECK(p.boundary(Point{2.0, 3.0}) == p.exact(Point{2.0, 3.0}));
  std::filesystem::remove_all(dir);
}
