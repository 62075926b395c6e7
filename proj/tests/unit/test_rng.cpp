#include <cmath>
#include <vector>

#include "doctest.h"
#include "fkpde/parallel.hpp"
#include "fkpde/rng.hpp"

using namespace fkpde;

TEST_CASE("Philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::generate(C{0, 0, 0, 0}, K{0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::generate(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, K{0xffffffff, 0xffffffff}) ==
        C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::generate(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, K{0xa4093822, 0x299f31d0}) ==
        C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and distinct") {
  GaussianStream a({1, 2, 3, 4, 5});
  GaussianStream b({1, 2, 3, 4, 5});
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  const StreamId base{1, 2, 3, 4, 5};
  for (int field = 0; field < 5; ++field) {
    StreamId other = base;
    std::uint64_t* f[] = {&other.seed, &other.run, &other.iteration, &other.point, &other.sample};
    *f[field] += 1;
    GaussianStream x(base), y(other);
    int equal = 0;
    for (int i = 0; i < 16; ++i) equal += x.next() == y.next();
    CHECK(equal == 0);
  }
}

TEST_CASE("normal variates have standard moments") {
  const int n = 400000;
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  for (int m = 0; m < n / 8; ++m) {
    GaussianStream g({7, 0, 0, 0, static_cast<std::uint64_t>(m)});
    for (int i = 0; i < 8; ++i) {
      const double z = g.next();
      s1 += z;
      s2 += z * z;
      s3 += z * z * z;
      s4 += z * z * z * z;
    }
  }
  // Tolerances are about five standard errors of each moment estimate.
  CHECK(std::abs(s1 / n) <= 5.0 * std::sqrt(1.0 / n));
  CHECK(std::abs(s2 / n - 1.0) <= 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s3 / n) <= 5.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(s4 / n - 3.0) <= 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("uniforms lie in the unit interval with mean one half") {
  GaussianStream g({9, 1, 0, 0, 0});
  const int n = 100000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    s += u;
  }
  CHECK(std::abs(s / n - 0.5) <= 5.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("pairwise sum is exact on integers and independent of thread count") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  CHECK(pairwise_sum(v) == 499500.0);
  CHECK(pairwise_sum(std::span<const double>()) == 0.0);

  std::vector<double> out1(5000), out3(5000);
  auto fill = [](std::vector<double>& out) {
    parallel_for(out.size(), [] { return 0; },
                 [&](int&, std::size_t i) { out[i] = GaussianStream({3, 0, 0, i, 0}).next(); });
  };
  set_num_threads(1);
  fill(out1);
  set_num_threads(3);
  fill(out3);
  set_num_threads(0);
  CHECK(out1 == out3);
  CHECK(pairwise_sum(out1) == pairwise_sum(out3));
}

TEST_CASE("parallel_for rethrows the worker exception") {
  CHECK_THROWS_AS(parallel_for(100, [] { return 0; },
                               [](int&, std::size_t i) {
                                 if (i == 37) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
