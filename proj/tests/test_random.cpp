#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rascap/parallel.hpp"
#include "rascap/random.hpp"

using namespace rascap;

TEST_CASE("Philox4x32-10 known-answer vectors", "[random]") {
  // Random123 kat_vectors: philox4x32 10 rounds.
  Philox4x32 zero(0, 0);
  CHECK(zero() == 0x6627e8d5u);
  CHECK(zero() == 0xe169c58du);
  CHECK(zero() == 0xbc57ac4cu);
  CHECK(zero() == 0x9b00dbd8u);
}

TEST_CASE("streams are deterministic and distinct", "[random]") {
  Philox4x32 a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  int same_c = 0, same_d = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto va = a.next_u64();
    REQUIRE(va == b.next_u64());
    same_c += va == c.next_u64();
    same_d += va == d.next_u64();
  }
  CHECK(same_c == 0);
  CHECK(same_d == 0);
}

TEST_CASE("variate moments", "[random][mc]") {
  Philox4x32 rng(99, 0);
  const int n = 400000;
  double su = 0, sn = 0, sn2 = 0, se = 0, sg = 0, sg2 = 0;
  double umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    se += rng.exponential();
    const double g = rng.gamma_integer(5);
    sg += g;
    sg2 += g * g;
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  // 4 standard errors.
  CHECK(std::abs(su / n - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sn / n) < 4 * std::sqrt(1.0 / n));
  CHECK(std::abs(sn2 / n - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(se / n - 1.0) < 4 * std::sqrt(1.0 / n));
  CHECK(std::abs(sg / n - 5.0) < 4 * std::sqrt(5.0 / n));
  const double var_g = sg2 / n - (sg / n) * (sg / n);
  CHECK(std::abs(var_g - 5.0) < 4 * std::sqrt(2.0 * 25.0 * (1 + 3.0 / 5.0) / n));
}

TEST_CASE("gamma_integer handles large shapes", "[random]") {
  Philox4x32 rng(1, 1);
  double s = 0;
  for (int i = 0; i < 2000; ++i) {
    const double g = rng.gamma_integer(300);
    REQUIRE(std::isfinite(g));
    s += g;
  }
  CHECK(std::abs(s / 2000 - 300.0) < 4 * std::sqrt(300.0 / 2000));
}

TEST_CASE("parallel_for covers every index once and propagates errors", "[parallel]") {
  for (unsigned w : {1u, 3u, 8u, 64u}) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), Workers{w}, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) REQUIRE(h == 1);
  }
  CHECK_THROWS_AS(parallel_for(100, Workers{4},
                               [](std::size_t i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}
