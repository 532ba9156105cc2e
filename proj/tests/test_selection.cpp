#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "rascap/numerics.hpp"
#include "rascap/selection.hpp"

using namespace rascap;
using Catch::Matchers::WithinAbs;

TEST_CASE("binomial", "[selection]") {
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(64, 32) == 1832624140942590534ull);
  CHECK(binomial(10, 0) == 1);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(200, 100) == UINT64_MAX);
}

TEST_CASE("selecting every row gives the full capacity", "[selection]") {
  const SystemConfig cfg{3, 6, 6, 2.0};
  const auto h = sample_channel(cfg, 1);
  for (auto m : {SelectionMethod::Exhaustive, SelectionMethod::Greedy}) {
    const auto r = select_antennas(h, cfg, m);
    CHECK(r.subset == std::vector<int>{0, 1, 2, 3, 4, 5});
    CHECK_THAT(r.capacity, WithinAbs(capacity(h, cfg.rho_bar), 1e-9));
  }
}

TEST_CASE("L = 1 picks the strongest row", "[selection]") {
  const SystemConfig cfg{4, 9, 1, 3.0};
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto h = sample_channel(cfg, s);
    const auto g = h.row_gains();
    const int best = static_cast<int>(std::max_element(g.begin(), g.end()) - g.begin());
    const auto ex = exhaustive_select(h, cfg);
    const auto gr = greedy_select(h, cfg);
    REQUIRE(ex.subset == std::vector<int>{best});
    REQUIRE(gr.subset == ex.subset);
    REQUIRE_THAT(ex.capacity, WithinAbs(std::log2(1.0 + 3.0 * g[best]), 1e-12));
  }
}

TEST_CASE("exhaustive matches naive enumeration", "[selection]") {
  const SystemConfig cfg{2, 6, 3, 2.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto h = sample_channel(cfg, 40 + s);
    double best = -1.0;
    std::vector<int> arg;
    for (const auto& sub : oracle::all_subsets(6, 3)) {
      const double c = capacity(h, sub, cfg.rho_bar);
      if (c > best) {
        best = c;
        arg = sub;
      }
    }
    const auto r = exhaustive_select(h, cfg);
    REQUIRE(r.subset == arg);
    REQUIRE_THAT(r.capacity, WithinAbs(best, 1e-9));
  }
}

TEST_CASE("exhaustive ties resolve to the lexicographically smallest subset",
          "[selection]") {
  // Identical rows: every subset has the same capacity.
  Eigen::MatrixXcd m(5, 2);
  for (int i = 0; i < 5; ++i) m.row(i) << cdouble(1, 0), cdouble(0, 1);
  const auto r = exhaustive_select(ChannelMatrix(m), SystemConfig{2, 5, 2, 1.0});
  CHECK(r.subset == std::vector<int>{0, 1});
}

TEST_CASE("exhaustive respects its budget", "[selection]") {
  const SystemConfig cfg{2, 30, 15, 1.0};
  const auto h = sample_channel(cfg, 0);
  CHECK_THROWS_AS(exhaustive_select(h, cfg), IntractableError);
  CHECK_THROWS_AS(exhaustive_select(h, SystemConfig{2, 30, 2, 1.0}, 100), IntractableError);
  CHECK_NOTHROW(exhaustive_select(h, SystemConfig{2, 30, 2, 1.0}, 435));
}

TEST_CASE("greedy running capacity matches direct evaluation", "[selection][property]") {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const int n_t = 1 + static_cast<int>(s % 5);
    const SystemConfig cfg{n_t, 40, 36, 0.3 + static_cast<double>(s % 7)};
    const auto h = sample_channel(cfg, 900 + s);
    // A short refresh interval exercises the rebuild path too.
    for (int refresh : {32, 5}) {
      const auto trace = greedy_select_traced(h, cfg, refresh);
      REQUIRE(trace.steps.size() == 36);
      std::vector<int> rows;
      for (const auto& step : trace.steps) {
        rows.push_back(step.row);
        REQUIRE(step.increment >= 0.0);
        REQUIRE_THAT(step.capacity, WithinAbs(capacity(h, rows, cfg.rho_bar), 1e-9));
      }
      REQUIRE_THAT(trace.result.capacity, WithinAbs(trace.steps.back().capacity, 1e-15));
      REQUIRE(std::is_sorted(trace.result.subset.begin(), trace.result.subset.end()));
    }
  }
}

TEST_CASE("greedy stays close to exhaustive", "[selection][property]") {
  const SystemConfig cfg{4, 12, 4, std::pow(10.0, 0.8)};
  double worst = 1.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto h = sample_channel(cfg, 7000 + s);
    const double ex = exhaustive_select(h, cfg).capacity;
    const double gr = greedy_select(h, cfg).capacity;
    REQUIRE(gr <= ex + 1e-9);
    worst = std::min(worst, gr / ex);
  }
  INFO("worst greedy/exhaustive ratio " << worst);
  CHECK(worst >= 0.90);
}

TEST_CASE("selection is equivariant under row permutation", "[selection][property]") {
  const SystemConfig cfg{3, 8, 3, 2.0};
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto h = sample_channel(cfg, 60 + s);
    std::vector<int> perm(8);
    std::iota(perm.begin(), perm.end(), 0);
    std::rotate(perm.begin(), perm.begin() + 3, perm.end());
    std::swap(perm[1], perm[6]);
    const auto hp = h.select_rows(perm);
    for (auto m : {SelectionMethod::Exhaustive, SelectionMethod::Greedy}) {
      const auto a = select_antennas(h, cfg, m);
      const auto b = select_antennas(hp, cfg, m);
      REQUIRE_THAT(b.capacity, WithinAbs(a.capacity, 1e-9));
      std::vector<int> mapped;
      for (int r : b.subset) mapped.push_back(perm[r]);
      std::sort(mapped.begin(), mapped.end());
      REQUIRE(mapped == a.subset);
    }
  }
}

TEST_CASE("greedy <= exhaustive <= both bounds", "[selection][property]") {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int n_t = 1 + static_cast<int>(s % 4);
    const int l = 1 + static_cast<int>(s % 8);
    const SystemConfig cfg{n_t, 8, l, 0.5 + static_cast<double>(s % 9)};
    const auto h = sample_channel(cfg, 3000 + s);
    const double gr = greedy_select(h, cfg).capacity;
    const double ex = exhaustive_select(h, cfg).capacity;
    REQUIRE(gr <= ex + 1e-9);
    REQUIRE(ex <= bub_of_channel(h, cfg) + 1e-9);
    REQUIRE(ex <= mub_of_channel(h, cfg) + 1e-9);
  }
}

TEST_CASE("selection rejects mismatched configurations", "[selection]") {
  const auto h = sample_channel(SystemConfig{2, 6, 2, 1.0}, 0);
  CHECK_THROWS_AS(greedy_select(h, SystemConfig{2, 7, 2, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(exhaustive_select(h, SystemConfig{3, 6, 2, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(greedy_select(h, SystemConfig{2, 6, 7, 1.0}), std::invalid_argument);
}
