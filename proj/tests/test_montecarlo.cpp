#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include "oracles.hpp"
#include "rascap/montecarlo.hpp"

using namespace rascap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const double kRho8dB = std::pow(10.0, 0.8);

}  // namespace

TEST_CASE("fnv1a and config fingerprints", "[mc]") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  const SystemConfig cfg{4, 16, 2, 2.0};
  CHECK(config_fingerprint(cfg, "x") == config_fingerprint(cfg, "x"));
  CHECK(config_fingerprint(cfg, "x") != config_fingerprint(cfg, "y"));
  CHECK(config_fingerprint(cfg, "x") != config_fingerprint(SystemConfig{4, 16, 3, 2.0}, "x"));
}

TEST_CASE("single-antenna exact bound matches the exponential ergodic capacity",
          "[mc][bub]") {
  const SystemConfig cfg{1, 1, 1, kRho8dB};
  const auto s = summarize(sample_bub_exact(cfg, kDefaultTrials, 0, Workers{1}));
  // e^{1/rho} E1(1/rho) / ln 2 with E1(x) = -Ei(-x).
  const double closed = std::exp(1.0 / kRho8dB) * -std::expint(-1.0 / kRho8dB) / std::numbers::ln2;
  CHECK_THAT(closed, WithinAbs(2.39585342934618385, 1e-12));
  INFO("mean " << s.mean << " se " << s.standard_error);
  CHECK(std::abs(s.mean - closed) <= 3.0 * s.standard_error);
}

TEST_CASE("untrimmed MRC column term matches Gamma(N_r) quadrature", "[mc][mub]") {
  const SystemConfig cfg{1, 16, 16, kRho8dB};
  const auto s = summarize(sample_mub_exact(cfg, kDefaultTrials, 3, Workers{1}));
  const double quad = oracle::simpson(
      [](long double x) {
        return std::log2(1.0L + std::pow(10.0L, 0.8L) * x) * oracle::gamma_pdf(16, x);
      },
      0.0L, 120.0L);
  INFO("mean " << s.mean << " quad " << quad);
  CHECK(std::abs(s.mean - quad) <= 3.0 * s.standard_error);
}

TEST_CASE("best-of-N_r exponential has the max order-statistic law", "[mc][mub]") {
  const int n_r = 10;
  const SystemConfig cfg{1, n_r, 1, kRho8dB};
  const auto s = sample_mub_exact(cfg, kDefaultTrials, 5, Workers{1});
  const double ks = ks_distance(s, [&](double c) {
    const double x = (std::exp2(c) - 1.0) / kRho8dB;
    return x <= 0.0 ? 0.0 : std::pow(1.0 - std::exp(-x), n_r);
  });
  INFO("ks " << ks);
  CHECK(ks <= 0.01);
}

TEST_CASE("samples are identical for any worker count", "[mc][determinism]") {
  const SystemConfig bub{4, 32, 3, 2.0};
  const SystemConfig mub{2, 16, 6, 2.0};
  const SystemConfig small{3, 8, 3, 2.0};
  const auto ref_b = sample_bub_exact(bub, 3000, 11, Workers{1});
  const auto ref_m = sample_mub_exact(mub, 3000, 11, Workers{1});
  const auto ref_c = sample_channel_bound(small, Regime::Mub, 1000, 11, Workers{1});
  const auto ref_e = sample_selected_capacity(small, 500, 11, SelectionMethod::Exhaustive, Workers{1});
  const auto ref_p = sample_bound_and_capacity(small, Regime::Bub, 500, 11,
                                               SelectionMethod::Greedy, Workers{1});
  for (unsigned w : {2u, 4u, 8u}) {
    INFO("workers=" << w);
    CHECK(sample_bub_exact(bub, 3000, 11, Workers{w}).values == ref_b.values);
    CHECK(sample_mub_exact(mub, 3000, 11, Workers{w}).values == ref_m.values);
    CHECK(sample_channel_bound(small, Regime::Mub, 1000, 11, Workers{w}).values == ref_c.values);
    CHECK(sample_selected_capacity(small, 500, 11, SelectionMethod::Exhaustive, Workers{w})
              .values == ref_e.values);
    const auto p = sample_bound_and_capacity(small, Regime::Bub, 500, 11,
                                             SelectionMethod::Greedy, Workers{w});
    CHECK(p.bound == ref_p.bound);
    CHECK(p.capacity == ref_p.capacity);
  }
  CHECK(sample_bub_exact(bub, 3000, 12, Workers{1}).values != ref_b.values);
  CHECK(ref_b.seed == 11);
  CHECK(ref_b.config_fingerprint == config_fingerprint(bub, "bub_exact"));
  CHECK(std::is_sorted(ref_b.values.begin(), ref_b.values.end()));
}

TEST_CASE("direct gain draws match full channel realizations", "[mc][bub]") {
  const SystemConfig cfg{4, 8, 2, kRho8dB};
  const auto direct = sample_bub_exact(cfg, kDefaultTrials, 21);
  const auto channel = sample_channel_bound(cfg, Regime::Bub, kDefaultTrials, 22);
  const double ks = ks_distance(direct, channel);
  INFO("ks " << ks);
  CHECK(ks <= 0.01);
}

TEST_CASE("ks_distance", "[mc][ks]") {
  const auto a = sample_bub_exact(SystemConfig{2, 8, 2, 1.0}, kDefaultTrials, 1);
  CHECK(ks_distance(a, a) == 0.0);
  auto shifted = a;
  for (auto& v : shifted.values) v += 1000.0;
  CHECK(ks_distance(a, shifted) == 1.0);
  CHECK(ks_distance(shifted, a) == 1.0);
  const auto b = sample_bub_exact(SystemConfig{2, 8, 2, 1.0}, kDefaultTrials, 2);
  CHECK(ks_distance(a, b) <= 0.02);

  // Hand-checked small cases.
  const auto x = EmpiricalSample::from_unsorted({3.0, 1.0, 2.0}, 0, "");
  const auto y = EmpiricalSample::from_unsorted({2.0, 2.5}, 0, "");
  CHECK_THAT(ks_distance(x, y), WithinAbs(1.0 / 3.0, 1e-15));
  CHECK_THAT(ks_distance(x, [](double v) { return std::clamp(v / 4.0, 0.0, 1.0); }),
             WithinAbs(1.0 / 4.0, 1e-15));
  CHECK_THROWS_AS(ks_distance(EmpiricalSample{}, x), std::invalid_argument);

  // Against a tabulated CDF, with and without a sample.
  GaussianApprox g{5.0, 4.0, 0.0, Regime::Bub};
  const auto grid = NormalLaw(g).tabulate();
  Philox4x32 rng(4, 0);
  std::vector<double> draws(20000);
  for (auto& d : draws) d = 5.0 + 2.0 * rng.normal();
  const auto s = EmpiricalSample::from_unsorted(draws, 4, "");
  CHECK(ks_distance(s, grid) <= 0.015);
  CHECK(ks_distance(grid, grid) == 0.0);
  GaussianApprox far{100.0, 4.0, 0.0, Regime::Bub};
  CHECK_THAT(ks_distance(grid, NormalLaw(far).tabulate()), WithinAbs(1.0, 1e-9));
}

TEST_CASE("summarize", "[mc][summary]") {
  const auto c = summarize(std::vector<double>(10, 3.5));
  CHECK(c.variance == 0.0);
  CHECK(c.mean == 3.5);
  CHECK(c.q01 == 3.5);
  CHECK(c.q99 == 3.5);
  const auto two = summarize(std::vector<double>{0.0, 2.0});
  CHECK(two.mean == 1.0);
  CHECK(two.variance == 2.0);
  CHECK(two.q50 == 1.0);
  const auto one = summarize(std::vector<double>{7.0});
  CHECK(one.variance == 0.0);
  CHECK(one.q50 == 7.0);
  CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);

  Philox4x32 rng(8, 0);
  std::vector<double> e(1'000'000);
  for (auto& v : e) v = rng.exponential();
  const auto s = summarize(e);
  CHECK_THAT(s.mean, WithinAbs(1.0, 0.003));
  CHECK_THAT(s.q50, WithinAbs(std::log(2.0), 0.003));
  CHECK_THAT(s.standard_error, WithinRel(1e-3, 0.01));
}

TEST_CASE("selected capacity with all rows is method independent", "[mc][selection]") {
  const SystemConfig cfg{3, 6, 6, 2.0};
  const auto ex = sample_selected_capacity(cfg, 200, 9, SelectionMethod::Exhaustive);
  const auto gr = sample_selected_capacity(cfg, 200, 9, SelectionMethod::Greedy);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    REQUIRE_THAT(ex.values[i], WithinAbs(gr.values[i], 1e-9));
  }
}

TEST_CASE("greedy mean is close to the exhaustive mean", "[mc][selection]") {
  const SystemConfig cfg{4, 12, 3, kRho8dB};
  const auto ex = summarize(sample_selected_capacity(cfg, 200, 0, SelectionMethod::Exhaustive));
  const auto gr = summarize(sample_selected_capacity(cfg, 200, 0, SelectionMethod::Greedy));
  const double ratio = gr.mean / ex.mean;
  INFO("greedy / exhaustive mean ratio " << ratio);
  CHECK(ratio >= 0.99);
  CHECK(ratio <= 1.0);
}

TEST_CASE("bound dominates the selected capacity trial by trial", "[mc][selection]") {
  for (int l : {2, 4}) {
    const SystemConfig cfg{4, 12, l, kRho8dB};
    const auto p = sample_bound_and_capacity(cfg, Regime::Bub, 300, 5,
                                             SelectionMethod::Exhaustive);
    for (std::size_t t = 0; t < p.bound.size(); ++t) REQUIRE(p.bound[t] >= p.capacity[t] - 1e-9);
  }
  const SystemConfig mub{2, 10, 5, kRho8dB};
  const auto p = sample_bound_and_capacity(mub, Regime::Mub, 300, 5, SelectionMethod::Greedy);
  for (std::size_t t = 0; t < p.bound.size(); ++t) REQUIRE(p.bound[t] >= p.capacity[t] - 1e-9);
}

TEST_CASE("ergodic ordering chain", "[mc][selection]") {
  const SystemConfig cfg{3, 10, 4, kRho8dB};
  const std::size_t trials = 400;
  const std::uint64_t seed = 13;
  const double bub = summarize(sample_channel_bound(cfg, Regime::Bub, trials, seed)).mean;
  const double mub = summarize(sample_channel_bound(cfg, Regime::Mub, trials, seed)).mean;
  const double ex =
      summarize(sample_selected_capacity(cfg, trials, seed, SelectionMethod::Exhaustive)).mean;
  const double gr =
      summarize(sample_selected_capacity(cfg, trials, seed, SelectionMethod::Greedy)).mean;
  const std::vector<int> first{0, 1, 2, 3};
  const auto naive = run_trials(trials, seed, Workers::from_env(), [&](Philox4x32& rng) {
    return capacity(sample_channel(cfg, rng), first, cfg.rho_bar);
  });
  const double fixed = summarize(naive).mean;
  CHECK(bub >= ex - 1e-9);
  CHECK(mub >= ex - 1e-9);
  CHECK(ex >= gr - 1e-9);
  CHECK(gr >= fixed - 1e-9);
}

TEST_CASE("sampler argument errors", "[mc]") {
  const SystemConfig cfg{2, 8, 2, 1.0};
  CHECK_THROWS_AS(sample_bub_exact(cfg, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_mub_exact(cfg, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_bub_exact(SystemConfig{2, 8, 9, 1.0}, 10, 0), std::invalid_argument);
  CHECK_THROWS_AS(sample_selected_capacity(SystemConfig{2, 40, 20, 1.0}, 10, 0,
                                           SelectionMethod::Exhaustive),
                  IntractableError);
}

TEST_CASE("trimmed exponential sums follow the Renyi representation", "[mc][mub]") {
  // Top-20 of 100 unit exponentials: mean 51.7927572099, variance
  // 35.5282625087 (exact, from sum_k E_k min(k, L)/k).
  const auto sums = run_trials(200000, 6, Workers::from_env(), [](Philox4x32& rng) {
    std::vector<double> g(100);
    for (auto& x : g) x = rng.exponential();
    std::nth_element(g.begin(), g.begin() + 80, g.end());
    return std::accumulate(g.begin() + 80, g.end(), 0.0);
  });
  const auto s = summarize(sums);
  INFO("mean " << s.mean << " se " << s.standard_error);
  CHECK(std::abs(s.mean - 51.7927572099) <= 3.0 * s.standard_error);
  CHECK_THAT(s.variance, WithinRel(35.5282625087, 0.02));
}
