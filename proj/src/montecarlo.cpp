#include "rascap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace rascap {

double EmpiricalSample::cdf_at(double x) const {
  const auto it = std::upper_bound(values.begin(), values.end(), x);
  return static_cast<double>(it - values.begin()) / static_cast<double>(values.size());
}

EmpiricalSample EmpiricalSample::from_unsorted(std::vector<double> values,
                                               std::uint64_t seed,
                                               std::string fingerprint) {
  std::sort(values.begin(), values.end());
  return {std::move(values), seed, std::move(fingerprint)};
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_fingerprint(const SystemConfig& cfg, std::string_view estimator) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.*s|nt=%d|nr=%d|l=%d|rho=%a",
                static_cast<int>(estimator.size()), estimator.data(), cfg.n_t,
                cfg.n_r, cfg.l, cfg.rho_bar);
  return fnv1a_hex(buf);
}

EmpiricalSample sample_bub_exact(const SystemConfig& cfg, std::size_t trials,
                                 std::uint64_t seed, Workers workers) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("sample_bub_exact: trials must be >= 1");
  auto values = run_trials(trials, seed, workers, [&](Philox4x32& rng) {
    std::vector<double> gains(static_cast<std::size_t>(cfg.n_r));
    for (auto& g : gains) g = rng.gamma_integer(cfg.n_t);
    std::partial_sort(gains.begin(), gains.begin() + cfg.l, gains.end(),
                      std::greater<>());
    double sum = 0.0;
    for (int i = 0; i < cfg.l; ++i) sum += std::log2(1.0 + cfg.rho_bar * gains[i]);
    return sum;
  });
  return EmpiricalSample::from_unsorted(std::move(values), seed,
                                        config_fingerprint(cfg, "bub_exact"));
}

EmpiricalSample sample_mub_exact(const SystemConfig& cfg, std::size_t trials,
                                 std::uint64_t seed, Workers workers) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("sample_mub_exact: trials must be >= 1");
  auto values = run_trials(trials, seed, workers, [&](Philox4x32& rng) {
    std::vector<double> gains(static_cast<std::size_t>(cfg.n_r));
    double total = 0.0;
    for (int h = 0; h < cfg.n_t; ++h) {
      for (auto& g : gains) g = rng.exponential();
      // Top-L are the last L after partitioning at n_r - l.
      const auto cut = gains.begin() + (cfg.n_r - cfg.l);
      std::nth_element(gains.begin(), cut, gains.end());
      const double top = std::accumulate(cut, gains.end(), 0.0);
      total += std::log2(1.0 + cfg.rho_bar * top);
    }
    return total;
  });
  return EmpiricalSample::from_unsorted(std::move(values), seed,
                                        config_fingerprint(cfg, "mub_exact"));
}

EmpiricalSample sample_channel_bound(const SystemConfig& cfg, Regime regime,
                                     std::size_t trials, std::uint64_t seed,
                                     Workers workers) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("sample_channel_bound: trials must be >= 1");
  auto values = run_trials(trials, seed, workers, [&](Philox4x32& rng) {
    return bound_of_channel(sample_channel(cfg, rng), cfg, regime);
  });
  return EmpiricalSample::from_unsorted(
      std::move(values), seed,
      config_fingerprint(cfg, std::string("channel_") + to_string(regime)));
}

EmpiricalSample sample_selected_capacity(const SystemConfig& cfg,
                                         std::size_t trials, std::uint64_t seed,
                                         SelectionMethod method, Workers workers,
                                         std::uint64_t budget) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("sample_selected_capacity: trials must be >= 1");
  if (method == SelectionMethod::Exhaustive && binomial(cfg.n_r, cfg.l) > budget) {
    throw IntractableError("sample_selected_capacity: exhaustive search over C(" +
                           std::to_string(cfg.n_r) + ", " + std::to_string(cfg.l) +
                           ") subsets exceeds the budget; use the greedy method");
  }
  auto values = run_trials(trials, seed, workers, [&](Philox4x32& rng) {
    return select_antennas(sample_channel(cfg, rng), cfg, method, budget).capacity;
  });
  return EmpiricalSample::from_unsorted(
      std::move(values), seed,
      config_fingerprint(cfg, std::string("capacity_") + to_string(method)));
}

PairedTrials sample_bound_and_capacity(const SystemConfig& cfg, Regime regime,
                                       std::size_t trials, std::uint64_t seed,
                                       SelectionMethod method, Workers workers,
                                       std::uint64_t budget) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("sample_bound_and_capacity: trials must be >= 1");
  if (method == SelectionMethod::Exhaustive && binomial(cfg.n_r, cfg.l) > budget) {
    throw IntractableError("sample_bound_and_capacity: exhaustive search exceeds the "
                           "budget; use the greedy method");
  }
  PairedTrials out;
  out.bound.resize(trials);
  out.capacity.resize(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    Philox4x32 rng(seed, t);
    const ChannelMatrix h = sample_channel(cfg, rng);
    out.bound[t] = bound_of_channel(h, cfg, regime);
    out.capacity[t] = select_antennas(h, cfg, method, budget).capacity;
  });
  return out;
}

namespace {

void require_nonempty(std::size_t n) {
  if (n == 0) throw std::invalid_argument("ks_distance: empty input");
}

// Sup |F_emp - F| over all jumps of the empirical CDF, for continuous F.
double ks_at_samples(const std::vector<double>& xs,
                     const std::function<double(double)>& cdf) {
  const auto n = static_cast<double>(xs.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i;
    while (j < xs.size() && xs[j] == xs[i]) ++j;
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs(f - j / n)});
    i = j;
  }
  return d;
}

}  // namespace

double ks_distance(const EmpiricalSample& a, const EmpiricalSample& b) {
  require_nonempty(a.size());
  require_nonempty(b.size());
  const auto& x = a.values;
  const auto& y = b.values;
  const auto na = static_cast<double>(x.size());
  const auto nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

double ks_distance(const EmpiricalSample& a, const std::function<double(double)>& cdf) {
  require_nonempty(a.size());
  return ks_at_samples(a.values, cdf);
}

double ks_distance(const EmpiricalSample& a, const DensityGrid& b) {
  require_nonempty(a.size());
  require_nonempty(b.size());
  double d = ks_at_samples(a.values, [&](double x) { return b.cdf_at(x); });
  for (std::size_t k = 0; k < b.size(); ++k) {
    d = std::max(d, std::abs(a.cdf_at(b.x(k)) - b.cdf[k]));
  }
  return d;
}

double ks_distance(const DensityGrid& a, const DensityGrid& b) {
  require_nonempty(a.size());
  require_nonempty(b.size());
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    d = std::max(d, std::abs(a.cdf[k] - b.cdf_at(a.x(k))));
  }
  for (std::size_t k = 0; k < b.size(); ++k) {
    d = std::max(d, std::abs(b.cdf[k] - a.cdf_at(b.x(k))));
  }
  return d;
}

Summary summarize(const EmpiricalSample& s) { return summarize(s.values); }

Summary summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  std::sort(values.begin(), values.end());
  Summary out;
  out.n = values.size();
  const auto n = static_cast<double>(out.n);
  // Two-pass mean/variance.
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.variance = out.n > 1 ? ss / (n - 1.0) : 0.0;
  out.standard_error = std::sqrt(out.variance / n);
  auto quantile = [&](double p) {
    const double h = (n - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
  };
  out.q01 = quantile(0.01);
  out.q50 = quantile(0.50);
  out.q99 = quantile(0.99);
  return out;
}

}  // namespace rascap
