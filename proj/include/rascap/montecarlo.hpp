#pragma once

// Monte-Carlo engines for the exact bounds and for the selected capacity,
// plus empirical-distribution utilities (KS distance, summaries).
//
// Trial t of a run with master seed s draws from the Philox stream (s, t),
// so every sample is a pure function of (configuration, trials, seed),
// independent of how trials are split across workers.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rascap/bounds.hpp"
#include "rascap/channel.hpp"
#include "rascap/parallel.hpp"
#include "rascap/random.hpp"
#include "rascap/selection.hpp"

namespace rascap {

inline constexpr std::size_t kDefaultTrials = 50'000;

struct EmpiricalSample {
  /// Ascending.
  std::vector<double> values;
  std::uint64_t seed = 0;
  /// Digest of the generating configuration and estimator name.
  std::string config_fingerprint;

  std::size_t size() const { return values.size(); }
  /// Right-continuous empirical CDF.
  double cdf_at(double x) const;

  static EmpiricalSample from_unsorted(std::vector<double> values,
                                       std::uint64_t seed,
                                       std::string fingerprint);
};

/// 64-bit FNV-1a of `bytes`, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

std::string config_fingerprint(const SystemConfig& cfg, std::string_view estimator);

/// Evaluates fn(rng) once per trial, trial t using stream (seed, t).
template <class Fn>
std::vector<double> run_trials(std::size_t trials, std::uint64_t seed,
                               Workers workers, Fn&& fn) {
  std::vector<double> out(trials);
  parallel_for(trials, workers, [&](std::size_t t) {
    Philox4x32 rng(seed, t);
    out[t] = fn(rng);
  });
  return out;
}

/// Beamforming bound: per trial, N_r Gamma(N_t, 1) row gains drawn
/// directly, sum of log2(1 + rho g) over the L largest.
EmpiricalSample sample_bub_exact(const SystemConfig& cfg, std::size_t trials,
                                 std::uint64_t seed,
                                 Workers workers = Workers::from_env());

/// MRC bound: per trial and column, N_r unit exponentials, top-L sum,
/// accumulated as sum_h log2(1 + rho * sum).
EmpiricalSample sample_mub_exact(const SystemConfig& cfg, std::size_t trials,
                                 std::uint64_t seed,
                                 Workers workers = Workers::from_env());

/// Bound of the requested regime evaluated on full channel realizations.
EmpiricalSample sample_channel_bound(const SystemConfig& cfg, Regime regime,
                                     std::size_t trials, std::uint64_t seed,
                                     Workers workers = Workers::from_env());

EmpiricalSample sample_selected_capacity(
    const SystemConfig& cfg, std::size_t trials, std::uint64_t seed,
    SelectionMethod method, Workers workers = Workers::from_env(),
    std::uint64_t budget = kDefaultExhaustiveBudget);

/// Per-trial (unsorted) bound and selected capacity on the same channel.
struct PairedTrials {
  std::vector<double> bound;
  std::vector<double> capacity;
};

PairedTrials sample_bound_and_capacity(
    const SystemConfig& cfg, Regime regime, std::size_t trials,
    std::uint64_t seed, SelectionMethod method,
    Workers workers = Workers::from_env(),
    std::uint64_t budget = kDefaultExhaustiveBudget);

/// Sup-distance between two CDFs, evaluated at every sample point (both
/// sides of each jump) and every grid knot.
double ks_distance(const EmpiricalSample& a, const EmpiricalSample& b);
double ks_distance(const EmpiricalSample& a, const DensityGrid& b);
double ks_distance(const DensityGrid& a, const DensityGrid& b);
/// Against a continuous CDF given as a function.
double ks_distance(const EmpiricalSample& a,
                   const std::function<double(double)>& cdf);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  /// (n-1)-normalized.
  double variance = 0.0;
  double standard_error = 0.0;
  double q01 = 0.0;
  double q50 = 0.0;
  double q99 = 0.0;
};

/// Quantiles interpolate linearly between order statistics.
Summary summarize(const EmpiricalSample& s);
Summary summarize(std::vector<double> values);

}  // namespace rascap
