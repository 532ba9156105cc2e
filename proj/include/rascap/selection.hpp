#pragma once

// Receive-antenna subset selection: exhaustive search over all C(N_r, L)
// row subsets, and add-one greedy search with rank-one inverse updates.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rascap/channel.hpp"

namespace rascap {

inline constexpr std::uint64_t kDefaultExhaustiveBudget = 2'000'000;

/// Exhaustive search was asked to enumerate more subsets than allowed.
class IntractableError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct SelectionResult {
  /// Selected row indices, ascending.
  std::vector<int> subset;
  double capacity = 0.0;
};

enum class SelectionMethod { Exhaustive, Greedy };

const char* to_string(SelectionMethod m);

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

/// Maximizes log2 det(I + rho H_S H_S^dagger) over |S| = L. Subsets are
/// visited in lexicographic order and only a strictly larger value replaces
/// the incumbent, so exact ties resolve to the lexicographically smallest.
SelectionResult exhaustive_select(
    const ChannelMatrix& h, const SystemConfig& cfg,
    std::uint64_t budget = kDefaultExhaustiveBudget);

struct GreedyStep {
  int row = -1;
  /// log2(1 + rho h_k P h_k^dagger), the determinant-lemma increment.
  double increment = 0.0;
  /// Running sum of increments after this step.
  double capacity = 0.0;
};

struct GreedyTrace {
  SelectionResult result;
  std::vector<GreedyStep> steps;
};

/// Add-one greedy search. Keeps P = (I + rho H_S^dagger H_S)^{-1} up to date
/// with Sherman-Morrison and rebuilds it from scratch every
/// `refresh_interval` steps.
GreedyTrace greedy_select_traced(const ChannelMatrix& h,
                                 const SystemConfig& cfg,
                                 int refresh_interval = 32);

SelectionResult greedy_select(const ChannelMatrix& h, const SystemConfig& cfg);

SelectionResult select_antennas(const ChannelMatrix& h, const SystemConfig& cfg,
                                SelectionMethod method,
                                std::uint64_t budget = kDefaultExhaustiveBudget);

}  // namespace rascap
