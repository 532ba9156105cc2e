#pragma once

// Acceptance suite. Each criterion produces named measurements compared
// against pinned thresholds, plus a digest of the raw numbers it computed so
// that reruns with other worker counts can be compared byte for byte.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rascap/parallel.hpp"

namespace rascap {

enum class Suite { Fast, Full };

const char* to_string(Suite s);
Suite suite_from_string(const std::string& s);

enum class Relation { LessEqual, GreaterEqual, Less, Greater };

const char* to_string(Relation r);

struct Measurement {
  std::string name;
  double value = 0.0;
  Relation relation = Relation::LessEqual;
  double threshold = 0.0;
  /// Informational measurements are reported but do not decide the verdict.
  bool gating = true;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  double seconds = 0.0;
  double runtime_limit = 0.0;
  /// FNV-1a over every computed value, excluding wall-clock time.
  std::string digest;
  /// Set when the criterion threw before finishing.
  std::string error;
  std::vector<Measurement> measurements;
};

struct ValidationOptions {
  Suite suite = Suite::Full;
  std::uint64_t seed = 0;
  /// Worker count for criteria 1-7.
  Workers workers = Workers::from_env();
  /// Worker counts compared by criterion 8.
  std::vector<unsigned> reproducibility_workers{1, 4, 8};
  /// Criteria to run; empty means all.
  std::vector<int> only;
  /// Test hook: replaces this criterion's thresholds with unattainable ones.
  std::optional<int> corrupt_criterion;
};

struct ValidationReport {
  Suite suite = Suite::Full;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::vector<CriterionResult> criteria;

  bool pass() const;
  /// Pretty-printed JSON document.
  std::string to_json() const;
};

inline constexpr int kCriterionCount = 8;

/// Runs a single criterion (1..8).
CriterionResult run_criterion(int id, const ValidationOptions& options);

ValidationReport run_validation(const ValidationOptions& options);

/// One line: "[PASS] 3 title: name=value <= threshold; ...".
std::string summary_line(const CriterionResult& r);

}  // namespace rascap
