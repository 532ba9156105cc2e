#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// it can be driven in-process by tests.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rascap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Thrown for bad flag values; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "a,b,c" and "start:step:stop" (inclusive), mixed freely.
std::vector<int> parse_int_list(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);

/// 9 significant digits, shortest of %g style.
std::string format_real(double v);

using Cell = std::variant<double, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Trailing name/value rows (CSV) or a "summary" object (JSON).
  std::vector<std::pair<std::string, double>> summary;

  std::string to_csv() const;
  std::string to_json() const;
};

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rascap::cli
