// Acceptance gate: prints one [PASS]/[FAIL] line per criterion and exits
// nonzero if any criterion fails.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rascap/validation.hpp"

int main(int argc, char** argv) {
  CLI::App app{"rascap acceptance suite"};
  rascap::ValidationOptions opt;
  std::string suite = "full";
  std::string report_path;
  app.add_option("--only", opt.only, "criteria to run (default: all)")
      ->check(CLI::Range(1, rascap::kCriterionCount));
  app.add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  app.add_option("--seed", opt.seed, "master seed");
  app.add_option("--report", report_path, "write the JSON report here");
  CLI11_PARSE(app, argc, argv);
  opt.suite = rascap::suite_from_string(suite);

  const auto report = rascap::run_validation(opt);
  for (const auto& r : report.criteria) {
    std::printf("%s (%.1f s)\n", rascap::summary_line(r).c_str(), r.seconds);
  }
  if (!report_path.empty()) std::ofstream(report_path) << report.to_json() << '\n';
  return report.pass() ? 0 : 1;
}
