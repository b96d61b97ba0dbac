#pragma once

// Seeded property suites behind `rgflow verify`.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rgflow::cli {

struct CheckResult {
  std::string suite;
  std::string name;
  /// Largest observed error. For negative controls this is the smallest
  /// observed margin, and the check passes when it exceeds `tolerance`.
  double max_error = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool margin = false;
};

/// group, gaussian, convolution, renorm
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all". Throws InvalidArgument for an
/// unknown name.
std::vector<CheckResult> run_suite(std::string_view name, std::uint64_t seed);

}  // namespace rgflow::cli
