#pragma once

// Subcommands of the rgflow tool: verify, flow, wtilde.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rgflow/cli/checks.hpp"
#include "rgflow/cli/config.hpp"

namespace rgflow::cli {

enum ExitCode : int {
  kSuccess = 0,
  kCheckFailure = 1,
  kConfigError = 2,
};

/// Flow records for every c on the ladder plus the semigroup cross-check.
/// Throws FlowError naming the offending c.
nlohmann::json flow_json(const RunConfig& cfg, std::uint64_t seed);

/// c, residual, then one column per projected monomial.
std::string flow_csv(const nlohmann::json& flow);

/// x1..xn, wtilde, w, w_free
std::string wtilde_csv(const RunConfig& cfg);

/// One line per check.
std::string format_report(const std::vector<CheckResult>& results);

class FlowError : public Error {
 public:
  FlowError(double c, const std::string& what);
  double c() const { return c_; }

 private:
  double c_;
};

/// Entry point. `args` includes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace rgflow::cli
