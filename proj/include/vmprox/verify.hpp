#ifndef VMPROX_VERIFY_HPP
#define VMPROX_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace vmprox {

enum class Fault { None, CorruptProx };

struct VerifyOptions {
  std::uint64_t seed = 20190601;
  Fault fault = Fault::None;  ///< test hook: deliberately break a component
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double worst = 0.0;      ///< largest observed violation measure
  double tolerance = 0.0;  ///< pass threshold for `worst`
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  std::vector<std::string> failures() const;
};

/// Runs the oracle and property suite. Deterministic for a fixed seed.
VerifyReport run_verification(const VerifyOptions& options = {});

/// Fixed-width pass/fail table, one line per check.
std::string format_report(const VerifyReport& report);

}  // namespace vmprox

#endif  // VMPROX_VERIFY_HPP
