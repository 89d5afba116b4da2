#ifndef VMPROX_COMMANDS_HPP
#define VMPROX_COMMANDS_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "vmprox/dataset.hpp"
#include "vmprox/run_spec.hpp"
#include "vmprox/verify.hpp"

namespace vmprox::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseFailure = 2,     ///< unreadable or malformed dataset / config file
  kDivergence = 3,
  kInvalidConfig = 4,
  kVerifyFailure = 5,
  kReferenceFailure = 6, ///< reference solver did not certify its tolerance
};

/// Maps the library's exception types onto exit codes, printing the message.
int guarded(const std::function<int()>& body, std::ostream& err);

Dataset load_dataset(const RunSpec& spec);

/// Expands "key=v1,v2,..." sweep axes into the cartesian product of specs.
/// Swept values are appended to each spec's label.
std::vector<RunSpec> expand_sweep(const RunSpec& base, const std::vector<std::string>& axes);

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err);

struct CompareOptions {
  std::vector<RunSpec> specs;
  std::string output;  ///< merged CSV; summary goes next to it
  int jobs = 1;
};
int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err);

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

/// Reference solution and smoothness profiles as JSON.
int cmd_reference(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace vmprox::cli

#endif  // VMPROX_COMMANDS_HPP
