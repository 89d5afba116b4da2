#ifndef VMPROX_TRACE_CSV_HPP
#define VMPROX_TRACE_CSV_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vmprox/solvers.hpp"

namespace vmprox {

/// Column order of every trace file.
inline constexpr const char* kTraceHeader =
    "epoch,passes,seconds,objective,gap,grad_map_norm,u_min,u_max,alpha1,alpha2,t_k";

/// One data row, reals printed with 17 significant digits.
std::string format_row(const EpochRecord& record);
std::string trace_csv(const RunTrace& trace);

struct LabelledTrace {
  std::string solver;
  RunTrace trace;
};

/// Long format: `solver` column prepended to the trace columns.
std::string compare_csv(std::span<const LabelledTrace> traces);

/// Gap of the last epoch whose pass count does not exceed `budget`; NaN if
/// the first epoch already exceeds it.
double gap_at_passes(const RunTrace& trace, double budget);

/// solver,gap_at_5,gap_at_10,gap_at_20,gap_at_30
std::string summary_csv(std::span<const LabelledTrace> traces,
                        std::span<const double> budgets);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace vmprox

#endif  // VMPROX_TRACE_CSV_HPP
