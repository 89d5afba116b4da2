#include "vmprox/trace_csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <unistd.h>

#include "vmprox/errors.hpp"

namespace vmprox {

namespace {

void append_real(std::string& out, double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  out += buf;
}

}  // namespace

std::string format_row(const EpochRecord& r) {
  std::string line = std::to_string(r.epoch);
  for (double x : {r.passes, r.seconds, r.objective, r.gap, r.grad_map_norm, r.u_min,
                   r.u_max, r.alpha1, r.alpha2}) {
    line += ',';
    append_real(line, x);
  }
  line += ',';
  line += std::to_string(r.t_k);
  return line;
}

std::string trace_csv(const RunTrace& trace) {
  std::string out = kTraceHeader;
  out += '\n';
  for (const auto& r : trace.epochs) {
    out += format_row(r);
    out += '\n';
  }
  return out;
}

std::string compare_csv(std::span<const LabelledTrace> traces) {
  std::string out = "solver,";
  out += kTraceHeader;
  out += '\n';
  for (const auto& t : traces) {
    for (const auto& r : t.trace.epochs) {
      out += t.solver;
      out += ',';
      out += format_row(r);
      out += '\n';
    }
  }
  return out;
}

double gap_at_passes(const RunTrace& trace, double budget) {
  double gap = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : trace.epochs) {
    if (r.passes > budget + 1e-9) break;
    gap = r.gap;
  }
  return gap;
}

std::string summary_csv(std::span<const LabelledTrace> traces,
                        std::span<const double> budgets) {
  std::string out = "solver";
  char buf[64];
  for (double b : budgets) {
    std::snprintf(buf, sizeof buf, ",gap_at_%g", b);
    out += buf;
  }
  out += '\n';
  for (const auto& t : traces) {
    out += t.solver;
    for (double b : budgets) {
      out += ',';
      append_real(out, gap_at_passes(t.trace, b));
    }
    out += '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot open '" + tmp.string() + "' for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error("cannot rename onto '" + path.string() + "'");
  }
}

}  // namespace vmprox
