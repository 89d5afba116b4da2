// vmprox: run, compare and verify variable-metric proximal stochastic
// gradient solvers on LIBSVM data.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vmprox/commands.hpp"
#include "vmprox/errors.hpp"

namespace {

using vmprox::RunSpec;
using namespace vmprox::cli;

struct SpecFlags {
  std::string config;
  std::optional<std::string> data, algorithm, m, sampling, output, inner_length, label;
  std::optional<double> lambda1, lambda2, eta0, omega, ref_tol, metric_cap;
  std::optional<int> b, epochs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> dim;
  bool normalize = false;
  bool record_time = false;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "JSON RunSpec; flags override its fields");
    app.add_option("--data", data, "LIBSVM file (plain or gzip) or name under $VMPROX_DATA_DIR");
    app.add_option("--algorithm", algorithm,
                   "VM-mSRGBB, Prox-SVRG, Prox-SVRG-BB, mS2GD, mS2GD-BB, mSARAH, mSARAH-BB");
    app.add_option("--lambda1", lambda1, "l1 weight");
    app.add_option("--lambda2", lambda2, "ridge weight inside F");
    app.add_option("--m", m, "inner-loop cap, absolute (500) or relative to n (0.07n)");
    app.add_option("--b", b, "mini-batch size");
    app.add_option("--epochs", epochs, "outer iterations K");
    app.add_option("--eta0", eta0, "initial stepsize (constant stepsize for non-BB solvers)");
    app.add_option("--omega", omega, "weight pulling the metric toward its predecessor");
    app.add_option("--sampling", sampling, "uniform or importance");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--ref-tol", ref_tol, "reference solver tolerance");
    app.add_option("--output,-o", output, "output file (stdout when omitted)");
    app.add_option("--inner-length", inner_length, "default, random or fixed");
    app.add_option("--dim", dim, "feature dimension override");
    app.add_option("--metric-cap", metric_cap, "upper bound on every stepsize");
    app.add_option("--label", label, "solver name in compare output");
    app.add_flag("--normalize", normalize, "scale every row to unit norm");
    app.add_flag("--record-time", record_time, "fill the seconds column (breaks byte-identical output)");
  }

  RunSpec build() const {
    RunSpec s;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw vmprox::ParseError(0, "cannot open config '" + config + "'");
      std::stringstream text;
      text << in.rdbuf();
      const auto doc = nlohmann::json::parse(text.str(), nullptr, false);
      if (doc.is_discarded()) throw vmprox::ConfigError("config '" + config + "' is not valid JSON");
      s = vmprox::spec_from_json(doc);
    }
    if (data) s.data = *data;
    if (algorithm) s.algorithm = *algorithm;
    if (label) s.label = *label;
    if (lambda1) s.lambda1 = *lambda1;
    if (lambda2) s.lambda2 = *lambda2;
    if (m) s.m = vmprox::parse_inner_size(*m);
    if (b) s.b = *b;
    if (epochs) s.epochs = *epochs;
    if (eta0) s.eta0 = *eta0;
    if (omega) s.omega = *omega;
    if (sampling) s.sampling = *sampling;
    if (seed) s.seed = *seed;
    if (ref_tol) s.ref_tol = *ref_tol;
    if (output) s.output = *output;
    if (inner_length) s.inner_length = *inner_length;
    if (dim) s.dim = *dim;
    if (metric_cap) s.metric_cap = *metric_cap;
    if (normalize) s.normalize = true;
    if (record_time) s.record_time = true;
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variable-metric proximal stochastic recursive gradient solvers"};
  app.require_subcommand(1);

  SpecFlags run_flags, compare_flags, reference_flags;
  auto* run = app.add_subcommand("run", "run one solver and write its per-epoch trace as CSV");
  run_flags.attach(*run);

  auto* compare = app.add_subcommand("compare", "run several solvers against one shared reference");
  compare_flags.attach(*compare);
  std::vector<std::string> spec_files, algorithms, sweeps;
  int jobs = 1;
  compare->add_option("--spec", spec_files, "extra JSON spec layered over the base flags (repeatable)");
  compare->add_option("--algorithms", algorithms, "solvers to compare")->delimiter(',');
  compare->add_option("--sweep", sweeps, "sweep axis key=v1,v2,... (repeatable)");
  compare->add_option("--jobs,-j", jobs, "concurrent runs");

  auto* verify = app.add_subcommand("verify", "run the oracle and property suite");
  vmprox::VerifyOptions verify_options;
  std::string fault;
  verify->add_option("--seed", verify_options.seed, "suite seed");
  verify->add_option("--inject-fault", fault)->group("");

  auto* reference = app.add_subcommand("reference", "compute P* and smoothness profiles as JSON");
  reference_flags.attach(*reference);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidConfig;
  }

  return guarded(
      [&]() -> int {
        if (*run) return cmd_run(run_flags.build(), std::cout, std::cerr);
        if (*reference) return cmd_reference(reference_flags.build(), std::cout, std::cerr);
        if (*verify) {
          if (fault == "corrupt-prox") verify_options.fault = vmprox::Fault::CorruptProx;
          else if (!fault.empty()) throw vmprox::ConfigError("unknown fault '" + fault + "'");
          return cmd_verify(verify_options, std::cout, std::cerr);
        }
        const RunSpec base = compare_flags.build();
        std::vector<RunSpec> variants;
        for (const auto& file : spec_files) {
          std::ifstream in(file);
          if (!in) throw vmprox::ParseError(0, "cannot open spec '" + file + "'");
          std::stringstream text;
          text << in.rdbuf();
          const auto doc = nlohmann::json::parse(text.str(), nullptr, false);
          if (doc.is_discarded()) throw vmprox::ConfigError("spec '" + file + "' is not valid JSON");
          variants.push_back(vmprox::spec_from_json(doc, base));
        }
        if (variants.empty()) variants.push_back(base);
        if (!algorithms.empty()) {
          std::vector<RunSpec> expanded;
          for (const auto& v : variants) {
            for (const auto& a : algorithms) {
              RunSpec e = v;
              e.algorithm = a;
              expanded.push_back(e);
            }
          }
          variants = std::move(expanded);
        }
        CompareOptions options;
        for (const auto& v : variants) {
          for (auto& s : expand_sweep(v, sweeps)) options.specs.push_back(std::move(s));
        }
        options.output = base.output;
        options.jobs = jobs;
        return cmd_compare(options, std::cout, std::cerr);
      },
      std::cerr);
}
