#include "vmprox/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

#include "vmprox/diagnostics.hpp"
#include "vmprox/errors.hpp"
#include "vmprox/model.hpp"
#include "vmprox/trace_csv.hpp"

namespace vmprox::cli {

using nlohmann::json;

int guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kDivergence;
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const MaxIterationsError& e) {
    err << "error: " << e.what() << '\n';
    return kReferenceFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

Dataset load_dataset(const RunSpec& spec) {
  if (spec.data.empty()) throw ConfigError("no dataset given (--data)");
  ParseOptions opts;
  opts.dimension = spec.dim;
  Dataset ds = load_libsvm(resolve_data_path(spec.data), opts);
  return spec.normalize ? normalize_rows(ds) : ds;
}

namespace {

json parse_sweep_value(const std::string& key, const std::string& text) {
  if (key == "m") return text;
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded() || v.is_object() || v.is_array()) return text;
  return v;
}

std::string split_axis(const std::string& axis, std::vector<std::string>& values) {
  const auto eq = axis.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == axis.size()) {
    throw ConfigError("sweep axis must look like key=v1,v2,... (got '" + axis + "')");
  }
  std::size_t start = eq + 1;
  while (true) {
    const auto comma = axis.find(',', start);
    values.push_back(axis.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (values.back().empty()) throw ConfigError("empty value in sweep '" + axis + "'");
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return axis.substr(0, eq);
}

std::string label_of(const RunSpec& s) { return s.label.empty() ? s.algorithm : s.label; }

void make_labels_unique(std::vector<RunSpec>& specs) {
  std::map<std::string, int> seen;
  for (auto& s : specs) {
    s.label = label_of(s);
    if (int k = ++seen[s.label]; k > 1) s.label += "#" + std::to_string(k);
  }
}

struct Problem {
  Dataset data;
  LogisticRidge smooth;
  Regularizer reg;
  ReferenceSolution reference;

  Problem(Dataset ds, const RunSpec& spec)
      : data(std::move(ds)), smooth(data, spec.lambda2), reg(regularizer_of(spec)) {
    ReferenceOptions ro;
    ro.tol = spec.ref_tol;
    reference = compute_reference(smooth, reg, ro);
  }
};

RunTrace run_one(const RunSpec& spec, const Problem& p) {
  const auto config = to_solver_config(spec, p.data.n());
  RunOptions opts;
  opts.reference_value = p.reference.value;
  opts.record_time = spec.record_time;
  return run(config, p.smooth, p.reg, opts);
}

void report_reference(const Problem& p, std::ostream& err) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "reference: P* = %.17g, residual %.3e after %zu iterations\n",
                p.reference.value, p.reference.residual, p.reference.iterations);
  err << buf;
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) out << content;
  else write_atomic(path, content);
}

std::filesystem::path summary_path(const std::string& output) {
  std::filesystem::path p(output);
  const auto stem = p.stem().string();
  return p.parent_path() / (stem + ".summary.csv");
}

json profile_json(const SmoothnessProfile& p) {
  return {{"mean", p.mean}, {"max", p.max}};
}

}  // namespace

std::vector<RunSpec> expand_sweep(const RunSpec& base, const std::vector<std::string>& axes) {
  std::vector<RunSpec> specs{base};
  for (const auto& axis : axes) {
    std::vector<std::string> values;
    const auto key = split_axis(axis, values);
    std::vector<RunSpec> next;
    for (const auto& s : specs) {
      for (const auto& v : values) {
        RunSpec e = spec_from_json(json{{key, parse_sweep_value(key, v)}}, s);
        if (key != "algorithm" && key != "label") {
          e.label = (s.label.empty() ? s.algorithm : s.label) + " " + key + "=" + v;
        }
        next.push_back(std::move(e));
      }
    }
    specs = std::move(next);
  }
  return specs;
}

int cmd_run(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  validate_spec(spec);
  Problem problem(load_dataset(spec), spec);
  to_solver_config(spec, problem.data.n());
  report_reference(problem, err);
  const auto trace = run_one(spec, problem);
  emit(spec.output, trace_csv(trace), out);
  return kOk;
}

int cmd_compare(const CompareOptions& options, std::ostream& out, std::ostream& err) {
  if (options.specs.empty()) throw ConfigError("compare needs at least one spec");
  if (options.jobs < 1) throw ConfigError("--jobs must be >= 1");
  auto specs = options.specs;
  const auto& first = specs.front();
  for (const auto& s : specs) {
    validate_spec(s);
    if (s.data != first.data || s.lambda1 != first.lambda1 || s.lambda2 != first.lambda2 ||
        s.normalize != first.normalize || s.dim != first.dim) {
      throw ConfigError("compared specs must share dataset and regularization");
    }
  }
  make_labels_unique(specs);

  Problem problem(load_dataset(first), first);
  for (const auto& s : specs) to_solver_config(s, problem.data.n());
  report_reference(problem, err);

  const std::size_t count = specs.size();
  std::vector<std::optional<RunTrace>> traces(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  const auto worker = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        traces[i] = run_one(specs[i], problem);
      } catch (...) {
        errors[i] = std::current_exception();
        stop = true;
      }
    }
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), count);
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<LabelledTrace> done;
  for (std::size_t i = 0; i < count; ++i) {
    if (traces[i]) done.push_back({specs[i].label, std::move(*traces[i])});
  }
  emit(options.output, compare_csv(done), out);
  static constexpr double budgets[] = {5.0, 10.0, 20.0, 30.0};
  const auto summary = summary_csv(done, budgets);
  if (!options.output.empty()) write_atomic(summary_path(options.output), summary);
  err << summary;

  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return kOk;
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  const auto report = run_verification(options);
  out << format_report(report);
  if (report.all_pass()) return kOk;
  for (const auto& name : report.failures()) err << "verify failed: " << name << '\n';
  return kVerifyFailure;
}

int cmd_reference(const RunSpec& spec, std::ostream& out, std::ostream& err) {
  validate_spec(spec);
  RunSpec raw_spec = spec;
  raw_spec.normalize = false;
  const Dataset raw = load_dataset(raw_spec);
  const Dataset normalized = normalize_rows(raw);
  Problem problem(spec.normalize ? normalized : raw, spec);
  report_reference(problem, err);

  const auto raw_profile = component_lipschitz(raw, spec.lambda2);
  const auto norm_profile = component_lipschitz(normalized, spec.lambda2);
  const auto used = problem.smooth.smoothness();
  json doc = {
      {"data", spec.data},
      {"n", problem.data.n()},
      {"d", problem.data.d()},
      {"nnz", problem.data.nnz()},
      {"lambda1", spec.lambda1},
      {"lambda2", spec.lambda2},
      {"normalized", spec.normalize},
      {"p_star", problem.reference.value},
      {"residual", problem.reference.residual},
      {"iterations", problem.reference.iterations},
      {"polished", problem.reference.polished},
      {"l_omega", {{"uniform", build_distribution(used, SamplingScheme::Uniform).l_omega()},
                   {"importance", build_distribution(used, SamplingScheme::Importance).l_omega()}}},
      {"smoothness", {{"raw", profile_json(raw_profile)},
                      {"normalized", profile_json(norm_profile)}}},
  };
  emit(spec.output, doc.dump(2) + "\n", out);
  return kOk;
}

}  // namespace vmprox::cli
