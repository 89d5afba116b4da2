#include "vmprox/run_spec.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "vmprox/errors.hpp"

namespace vmprox {

using nlohmann::json;

int InnerSize::resolve(std::size_t n) const {
  const double raw = per_sample ? value * static_cast<double>(n) : value;
  const double rounded = std::round(raw);
  if (!(rounded < 2147483647.0)) throw ConfigError("inner-loop cap m is too large");
  return std::max(1, static_cast<int>(rounded));
}

InnerSize parse_inner_size(const std::string& text) {
  std::string body = text;
  InnerSize m;
  m.per_sample = !body.empty() && body.back() == 'n';
  if (m.per_sample) body.pop_back();
  if (m.per_sample && body.empty()) body = "1";
  const char* first = body.data();
  const char* last = first + body.size();
  const auto [ptr, ec] = std::from_chars(first, last, m.value);
  if (ec != std::errc() || ptr != last || body.empty()) {
    throw ConfigError("cannot parse m = '" + text + "' (expected e.g. 500 or 0.07n)");
  }
  if (!(m.value > 0.0) || !std::isfinite(m.value)) {
    throw ConfigError("m must be positive, got '" + text + "'");
  }
  return m;
}

std::string to_string(const InnerSize& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", m.value);
  return m.per_sample ? std::string(buf) + "n" : std::string(buf);
}

json to_json(const RunSpec& s) {
  json j = {
      {"data", s.data},
      {"algorithm", s.algorithm},
      {"label", s.label},
      {"lambda1", s.lambda1},
      {"lambda2", s.lambda2},
      {"m", to_string(s.m)},
      {"b", s.b},
      {"epochs", s.epochs},
      {"eta0", s.eta0},
      {"omega", s.omega},
      {"sampling", s.sampling},
      {"seed", s.seed},
      {"ref_tol", s.ref_tol},
      {"output", s.output},
      {"inner_length", s.inner_length},
      {"normalize", s.normalize},
      {"record_time", s.record_time},
  };
  j["dim"] = s.dim ? json(*s.dim) : json(nullptr);
  // JSON has no infinity; null means "no cap".
  j["metric_cap"] = std::isfinite(s.metric_cap) ? json(s.metric_cap) : json(nullptr);
  return j;
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  try {
    out = j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

RunSpec spec_from_json(const json& doc, RunSpec s) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    const char* k = key.c_str();
    if (key == "data") read(v, k, s.data);
    else if (key == "algorithm") read(v, k, s.algorithm);
    else if (key == "label") read(v, k, s.label);
    else if (key == "lambda1") read(v, k, s.lambda1);
    else if (key == "lambda2") read(v, k, s.lambda2);
    else if (key == "m") {
      if (v.is_string()) s.m = parse_inner_size(v.get<std::string>());
      else if (v.is_number()) s.m = InnerSize{v.get<double>(), false};
      else throw ConfigError("config key 'm' must be a number or a string like \"0.07n\"");
    }
    else if (key == "b") read(v, k, s.b);
    else if (key == "epochs") read(v, k, s.epochs);
    else if (key == "eta0") read(v, k, s.eta0);
    else if (key == "omega") read(v, k, s.omega);
    else if (key == "sampling") read(v, k, s.sampling);
    else if (key == "seed") read(v, k, s.seed);
    else if (key == "ref_tol") read(v, k, s.ref_tol);
    else if (key == "output") read(v, k, s.output);
    else if (key == "inner_length") read(v, k, s.inner_length);
    else if (key == "normalize") read(v, k, s.normalize);
    else if (key == "record_time") read(v, k, s.record_time);
    else if (key == "dim") {
      if (v.is_null()) s.dim.reset();
      else {
        std::size_t d = 0;
        read(v, k, d);
        s.dim = d;
      }
    }
    else if (key == "metric_cap") {
      if (v.is_null()) s.metric_cap = std::numeric_limits<double>::infinity();
      else read(v, k, s.metric_cap);
    }
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return s;
}

void validate_spec(const RunSpec& s) {
  parse_algorithm(s.algorithm);
  parse_sampling_scheme(s.sampling);
  parse_inner_length(s.inner_length);
  if (!(s.lambda1 >= 0.0) || !(s.lambda2 >= 0.0)) {
    throw ConfigError("lambda1 and lambda2 must be nonnegative");
  }
  if (!(s.ref_tol > 0.0)) throw ConfigError("ref_tol must be positive");
  if (!(s.metric_cap > 0.0)) throw ConfigError("metric_cap must be positive");
  if (s.b < 1) throw ConfigError("mini-batch size b must be >= 1");
  if (s.epochs < 1) throw ConfigError("number of epochs K must be >= 1");
  if (!(s.m.value > 0.0)) throw ConfigError("m must be positive");
}

SolverConfig to_solver_config(const RunSpec& s, std::size_t n) {
  validate_spec(s);
  SolverConfig c;
  c.algorithm = parse_algorithm(s.algorithm);
  c.m = s.m.resolve(n);
  c.b = s.b;
  c.epochs = s.epochs;
  c.eta0 = s.eta0;
  c.metric.omega = s.omega;
  c.metric.cap = s.metric_cap;
  c.sampling = parse_sampling_scheme(s.sampling);
  c.seed = s.seed;
  c.inner = parse_inner_length(s.inner_length);
  validate(c, n);
  return c;
}

Regularizer regularizer_of(const RunSpec& s) { return Regularizer::lasso(s.lambda1); }

std::filesystem::path resolve_data_path(const std::string& name) {
  namespace fs = std::filesystem;
  const fs::path literal(name);
  if (fs::exists(literal)) return literal;
  const char* root = std::getenv("VMPROX_DATA_DIR");
  if (root != nullptr && *root != '\0' && literal.is_relative()) {
    for (const char* suffix : {"", ".txt", ".libsvm", ".gz"}) {
      fs::path candidate = fs::path(root) / (name + suffix);
      if (fs::exists(candidate)) return candidate;
    }
  }
  return literal;
}

}  // namespace vmprox
