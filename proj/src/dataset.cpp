#include "vmprox/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include <zlib.h>

#include "vmprox/errors.hpp"

namespace vmprox {

double SparseRow::dot(const Vector& w) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    acc += values[k] * w[indices[k]];
  }
  return acc;
}

void SparseRow::axpy(double alpha, Vector& y) const {
  for (std::size_t k = 0; k < indices.size(); ++k) {
    y[indices[k]] += alpha * values[k];
  }
}

double SparseRow::squared_norm() const {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

Dataset::Dataset(std::vector<std::size_t> row_ptr,
                 std::vector<std::uint32_t> indices, std::vector<double> values,
                 std::vector<double> labels, std::size_t dim)
    : row_ptr_(std::move(row_ptr)),
      indices_(std::move(indices)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      dim_(dim) {
  if (labels_.empty()) throw ParseError(0, "dataset has no rows");
  if (dim_ == 0) throw ParseError(0, "dataset has dimension 0");
  if (row_ptr_.size() != labels_.size() + 1 || row_ptr_.front() != 0 ||
      row_ptr_.back() != values_.size() || indices_.size() != values_.size()) {
    throw ParseError(0, "inconsistent CSR arrays");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 1.0 && labels_[i] != -1.0) {
      throw ParseError(i + 1, "label must be -1 or +1");
    }
    if (row_ptr_[i + 1] < row_ptr_[i]) throw ParseError(0, "row_ptr decreasing");
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      if (indices_[k] >= dim_) throw ParseError(i + 1, "index exceeds dimension");
      if (k > row_ptr_[i] && indices_[k] <= indices_[k - 1]) {
        throw ParseError(i + 1, "indices not strictly increasing");
      }
      if (!std::isfinite(values_[k])) throw ParseError(i + 1, "non-finite value");
    }
  }
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::string_view next_token(std::string_view& rest) {
  std::size_t b = 0;
  while (b < rest.size() && is_space(rest[b])) ++b;
  std::size_t e = b;
  while (e < rest.size() && !is_space(rest[e])) ++e;
  auto tok = rest.substr(b, e - b);
  rest.remove_prefix(e);
  return tok;
}

double parse_double(std::string_view tok, std::size_t line, const char* what) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, value);
  if (tok.empty() || ec != std::errc() || ptr != end) {
    throw ParseError(line, std::string("non-numeric ") + what + " '" +
                               std::string(tok) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(line, std::string("non-finite ") + what);
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string gunzip(const std::string& compressed) {
  z_stream zs{};
  if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) {
    throw ParseError(0, "zlib initialisation failed");
  }
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(compressed.data()));
  zs.avail_in = static_cast<uInt>(compressed.size());
  std::string out;
  char buffer[1 << 16];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = reinterpret_cast<Bytef*>(buffer);
    zs.avail_out = sizeof(buffer);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw ParseError(0, "corrupt gzip stream");
    }
    out.append(buffer, sizeof(buffer) - zs.avail_out);
    // concatenated gzip members
    if (rc == Z_STREAM_END && zs.avail_in > 0) {
      inflateReset(&zs);
      rc = Z_OK;
    }
  }
  inflateEnd(&zs);
  return out;
}

}  // namespace

Dataset parse_libsvm(std::string_view text, const ParseOptions& options) {
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::vector<double> labels;
  std::size_t max_index = 0;

  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    auto label_tok = next_token(line);
    if (label_tok.empty()) continue;

    const double raw_label = parse_double(label_tok, line_no, "label");
    if (raw_label == 1.0) {
      labels.push_back(1.0);
    } else if (raw_label == -1.0 || raw_label == 0.0) {
      labels.push_back(-1.0);
    } else {
      throw ParseError(line_no, "label '" + std::string(label_tok) +
                                    "' is not one of 0, -1, +1");
    }

    std::size_t prev = 0;
    for (auto tok = next_token(line); !tok.empty(); tok = next_token(line)) {
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "expected <index>:<value>, got '" +
                                      std::string(tok) + "'");
      }
      const auto idx_tok = tok.substr(0, colon);
      unsigned long long idx = 0;
      auto [ptr, ec] =
          std::from_chars(idx_tok.data(), idx_tok.data() + idx_tok.size(), idx);
      if (idx_tok.empty() || ec != std::errc() ||
          ptr != idx_tok.data() + idx_tok.size()) {
        throw ParseError(line_no, "non-numeric index '" + std::string(idx_tok) + "'");
      }
      if (idx == 0) throw ParseError(line_no, "feature index must be >= 1");
      if (idx > std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError(line_no, "feature index too large");
      }
      if (idx == prev) throw ParseError(line_no, "duplicate feature index " + std::to_string(idx));
      if (idx < prev) throw ParseError(line_no, "non-increasing feature index " + std::to_string(idx));
      prev = idx;
      const double value = parse_double(tok.substr(colon + 1), line_no, "value");
      indices.push_back(static_cast<std::uint32_t>(idx - 1));
      values.push_back(value);
      max_index = std::max<std::size_t>(max_index, idx);
    }
    row_ptr.push_back(values.size());
  }

  if (labels.empty()) throw ParseError(0, "empty input");

  std::size_t dim = max_index;
  if (options.dimension) {
    if (*options.dimension < max_index) {
      throw ParseError(0, "dimension override " + std::to_string(*options.dimension) +
                              " is smaller than the largest index " +
                              std::to_string(max_index));
    }
    dim = *options.dimension;
  }
  if (dim == 0) throw ParseError(0, "no features present; supply a dimension");
  return Dataset(std::move(row_ptr), std::move(indices), std::move(values),
                 std::move(labels), dim);
}

Dataset load_libsvm(const std::filesystem::path& path, const ParseOptions& options) {
  std::string bytes = read_file(path);
  if (bytes.size() >= 2 && static_cast<unsigned char>(bytes[0]) == 0x1F &&
      static_cast<unsigned char>(bytes[1]) == 0x8B) {
    bytes = gunzip(bytes);
  }
  return parse_libsvm(bytes, options);
}

std::string serialize_libsvm(const Dataset& ds) {
  std::string out;
  char buf[64];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    out += ds.label(i) > 0 ? "+1" : "-1";
    const auto row = ds.row(i);
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      std::snprintf(buf, sizeof(buf), " %u:%.17g", row.indices[k] + 1, row.values[k]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

Dataset normalize_rows(const Dataset& ds) {
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::vector<double> labels(ds.labels().begin(), ds.labels().end());
  indices.reserve(ds.nnz());
  values.reserve(ds.nnz());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const auto row = ds.row(i);
    const double norm = std::sqrt(row.squared_norm());
    for (std::size_t k = 0; k < row.nnz(); ++k) {
      indices.push_back(row.indices[k]);
      values.push_back(norm > 0.0 ? row.values[k] / norm : row.values[k]);
    }
    row_ptr.push_back(values.size());
  }
  return Dataset(std::move(row_ptr), std::move(indices), std::move(values),
                 std::move(labels), ds.d());
}

SmoothnessProfile make_profile(std::vector<double> per_component) {
  SmoothnessProfile p;
  p.per_component = std::move(per_component);
  double sum = 0.0;
  for (double l : p.per_component) {
    sum += l;
    p.max = std::max(p.max, l);
  }
  p.mean = p.per_component.empty() ? 0.0 : sum / static_cast<double>(p.per_component.size());
  return p;
}

SmoothnessProfile component_lipschitz(const Dataset& ds, double lambda2) {
  if (!(lambda2 >= 0.0)) throw ConfigError("lambda2 must be nonnegative");
  std::vector<double> l(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) {
    l[i] = ds.row(i).squared_norm() / 4.0 + lambda2;
    if (!(l[i] > 0.0)) throw DegenerateRowError(i);
  }
  return make_profile(std::move(l));
}

}  // namespace vmprox
