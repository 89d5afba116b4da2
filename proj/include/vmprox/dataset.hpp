#ifndef VMPROX_DATASET_HPP
#define VMPROX_DATASET_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace vmprox {

using Vector = Eigen::VectorXd;

/// One row a_i of the design matrix. Indices are 0-based and strictly
/// increasing.
struct SparseRow {
  std::span<const std::uint32_t> indices;
  std::span<const double> values;

  std::size_t nnz() const { return indices.size(); }
  double dot(const Vector& w) const;
  /// y += alpha * a_i
  void axpy(double alpha, Vector& y) const;
  double squared_norm() const;
};

/// Immutable CSR design matrix with labels in {-1, +1}.
class Dataset {
 public:
  /// Validates every invariant; throws ParseError(0, ...) on violation.
  Dataset(std::vector<std::size_t> row_ptr, std::vector<std::uint32_t> indices,
          std::vector<double> values, std::vector<double> labels,
          std::size_t dim);

  std::size_t n() const { return labels_.size(); }
  std::size_t d() const { return dim_; }
  std::size_t nnz() const { return values_.size(); }

  SparseRow row(std::size_t i) const {
    const auto begin = row_ptr_[i];
    const auto len = row_ptr_[i + 1] - begin;
    return {std::span(indices_).subspan(begin, len),
            std::span(values_).subspan(begin, len)};
  }
  double label(std::size_t i) const { return labels_[i]; }
  std::span<const double> labels() const { return labels_; }

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> indices_;
  std::vector<double> values_;
  std::vector<double> labels_;
  std::size_t dim_;
};

struct ParseOptions {
  /// Feature dimension; must be >= the largest index in the file.
  std::optional<std::size_t> dimension;
};

/// Parses LIBSVM text ("<label> <idx>:<val> ..."). Labels 0/-1 map to -1 and
/// 1/+1 to +1; anything else, index 0, repeated or decreasing indices and
/// non-numeric tokens raise ParseError with the offending line.
Dataset parse_libsvm(std::string_view text, const ParseOptions& options = {});

/// Reads a LIBSVM file, transparently inflating gzip input (magic 1F 8B).
Dataset load_libsvm(const std::filesystem::path& path,
                    const ParseOptions& options = {});

/// Writes LIBSVM text with 17 significant digits, so parse(serialize(ds))
/// reproduces ds exactly.
std::string serialize_libsvm(const Dataset& ds);

/// Copy of `ds` with every nonzero row scaled to unit Euclidean norm.
Dataset normalize_rows(const Dataset& ds);

struct SmoothnessProfile {
  std::vector<double> per_component;
  double mean = 0.0;
  double max = 0.0;
};

/// L_i = ||a_i||^2 / 4 + lambda2 for the ridge-regularized logistic loss.
/// Throws DegenerateRowError when some L_i would be 0.
SmoothnessProfile component_lipschitz(const Dataset& ds, double lambda2);

/// Builds a profile from explicit per-component constants (all > 0).
SmoothnessProfile make_profile(std::vector<double> per_component);

}  // namespace vmprox

#endif  // VMPROX_DATASET_HPP
