#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Core data model: feature matrices (one row per sample), labels, regression
// targets, and the deterministic dense linear algebra every other component
// builds on. All reductions run in a fixed order (ascending sample index,
// pairwise within a column) so identical inputs give bit-identical outputs.
namespace capsel::core {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// N x n feature matrix; row i is the sample vector f_i^T. Column-major
// storage keeps each feature column contiguous for the column reductions.
using FeatureMatrix = Eigen::MatrixXd;

// One class id per sample. Ids are small non-negative integers; the mapping
// to external class names lives with the dataset (io::Dataset).
using LabelVector = std::vector<int>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DimensionError : Error {
  using Error::Error;
};
struct ResourceError : Error {
  using Error::Error;
};
struct InsufficientLabelsError : Error {
  using Error::Error;
};
struct ModeMismatchError : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct InputError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

// Per-sample regression targets taking only the two values mu_n and mu_p
// (negative/positive class). Defaults 0 and 1.
struct TargetVector {
  Vector t;
  double mu_p = 1.0;
  double mu_n = 0.0;
};

// Builds the {mu_n, mu_p} target vector for a one-vs-all split.
TargetVector make_targets(const LabelVector& labels, int positive_class,
                          double mu_p = 1.0, double mu_n = 0.0);

enum class Scaling { UnitInterval, Standardized };

// Feature scaling statistics. UnitInterval is the identity (raw features
// already in [0,1]); Standardized records per-feature mean/std estimated on
// training data for reuse on test data. Degenerate (zero-variance) columns
// keep std = 1 and map to all zeros.
struct ScalingMode {
  Scaling mode = Scaling::UnitInterval;
  Vector mean;  // length n, Standardized only
  Vector std;   // length n, entries > 0

  // Applies the recorded transform to a matrix with matching column count.
  FeatureMatrix apply(const FeatureMatrix& F) const;
  // Applies the transform to a single sample vector.
  Vector apply(const Vector& f) const;
};

inline const char* to_string(Scaling s) {
  return s == Scaling::UnitInterval ? "unit_interval" : "standardized";
}

// Deterministic sum/dot helpers: pairwise reduction over ascending index
// with a fixed sequential base case. Exposed because the solver and metrics
// code reuse them to keep every reported number reproducible.
double sum_fixed_order(const double* x, Eigen::Index n);
double dot_fixed_order(const double* x, const double* y, Eigen::Index n);
inline double dot_fixed_order(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
  return dot_fixed_order(x.data(), y.data(), x.size());
}

// M = F^T F, symmetric PSD. Row-permutation invariant by construction on
// exactly-summable inputs, bit-reproducible always. Throws ResourceError if
// the n x n result would exceed mem_cap_bytes (default 2 GiB).
Matrix gram(const FeatureMatrix& F,
            std::uint64_t mem_cap_bytes = std::uint64_t{2} << 30);

// b = F^T t.
Vector linear_term(const FeatureMatrix& F, const TargetVector& t);

// Per-feature mean/std statistics (1/N variance, zero-variance -> std 1)
// without materializing the transformed matrix.
ScalingMode scaling_statistics(const FeatureMatrix& F);

// Centers every column to mean 0 and scales to std 1 (1/N variance).
// Returns the transformed matrix plus the statistics for reuse on test data.
std::pair<FeatureMatrix, ScalingMode> standardize(const FeatureMatrix& F);

// FNV-1a over a byte range; the project-wide checksum/config-hash primitive.
std::uint64_t fnv1a(const void* data, std::size_t len,
                    std::uint64_t seed = 14695981039346656037ull);
std::string to_hex(std::uint64_t v);

}  // namespace capsel::core
