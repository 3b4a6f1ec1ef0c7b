#include "capsel/core.hpp"

#include <cmath>
#include <cstring>

namespace capsel::core {

namespace {

constexpr Eigen::Index kPairwiseBase = 64;

void require_finite(const FeatureMatrix& F, const char* who) {
  if (F.rows() < 1 || F.cols() < 1)
    throw DimensionError(std::string(who) + ": matrix must be at least 1x1");
  if (!F.allFinite())
    throw InputError(std::string(who) + ": non-finite entry");
}

double sum_pairwise(const double* x, Eigen::Index n) {
  if (n <= kPairwiseBase) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const Eigen::Index h = n / 2;
  return sum_pairwise(x, h) + sum_pairwise(x + h, n - h);
}

double dot_pairwise(const double* x, const double* y, Eigen::Index n) {
  if (n <= kPairwiseBase) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  }
  const Eigen::Index h = n / 2;
  return dot_pairwise(x, y, h) + dot_pairwise(x + h, y + h, n - h);
}

}  // namespace

double sum_fixed_order(const double* x, Eigen::Index n) {
  return sum_pairwise(x, n);
}

double dot_fixed_order(const double* x, const double* y, Eigen::Index n) {
  return dot_pairwise(x, y, n);
}

TargetVector make_targets(const LabelVector& labels, int positive_class,
                          double mu_p, double mu_n) {
  if (!(0.0 <= mu_n && mu_n < mu_p && mu_p <= 1.0))
    throw InputError("targets: need 0 <= mu_n < mu_p <= 1");
  TargetVector tv;
  tv.mu_p = mu_p;
  tv.mu_n = mu_n;
  tv.t.resize(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i)
    tv.t[static_cast<Eigen::Index>(i)] =
        labels[i] == positive_class ? mu_p : mu_n;
  return tv;
}

FeatureMatrix ScalingMode::apply(const FeatureMatrix& F) const {
  if (mode == Scaling::UnitInterval) return F;
  if (F.cols() != mean.size())
    throw DimensionError("scaling: column count does not match statistics");
  FeatureMatrix out = F;
  for (Eigen::Index j = 0; j < out.cols(); ++j)
    out.col(j) = (out.col(j).array() - mean[j]) / std[j];
  return out;
}

Vector ScalingMode::apply(const Vector& f) const {
  if (mode == Scaling::UnitInterval) return f;
  if (f.size() != mean.size())
    throw DimensionError("scaling: sample length does not match statistics");
  return ((f - mean).array() / std.array()).matrix();
}

Matrix gram(const FeatureMatrix& F, std::uint64_t mem_cap_bytes) {
  require_finite(F, "gram");
  const Eigen::Index n = F.cols();
  const std::uint64_t need =
      static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n) * 8;
  if (need > mem_cap_bytes)
    throw ResourceError("gram: " + std::to_string(n) +
                        " features exceed the configured memory cap");
  const Eigen::Index N = F.rows();
  Matrix M(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double* ca = F.col(a).data();
    for (Eigen::Index b = a; b < n; ++b) {
      const double v = dot_pairwise(ca, F.col(b).data(), N);
      M(a, b) = v;
      M(b, a) = v;
    }
  }
  return M;
}

Vector linear_term(const FeatureMatrix& F, const TargetVector& t) {
  require_finite(F, "linear_term");
  if (t.t.size() != F.rows())
    throw DimensionError("linear_term: target length does not match rows");
  const Eigen::Index n = F.cols();
  Vector b(n);
  for (Eigen::Index j = 0; j < n; ++j)
    b[j] = dot_pairwise(F.col(j).data(), t.t.data(), F.rows());
  return b;
}

ScalingMode scaling_statistics(const FeatureMatrix& F) {
  require_finite(F, "standardize");
  const Eigen::Index N = F.rows();
  const Eigen::Index n = F.cols();
  ScalingMode sm;
  sm.mode = Scaling::Standardized;
  sm.mean.resize(n);
  sm.std.resize(n);
  Vector sq(N);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = sum_pairwise(F.col(j).data(), N) / static_cast<double>(N);
    for (Eigen::Index i = 0; i < N; ++i) {
      const double d = F(i, j) - m;
      sq[i] = d * d;
    }
    const double var = sum_pairwise(sq.data(), N) / static_cast<double>(N);
    const double sd = std::sqrt(var);
    sm.mean[j] = m;
    // Zero-variance columns carry no information: emit zeros, record std 1.
    sm.std[j] = sd > 0.0 ? sd : 1.0;
  }
  return sm;
}

std::pair<FeatureMatrix, ScalingMode> standardize(const FeatureMatrix& F) {
  ScalingMode sm = scaling_statistics(F);
  return {sm.apply(F), std::move(sm)};
}

std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace capsel::core
