#include "capsel/core.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

namespace core = capsel::core;
using core::FeatureMatrix;
using core::Matrix;
using core::Vector;

namespace {

// Random matrix whose entries live on the 2^-12 grid in [-2, 2). Products of
// two such entries are exact in doubles and partial sums of < 2^20 of them
// stay below the 53-bit mantissa, so any summation order gives the same
// bits; this is what lets permutation tests demand exact equality.
FeatureMatrix grid_matrix(Eigen::Index rows, Eigen::Index cols,
                          std::mt19937_64& rng) {
  std::uniform_int_distribution<int> d(-8192, 8191);
  FeatureMatrix F(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      F(i, j) = static_cast<double>(d(rng)) / 4096.0;
  return F;
}

FeatureMatrix permute_rows(const FeatureMatrix& F,
                           const std::vector<Eigen::Index>& perm) {
  FeatureMatrix out(F.rows(), F.cols());
  for (Eigen::Index i = 0; i < F.rows(); ++i)
    out.row(i) = F.row(perm[static_cast<std::size_t>(i)]);
  return out;
}

}  // namespace

TEST(Gram, OrthonormalRowsGiveIdentity) {
  FeatureMatrix F(2, 2);
  F << 1, 0, 0, 1;
  const Matrix M = core::gram(F);
  EXPECT_EQ(M(0, 0), 1.0);
  EXPECT_EQ(M(0, 1), 0.0);
  EXPECT_EQ(M(1, 0), 0.0);
  EXPECT_EQ(M(1, 1), 1.0);
}

TEST(Gram, HandMultipliedThreeByTwo) {
  FeatureMatrix F(3, 2);
  F << 1, 1, 1, 0, 0, 0;
  const Matrix M = core::gram(F);
  Matrix want(2, 2);
  want << 2, 1, 1, 1;
  EXPECT_EQ(M, want);
}

TEST(Gram, SingleRowIsRankOneOuterProduct) {
  FeatureMatrix F(1, 2);
  const double a = 0.3, b = -1.7;
  F << a, b;
  const Matrix M = core::gram(F);
  EXPECT_DOUBLE_EQ(M(0, 0), a * a);
  EXPECT_DOUBLE_EQ(M(0, 1), a * b);
  EXPECT_DOUBLE_EQ(M(1, 0), a * b);
  EXPECT_DOUBLE_EQ(M(1, 1), b * b);
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  EXPECT_NEAR(es.eigenvalues()[0], 0.0, 1e-15);  // rank 1
}

TEST(Gram, SymmetricAndPsdOnRandomInput) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    FeatureMatrix F(17, 9);
    for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = g(rng);
    const Matrix M = core::gram(F);
    const double scale = M.cwiseAbs().maxCoeff();
    EXPECT_LE((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-12 * scale);
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    EXPECT_GE(es.eigenvalues()[0], -1e-9 * scale);
  }
}

TEST(Gram, DeterministicAcrossCalls) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix F(31, 7);
  for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = g(rng);
  const Matrix M1 = core::gram(F);
  const Matrix M2 = core::gram(F);
  EXPECT_EQ(M1, M2);
}

TEST(Gram, RowPermutationExactInvariance) {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    const Eigen::Index N = 257, n = 6;
    const FeatureMatrix F = grid_matrix(N, n, rng);
    std::vector<Eigen::Index> perm(N);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const FeatureMatrix PF = permute_rows(F, perm);
    EXPECT_EQ(core::gram(F), core::gram(PF));
  }
}

TEST(Gram, MemoryCapViolationIsResourceError) {
  FeatureMatrix F = FeatureMatrix::Ones(3, 64);
  EXPECT_THROW(core::gram(F, 1024), core::ResourceError);
}

TEST(Gram, NonFiniteInputRejected) {
  FeatureMatrix F = FeatureMatrix::Ones(2, 2);
  F(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(core::gram(F), core::InputError);
}

TEST(LinearTerm, IdentityPicksTarget) {
  FeatureMatrix F(2, 2);
  F << 1, 0, 0, 1;
  core::TargetVector t;
  t.t = Vector(2);
  t.t << 1, 0;
  const Vector b = core::linear_term(F, t);
  EXPECT_EQ(b[0], 1.0);
  EXPECT_EQ(b[1], 0.0);
}

TEST(LinearTerm, HandMultipliedThreeByTwo) {
  FeatureMatrix F(3, 2);
  F << 1, 1, 1, 0, 0, 0;
  core::TargetVector t;
  t.t = Vector(3);
  t.t << 1, 1, 0;
  const Vector b = core::linear_term(F, t);
  EXPECT_EQ(b[0], 2.0);
  EXPECT_EQ(b[1], 1.0);
}

TEST(LinearTerm, ZeroTargetAnnihilates) {
  FeatureMatrix F(3, 2);
  F << 1, 1, 1, 0, 0, 0;
  core::TargetVector t;
  t.t = Vector::Zero(3);
  EXPECT_EQ(core::linear_term(F, t), Vector::Zero(2));
}

TEST(LinearTerm, LengthMismatchThrows) {
  FeatureMatrix F(3, 2);
  F.setOnes();
  core::TargetVector t;
  t.t = Vector::Ones(2);
  EXPECT_THROW(core::linear_term(F, t), core::DimensionError);
}

TEST(LinearTerm, RowPermutationExactInvariance) {
  std::mt19937_64 rng(14);
  const Eigen::Index N = 129, n = 5;
  const FeatureMatrix F = grid_matrix(N, n, rng);
  core::TargetVector t;
  t.t = Vector(N);
  std::bernoulli_distribution coin(0.4);
  for (Eigen::Index i = 0; i < N; ++i) t.t[i] = coin(rng) ? 1.0 : 0.0;

  std::vector<Eigen::Index> perm(N);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const FeatureMatrix PF = permute_rows(F, perm);
  core::TargetVector Pt;
  Pt.t = Vector(N);
  for (Eigen::Index i = 0; i < N; ++i)
    Pt.t[i] = t.t[perm[static_cast<std::size_t>(i)]];

  EXPECT_EQ(core::linear_term(F, t), core::linear_term(PF, Pt));
}

TEST(Standardize, TwoPointColumn) {
  FeatureMatrix F(2, 1);
  F << 0, 2;
  const auto [Z, stats] = core::standardize(F);
  EXPECT_DOUBLE_EQ(Z(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(Z(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(stats.mean[0], 1.0);
  EXPECT_DOUBLE_EQ(stats.std[0], 1.0);
}

TEST(Standardize, ConstantColumnForcedToZerosWithUnitStd) {
  FeatureMatrix F(3, 1);
  F << 5, 5, 5;
  const auto [Z, stats] = core::standardize(F);
  EXPECT_EQ(Z, FeatureMatrix::Zero(3, 1));
  EXPECT_DOUBLE_EQ(stats.std[0], 1.0);
}

TEST(Standardize, IdempotentOnStandardizedInput) {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> g(0.0, 1.0);
  FeatureMatrix F(64, 4);
  for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = g(rng);
  const auto [Z, stats1] = core::standardize(F);
  const auto [Z2, stats2] = core::standardize(Z);
  EXPECT_LE((Z2 - Z).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Standardize, StatisticsTransferToTestData) {
  FeatureMatrix train(4, 1), test(2, 1);
  train << 0, 2, 4, 6;  // mean 3, var (9+1+1+9)/4 = 5
  test << 3, 8;
  const auto [Z, stats] = core::standardize(train);
  const FeatureMatrix Zt = stats.apply(test);
  EXPECT_DOUBLE_EQ(Zt(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(Zt(1, 0), 5.0 / std::sqrt(5.0));
}

TEST(ScalingMode, UnitIntervalIsIdentity) {
  core::ScalingMode id;
  FeatureMatrix F(2, 3);
  F << 0.1, 0.5, 0.9, 0.3, 0.2, 0.8;
  EXPECT_EQ(id.apply(F), F);
}

TEST(ScalingMode, ColumnCountMismatchThrows) {
  FeatureMatrix F(3, 2);
  F << 0, 1, 2, 3, 4, 5;
  const auto [Z, stats] = core::standardize(F);
  const FeatureMatrix wrong_width = FeatureMatrix::Ones(2, 3);
  EXPECT_THROW(stats.apply(wrong_width), core::DimensionError);
}

TEST(Targets, BuildsTwoValuedVector) {
  const core::LabelVector labels = {2, 0, 2, 1};
  const auto tv = core::make_targets(labels, 2);
  Vector want(4);
  want << 1, 0, 1, 0;
  EXPECT_EQ(tv.t, want);
  EXPECT_EQ(tv.mu_p, 1.0);
  EXPECT_EQ(tv.mu_n, 0.0);
}

TEST(Targets, CustomMusRespected) {
  const core::LabelVector labels = {0, 1};
  const auto tv = core::make_targets(labels, 0, 0.8, 0.2);
  EXPECT_DOUBLE_EQ(tv.t[0], 0.8);
  EXPECT_DOUBLE_EQ(tv.t[1], 0.2);
}

TEST(Targets, InvalidMuOrderingRejected) {
  const core::LabelVector labels = {0, 1};
  EXPECT_THROW(core::make_targets(labels, 0, 0.2, 0.8), core::InputError);
  EXPECT_THROW(core::make_targets(labels, 0, 1.2, 0.0), core::InputError);
}

TEST(FixedOrderReduction, MatchesNaiveOnSmallInput) {
  const std::vector<double> x = {1.5, -2.25, 0.5, 3.0, -1.0};
  double naive = 0.0;
  for (double v : x) naive += v;
  EXPECT_EQ(core::sum_fixed_order(x.data(), 5), naive);
}

TEST(FixedOrderReduction, DotLengthMismatchThrows) {
  const Vector a = Vector::Ones(3), b = Vector::Ones(4);
  EXPECT_THROW(core::dot_fixed_order(a, b), core::DimensionError);
}

TEST(Fnv1a, KnownVectorAndHexFormat) {
  // FNV-1a 64 of the empty string is the offset basis; "a" is a published
  // reference value.
  EXPECT_EQ(core::fnv1a("", 0), 14695981039346656037ull);
  EXPECT_EQ(core::fnv1a("a", 1), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(core::to_hex(0xaf63dc4c8601ec8cull), "af63dc4c8601ec8c");
}
