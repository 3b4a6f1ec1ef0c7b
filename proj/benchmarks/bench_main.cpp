// Micro-benchmarks for the hot paths: the O(N n^2) gram reduction that
// dominates unsupervised fits, single conditional-gradient iterations at the
// MNIST problem size, scaling application, and prediction throughput.

#include <benchmark/benchmark.h>

#include <capsel/core.hpp>
#include <capsel/learn.hpp>
#include <capsel/optim.hpp>
#include <capsel/signs.hpp>

#include <random>

namespace {

using namespace capsel;
using core::FeatureMatrix;
using core::Matrix;
using core::Vector;

FeatureMatrix random_features(Eigen::Index N, Eigen::Index n,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureMatrix F(N, n);
  for (Eigen::Index i = 0; i < F.size(); ++i) F.data()[i] = u(rng);
  return F;
}

// F^T F with the fixed-order pairwise reduction; N x n -> n x n.
void BM_Gram(benchmark::State& state) {
  const auto N = static_cast<Eigen::Index>(state.range(0));
  const auto n = static_cast<Eigen::Index>(state.range(1));
  const FeatureMatrix F = random_features(N, n, 42);
  for (auto _ : state) {
    Matrix G = core::gram(F);
    benchmark::DoNotOptimize(G.data());
  }
  state.SetItemsProcessed(state.iterations() * N * n * n);
}
BENCHMARK(BM_Gram)->Args({1000, 196})->Args({10000, 196})->Args({10000, 784})
    ->Unit(benchmark::kMillisecond);

// Full solve on the concave MNIST-sized objective (n = 784, k = 400); these
// converge in a handful of iterations, so this is the per-class fit cost
// once the gram matrix exists.
void BM_IpfpSolveMnistSize(benchmark::State& state) {
  const Eigen::Index n = 784, k = 400;
  const FeatureMatrix F = random_features(2000, n, 7);
  Matrix A = -core::gram(F);
  optim::QuadraticObjective obj(std::move(A), Vector::Zero(n));
  const optim::CappedSimplex dom(n, k);
  for (auto _ : state) {
    auto rep = optim::ipfp_solve(obj, dom, optim::uniform_weights(dom));
    benchmark::DoNotOptimize(rep.w_star.w.data());
  }
}
BENCHMARK(BM_IpfpSolveMnistSize)->Unit(benchmark::kMillisecond);

// One linear-oracle call (partial selection of the k smallest scores).
void BM_LinearOracle(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  Vector s(n);
  for (Eigen::Index j = 0; j < n; ++j) s[j] = g(rng);
  const optim::CappedSimplex dom(n, n / 2);
  for (auto _ : state) {
    auto v = optim::linear_oracle(s, dom);
    benchmark::DoNotOptimize(v.w.data());
  }
}
BENCHMARK(BM_LinearOracle)->Arg(784)->Arg(10000);

// Standardization statistics + application, train-set sized.
void BM_Standardize(benchmark::State& state) {
  const auto N = static_cast<Eigen::Index>(state.range(0));
  const FeatureMatrix F = random_features(N, 784, 99);
  for (auto _ : state) {
    auto [scaled, stats] = core::standardize(F);
    benchmark::DoNotOptimize(scaled.data());
    benchmark::DoNotOptimize(stats.std.data());
  }
  state.SetItemsProcessed(state.iterations() * N);
}
BENCHMARK(BM_Standardize)->Arg(10000)->Unit(benchmark::kMillisecond);

// Per-sample scoring through scaling, flip, and the fixed-order dot product.
void BM_PredictScore(benchmark::State& state) {
  const Eigen::Index n = 784;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;

  learn::EnsembleModel m;
  m.sign_vec.flip_rule = signs::FlipRule::Negate;
  m.sign_vec.signs = Eigen::VectorXi(n);
  for (Eigen::Index j = 0; j < n; ++j)
    m.sign_vec.signs[j] = (j % 3 == 0) ? -1 : 1;
  m.weights.w = Vector::Constant(n, 1.0 / static_cast<double>(n));
  m.weights.k = n;
  m.scaling.mode = core::Scaling::Standardized;
  m.scaling.mean = Vector::Constant(n, 0.5);
  m.scaling.std = Vector::Constant(n, 0.25);

  Vector f(n);
  for (Eigen::Index j = 0; j < n; ++j) f[j] = g(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(learn::predict_score(m, f));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PredictScore);

}  // namespace

BENCHMARK_MAIN();
