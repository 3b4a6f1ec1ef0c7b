#pragma once

#include "capsel/core.hpp"
#include "capsel/learn.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

// Metrics and experiment procedures: accuracy reports, unlabeled-fraction
// and k sweeps, sign-transfer comparisons, and the seeded run harness the
// CLI and the acceptance suite share.
namespace capsel::eval {

using core::FeatureMatrix;
using core::LabelVector;
using core::Matrix;
using core::Vector;

struct MetricsReport {
  double overall_accuracy = 0.0;
  std::map<int, double> per_class_accuracy;
  Eigen::MatrixXi confusion;  // rows = true class, cols = predicted
  std::vector<int> class_ids;  // row/column order of the confusion matrix
  Eigen::Index n_test = 0;
  std::uint64_t run_seed = 0;

  // Artifacts carry the config hash and seed for reproducibility.
  std::string to_json(const std::vector<std::string>& class_names,
                      const std::string& config_hash) const;
  std::string to_csv(const std::vector<std::string>& class_names,
                     const std::string& config_hash) const;
};

// Deterministic accuracy/confusion metrics for a fitted model.
MetricsReport evaluate(const learn::MulticlassModel& mm,
                       const FeatureMatrix& F_test,
                       const LabelVector& labels_test);

// Which dataset supplies the unsupervised pool rows.
enum class PoolSource { Test, Train, TrainPlusTest };

inline const char* to_string(PoolSource p) {
  switch (p) {
    case PoolSource::Test: return "test";
    case PoolSource::Train: return "train";
    default: return "train_plus_test";
  }
}

enum class SweepAxis { UnlabeledFraction, K, LabeledCount };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::UnlabeledFraction: return "unlabeled_fraction";
    case SweepAxis::K: return "k";
    default: return "labeled_count";
  }
}

// One sweep point: per-repeat accuracies for the fitted model and for the
// equal-weight (w = 1/n) baseline that needs no solver, plus aggregates.
struct SweepPoint {
  double axis_value = 0.0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  std::vector<double> baseline_accuracies;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double baseline_mean = 0.0;
  double baseline_std = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::K;
  std::vector<SweepPoint> points;  // sorted by axis value
  int repeats = 1;

  std::string to_csv(const std::string& config_hash) const;  // row per repeat
  std::string to_json(const std::string& config_hash) const;  // aggregates
};

// Everything one seeded experiment needs. Data is borrowed, not owned.
struct RunSpec {
  const FeatureMatrix* train = nullptr;
  const LabelVector* train_labels = nullptr;
  const FeatureMatrix* test = nullptr;
  const LabelVector* test_labels = nullptr;
  std::vector<std::string> class_names;

  learn::FitMode mode = learn::FitMode::Unsupervised;
  Eigen::Index k = 1;
  int labeled_per_class = 0;  // 0 = use every labeled training sample
  learn::PoolPolicy pool_policy = learn::PoolPolicy::UnlabeledOnly;
  PoolSource pool_source = PoolSource::Test;
  core::Scaling scaling = core::Scaling::Standardized;
  double mu_p = 1.0;
  double mu_n = 0.0;
  double theta = 0.5;
  int max_iter = 100;
  double tol = 1e-9;
};

// Content-addressed cache of pool gram matrices; lets 30-seed batteries
// reuse the one expensive O(N n^2) reduction when the pool is fixed.
class GramCache {
 public:
  const Matrix& get(const FeatureMatrix& scaled_pool);

 private:
  std::unordered_map<std::uint64_t, Matrix> cache_;
};

struct RunResult {
  learn::MulticlassModel model;
  MetricsReport metrics;
  MetricsReport baseline_metrics;  // equal-weight w = 1/n, same signs
};

// The seeded stratified labeled-subset draw every experiment shares:
// per_class samples per class without replacement (0 = all), returned in
// ascending row order.
std::vector<Eigen::Index> labeled_subset(std::uint64_t seed,
                                         const LabelVector& labels,
                                         int per_class);

// Fit only: subsample the labeled set, estimate scaling statistics on the
// full training set, fit one model per class against the configured pool.
learn::MulticlassModel fit_model(const RunSpec& spec, std::uint64_t seed,
                                 GramCache* cache = nullptr);

// One seeded end-to-end run: fit_model plus evaluation of the fitted model
// and of its equal-weight baseline on the test set.
RunResult run_once(const RunSpec& spec, std::uint64_t seed,
                   GramCache* cache = nullptr);

// Unsupervised-pool-size sweep: subsample the unlabeled pool at each
// fraction (uniform, without replacement), fit, evaluate; repeats runs per
// point with seeds base_seed + i.
SweepResult sweep_unlabeled(const RunSpec& spec,
                            const std::vector<double>& fractions, int repeats,
                            std::uint64_t base_seed, GramCache* cache = nullptr);

// Accuracy as a function of k; every k must satisfy 1 <= k <= n.
SweepResult sweep_k(const RunSpec& spec, const std::vector<Eigen::Index>& ks,
                    int repeats, std::uint64_t base_seed,
                    GramCache* cache = nullptr);

// Sign-transfer comparison: all-own signs vs the two borrow maps
// (target class id -> source class id). Mirrors the three-setting layout.
struct TransferSetting {
  std::string name;
  std::vector<std::uint64_t> seeds;
  std::vector<double> accuracies;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
};
struct TransferResult {
  std::vector<TransferSetting> settings;
  std::string to_csv(const std::string& config_hash) const;
};

TransferResult sign_transfer_experiment(const RunSpec& spec,
                                        const std::map<int, int>& partial_map,
                                        const std::map<int, int>& mostly_map,
                                        int repeats, std::uint64_t base_seed,
                                        GramCache* cache = nullptr);

// CSV rendering of a class-similarity matrix (unit diagonal, symmetric).
std::string similarity_csv(const Matrix& S,
                           const std::vector<std::string>& class_names,
                           const std::string& config_hash);

// Population mean/std helpers with fixed-order reduction.
double mean_of(const std::vector<double>& v);
double std_of(const std::vector<double>& v);

}  // namespace capsel::eval
