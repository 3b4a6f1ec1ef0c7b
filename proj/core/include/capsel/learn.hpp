#pragma once

#include "capsel/core.hpp"
#include "capsel/optim.hpp"
#include "capsel/signs.hpp"

#include <optional>
#include <string>
#include <vector>

// Model fitting: build the supervised (convex) and unsupervised (concave)
// quadratic objectives, fit one-vs-all ensembles over the capped simplex,
// predict, and expose the selected feature subset.
namespace capsel::learn {

using core::FeatureMatrix;
using core::LabelVector;
using core::Matrix;
using core::TargetVector;
using core::Vector;

enum class FitMode { Supervised, Unsupervised };

// Which rows form the matrix the unsupervised objective is built from.
enum class PoolPolicy { LabeledOnly, LabeledPlusUnlabeled, UnlabeledOnly };

inline const char* to_string(FitMode m) {
  return m == FitMode::Supervised ? "supervised" : "unsupervised";
}
inline const char* to_string(PoolPolicy p) {
  switch (p) {
    case PoolPolicy::LabeledOnly: return "labeled_only";
    case PoolPolicy::LabeledPlusUnlabeled: return "labeled_plus_unlabeled";
    default: return "unlabeled_only";
  }
}

struct FitOptions {
  Eigen::Index k = 1;
  FitMode mode = FitMode::Supervised;
  PoolPolicy pool = PoolPolicy::LabeledPlusUnlabeled;
  core::ScalingMode scaling;  // identity (UnitInterval) by default
  double mu_p = 1.0;
  double mu_n = 0.0;
  double theta = 0.5;  // classification threshold, mu_n < theta < mu_p
  int max_iter = 100;
  double tol = 1e-9;
};

// One binary one-vs-all member: signs, capped-simplex weights, threshold,
// and the scaling applied before scoring. borrowed_from records sign
// provenance when the vector came from another class.
struct EnsembleModel {
  int class_id = 0;
  signs::SignVector sign_vec;
  optim::SelectionWeights weights;
  double threshold = 0.5;
  double mu_p = 1.0;
  double mu_n = 0.0;
  core::ScalingMode scaling;
  std::optional<int> borrowed_from;
  optim::SolveReport report;  // solver diagnostics for this class
};

struct MulticlassModel {
  std::vector<EnsembleModel> models;  // ascending class_id
  core::ScalingMode scaling;
  std::vector<std::string> class_names;  // id -> display name; may be empty

  const EnsembleModel* find(int class_id) const;
};

// A = gram(F), c = -2 F^T t; the dropped constant t^T t is kept on the
// objective so J(w) + constant = ||F w - t||^2.
optim::QuadraticObjective build_supervised_objective(
    const FeatureMatrix& F_flipped, const TargetVector& t);

// A = -gram(F), c = 0: maximization of w^T M w encoded as minimization.
optim::QuadraticObjective build_unsupervised_objective(
    const FeatureMatrix& F_flipped);

// Fits one class. F holds the labeled samples (raw; opts.scaling is applied
// internally), unlabeled the optional pool rows used per opts.pool. Labels
// of pool rows are never read.
EnsembleModel fit_binary(const FeatureMatrix& F, const LabelVector& labels,
                         int positive_class, const FitOptions& opts,
                         const FeatureMatrix* unlabeled = nullptr);

// One fit_binary per distinct class id (ascending), shared scaling and pool.
MulticlassModel fit_multiclass(const FeatureMatrix& F,
                               const LabelVector& labels,
                               const FitOptions& opts,
                               const FeatureMatrix* unlabeled = nullptr);

// Unsupervised fast path: fit a class from the gram matrix G of the scaled
// unflipped pool. Because flipping negates whole columns exactly, the
// flipped-pool gram equals D_s G D_s bit-for-bit, so this avoids one O(N n^2)
// gram per class/per sign vector.
EnsembleModel fit_binary_with_pool_gram(int class_id,
                                        const signs::SignVector& sv,
                                        const Matrix& pool_gram,
                                        const FitOptions& opts);

// w . (flip(scale(f))): scaling and re-orientation mirror training exactly.
double predict_score(const EnsembleModel& m, const Vector& f);

// Per-class scores for one raw sample, ascending class_id order.
Vector score_all(const MulticlassModel& mm, const Vector& f);

// argmax of per-class scores; ties go to the lowest class id.
int predict_class(const MulticlassModel& mm, const Vector& f);

// Indices with w_j > 1/(2k), sorted by descending weight then ascending
// index. By the sparsity property this has about k members at convergence.
std::vector<Eigen::Index> selected_features(const EnsembleModel& m);

// Lossless model round-trip: every float is encoded as a hex-float string.
std::string to_json(const MulticlassModel& mm);
MulticlassModel multiclass_model_from_json(const std::string& text);

}  // namespace capsel::learn
