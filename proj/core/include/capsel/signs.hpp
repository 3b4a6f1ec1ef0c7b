#pragma once

#include "capsel/core.hpp"

#include <optional>
#include <string>
#include <vector>

// Per-feature orientation: estimate signs from (possibly very few) labeled
// samples, flip negatively-oriented features so every feature correlates
// positively with the target, transfer signs across classes, and measure
// sign agreement between classes.
namespace capsel::signs {

using core::FeatureMatrix;
using core::LabelVector;
using core::Matrix;
using core::Vector;

// How a negatively-signed feature f is re-oriented: 1 - f for data living in
// [0,1], -f for standardized data.
enum class FlipRule { OneMinus, Negate };

inline FlipRule flip_rule_for(core::Scaling s) {
  return s == core::Scaling::UnitInterval ? FlipRule::OneMinus
                                          : FlipRule::Negate;
}
inline const char* to_string(FlipRule r) {
  return r == FlipRule::OneMinus ? "one_minus" : "negate";
}

// Raw per-feature evidence behind a sign decision: class-conditional means
// and their difference E_P(f_j) - E_N(f_j).
struct SignEstimate {
  Vector e_pos;
  Vector e_neg;
  Vector raw_sign;
};

// The hardened +1/-1 decisions plus the flip rule they pair with. For
// borrowed signs, source_class records the class whose labeled data produced
// the vector.
struct SignVector {
  Eigen::VectorXi signs;  // entries in {+1, -1}
  FlipRule flip_rule = FlipRule::OneMinus;
  std::optional<int> source_class;

  Eigen::Index n() const { return signs.size(); }
};

// raw_sign_j = mean(F[.,j] | positive) - mean(F[.,j] | negative);
// sign_j = +1 if raw_sign_j >= 0 else -1 (tie -> +1: a zero-information
// feature is left unflipped for determinism). Requires at least one sample
// on each side.
std::pair<SignEstimate, SignVector> estimate_signs(const FeatureMatrix& F,
                                                   const LabelVector& labels,
                                                   int positive_class,
                                                   FlipRule rule);

// Re-orients the sign=-1 columns (1-f or -f per the rule); sign=+1 columns
// pass through bit-exactly. OneMinus on data outside [0,1] is rejected.
FeatureMatrix flip(const FeatureMatrix& F, const SignVector& s);

// Fraction of coordinates where the two vectors agree.
double sign_accuracy(const SignVector& estimated, const SignVector& reference);

// Pairwise sign agreement between classes; symmetric with unit diagonal.
Matrix class_similarity(const std::vector<SignVector>& signs_by_class);

// Copies a sign vector for reuse by another class, tagging provenance.
SignVector transfer_signs(const SignVector& source);

// JSON document {"n":..,"flip_rule":..,"signs":[..],"source_class":..}.
std::string to_json(const SignVector& s);
SignVector sign_vector_from_json(const std::string& text);

}  // namespace capsel::signs
