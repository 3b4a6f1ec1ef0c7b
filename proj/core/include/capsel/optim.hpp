#pragma once

#include "capsel/core.hpp"

#include <string>
#include <vector>

// Conditional-gradient solver for quadratic objectives over the capped
// simplex {w : sum w_j = 1, 0 <= w_j <= 1/k}: a linear oracle over the
// domain's vertices alternating with a closed-form line search. Convex
// objectives reach the global optimum; concave ones (maximization encoded
// by negation) hop between vertices to a stationary point.
namespace capsel::optim {

using core::Matrix;
using core::Vector;

struct CappedSimplex {
  Eigen::Index n = 0;
  Eigen::Index k = 0;

  CappedSimplex(Eigen::Index n_, Eigen::Index k_) : n(n_), k(k_) {
    if (k < 1 || k > n)
      throw core::DomainError("capped simplex: need 1 <= k <= n");
  }
  double cap() const { return 1.0 / static_cast<double>(k); }
};

// minimize w^T A w + c^T w (+ constant). Callers encode maximization of
// w^T M w via A = -M. The constant carries any term dropped from the
// original objective (e.g. t^T t) so absolute residuals stay reportable.
struct QuadraticObjective {
  Matrix A;
  Vector c;
  double constant = 0.0;

  QuadraticObjective(Matrix A_, Vector c_, double constant_ = 0.0);

  Eigen::Index n() const { return A.rows(); }
  double value(const Vector& w) const;
  Vector gradient(const Vector& w) const;  // 2 A w + c
};

struct SelectionWeights {
  Vector w;
  Eigen::Index k = 0;

  // sum within 1e-9 of 1, entries in [0 - eps, 1/k + eps].
  bool feasible(double eps = 1e-12) const;
};

// Uniform 1/n start point (feasible for every k <= n).
SelectionWeights uniform_weights(const CappedSimplex& dom);

struct SolveReport {
  SelectionWeights w_star;
  std::vector<double> objective_trace;  // J at w0 and after each iteration
  int iterations = 0;
  bool converged = false;
  double wall_time_sec = 0.0;
  // Diagnostics: best vertex visited by the oracle and the final
  // Frank-Wolfe dual gap at the returned point.
  Vector best_vertex;
  double best_vertex_objective = 0.0;
  double final_gap = 0.0;

  std::string to_json() const;
};

// argmin over the domain of s^T w: weight 1/k on the k smallest-score
// coordinates, ties broken by lowest feature index.
SelectionWeights linear_oracle(const Vector& s, const CappedSimplex& dom);

// Exact minimizer of the quadratic along the segment w -> b_vertex,
// clamped to [0,1]. Guarantees J(w + alpha d) <= J(w).
double line_search(const QuadraticObjective& obj, const SelectionWeights& w,
                   const SelectionWeights& b_vertex);

// Iterates w <- w + alpha (oracle(grad J(w)) - w) until the relative
// objective change falls below tol or max_iter is hit.
SolveReport ipfp_solve(const QuadraticObjective& obj, const CappedSimplex& dom,
                       const SelectionWeights& w0, int max_iter = 100,
                       double tol = 1e-9);

}  // namespace capsel::optim
