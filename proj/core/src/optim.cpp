#include "capsel/optim.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace capsel::optim {

QuadraticObjective::QuadraticObjective(Matrix A_, Vector c_, double constant_)
    : A(std::move(A_)), c(std::move(c_)), constant(constant_) {
  if (A.rows() != A.cols())
    throw core::InputError("objective: A must be square");
  if (c.size() != A.rows())
    throw core::InputError("objective: c length != A dimension");
  if (!A.allFinite() || !c.allFinite())
    throw core::InputError("objective: non-finite entry");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw core::InputError("objective: A is not symmetric");
}

double QuadraticObjective::value(const Vector& w) const {
  return w.dot(A * w) + c.dot(w);
}

Vector QuadraticObjective::gradient(const Vector& w) const {
  return 2.0 * (A * w) + c;
}

bool SelectionWeights::feasible(double eps) const {
  if (k < 1 || w.size() < k) return false;
  const double cap = 1.0 / static_cast<double>(k);
  double sum = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    if (!(w[j] >= -eps && w[j] <= cap + eps)) return false;
    sum += w[j];
  }
  return std::abs(sum - 1.0) <= 1e-9;
}

SelectionWeights uniform_weights(const CappedSimplex& dom) {
  SelectionWeights sw;
  sw.k = dom.k;
  sw.w = Vector::Constant(dom.n, 1.0 / static_cast<double>(dom.n));
  return sw;
}

SelectionWeights linear_oracle(const Vector& s, const CappedSimplex& dom) {
  if (s.size() != dom.n)
    throw core::DimensionError("linear_oracle: score length != n");
  if (!s.allFinite())
    throw core::InputError("linear_oracle: non-finite score");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(dom.n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (s[a] != s[b]) return s[a] < s[b];
    return a < b;  // ties by lowest feature index
  });
  SelectionWeights sw;
  sw.k = dom.k;
  sw.w = Vector::Zero(dom.n);
  const double cap = dom.cap();
  for (Eigen::Index i = 0; i < dom.k; ++i)
    sw.w[idx[static_cast<std::size_t>(i)]] = cap;
  return sw;
}

double line_search(const QuadraticObjective& obj, const SelectionWeights& w,
                   const SelectionWeights& b_vertex) {
  if (w.w.size() != obj.n() || b_vertex.w.size() != obj.n())
    throw core::DimensionError("line_search: dimension mismatch");
  const Vector d = b_vertex.w - w.w;
  if (d.cwiseAbs().maxCoeff() == 0.0) return 0.0;  // stationary segment
  const double g = obj.gradient(w.w).dot(d);
  const double q = d.dot(obj.A * d);
  if (q > 0.0) return std::clamp(-g / (2.0 * q), 0.0, 1.0);
  return g <= 0.0 ? 1.0 : 0.0;  // concave/linear along the ray: endpoint
}

SolveReport ipfp_solve(const QuadraticObjective& obj, const CappedSimplex& dom,
                       const SelectionWeights& w0, int max_iter, double tol) {
  if (obj.n() != dom.n)
    throw core::DimensionError("ipfp_solve: objective/domain size mismatch");
  if (max_iter < 1) throw core::InputError("ipfp_solve: max_iter >= 1");
  if (!(tol > 0.0)) throw core::InputError("ipfp_solve: tol > 0");
  if (w0.k != dom.k || w0.w.size() != dom.n || !w0.feasible())
    throw core::DomainError("ipfp_solve: infeasible start point");

  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = dom.n;
  const double cap = dom.cap();

  SolveReport rep;
  SelectionWeights cur = w0;

  // Scratch buffers kept across iterations: the loop body performs no heap
  // allocation, which dominates the cost on small problems.
  Vector Aw(n), Ab(n), Ad(n), grad(n), bw(n), d(n);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));

  Aw.noalias() = obj.A * cur.w;
  double J = cur.w.dot(Aw) + obj.c.dot(cur.w);
  rep.objective_trace.push_back(J);
  rep.best_vertex_objective = std::numeric_limits<double>::infinity();

  for (int t = 1; t <= max_iter; ++t) {
    grad = 2.0 * Aw + obj.c;

    // Inline linear oracle: mass cap on the k smallest scores, ties broken
    // toward the lowest feature index (matches linear_oracle()).
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
      if (grad[a] != grad[b]) return grad[a] < grad[b];
      return a < b;
    });
    bw.setZero();
    for (Eigen::Index i = 0; i < dom.k; ++i)
      bw[idx[static_cast<std::size_t>(i)]] = cap;

    d = bw - cur.w;
    rep.final_gap = -grad.dot(d);  // == grad . (w - b)

    Ab.noalias() = obj.A * bw;
    const double Jb = bw.dot(Ab) + obj.c.dot(bw);
    if (Jb < rep.best_vertex_objective) {
      rep.best_vertex_objective = Jb;
      rep.best_vertex = bw;
    }

    // Inline exact line search along w + alpha * d (matches line_search()).
    double alpha;
    if (d.cwiseAbs().maxCoeff() == 0.0) {
      alpha = 0.0;
    } else {
      const double g = grad.dot(d);
      Ad = Ab - Aw;  // A d by linearity; saves one matrix-vector product
      const double q = d.dot(Ad);
      if (q > 0.0)
        alpha = std::clamp(-g / (2.0 * q), 0.0, 1.0);
      else
        alpha = g <= 0.0 ? 1.0 : 0.0;
    }

    cur.w += alpha * d;
    Aw.noalias() = obj.A * cur.w;
    const double Jn = cur.w.dot(Aw) + obj.c.dot(cur.w);
    rep.objective_trace.push_back(Jn);
    rep.iterations = t;
    if (std::abs(Jn - J) <= tol * (std::abs(J) + 1.0)) {
      rep.converged = true;
      J = Jn;
      break;
    }
    J = Jn;
  }

  rep.w_star = std::move(cur);
  rep.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return rep;
}

std::string SolveReport::to_json() const {
  // wall_time_sec stays out: artifacts must be byte-identical across
  // reruns, and timing belongs to the run.log sidecar.
  nlohmann::ordered_json j;
  j["iterations"] = iterations;
  j["converged"] = converged;
  j["objective_trace"] = objective_trace;
  j["best_vertex_objective"] = best_vertex_objective;
  j["final_gap"] = final_gap;
  return j.dump();
}

}  // namespace capsel::optim
