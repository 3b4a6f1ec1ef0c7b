#include "capsel/learn.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace capsel::learn {

namespace {

std::string hex_double(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double parse_hex_double(const std::string& s) {
  const char* p = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(p, &end);
  if (end != p + s.size())
    throw core::ParseError("model: bad float literal '" + s + "'");
  return v;
}

std::vector<std::string> hex_vector(const Vector& v) {
  std::vector<std::string> out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out[static_cast<std::size_t>(i)] = hex_double(v[i]);
  return out;
}

Vector vector_from_hex(const std::vector<std::string>& v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i)
    out[static_cast<Eigen::Index>(i)] = parse_hex_double(v[i]);
  return out;
}

void check_fit_options(const FitOptions& opts) {
  if (opts.k < 1) throw core::InputError("fit: k >= 1 required");
  if (!(opts.mu_n < opts.theta && opts.theta < opts.mu_p))
    throw core::InputError("fit: need mu_n < theta < mu_p");
}

// Solves the concave (maximize w^T M w) problem given the gram matrix of
// the scaled unflipped pool, conjugating by the sign vector. Negating a
// column flips the sign of every product term exactly, so
// gram(flip(P)) == D_s gram(P) D_s bit-for-bit and this path is
// indistinguishable from building the objective on the flipped pool.
optim::SolveReport solve_unsup_from_gram(const Matrix& G,
                                         const signs::SignVector& sv,
                                         const FitOptions& opts) {
  if (sv.flip_rule != signs::FlipRule::Negate)
    throw core::ModeMismatchError(
        "fit: pool-gram fast path requires the negation flip rule "
        "(one-minus flipping is affine, not a column negation)");
  const Eigen::Index n = G.rows();
  if (sv.n() != n)
    throw core::DimensionError("fit: sign length != gram dimension");
  Matrix A(n, n);
  for (Eigen::Index b = 0; b < n; ++b) {
    const double sb = static_cast<double>(sv.signs[b]);
    for (Eigen::Index a = 0; a < n; ++a)
      A(a, b) = -(G(a, b) * static_cast<double>(sv.signs[a]) * sb);
  }
  optim::QuadraticObjective obj(std::move(A), Vector::Zero(n));
  const optim::CappedSimplex dom(n, opts.k);
  return optim::ipfp_solve(obj, dom, optim::uniform_weights(dom),
                           opts.max_iter, opts.tol);
}

EnsembleModel finish_model(int class_id, signs::SignVector sv,
                           optim::SolveReport rep, const FitOptions& opts) {
  EnsembleModel m;
  m.class_id = class_id;
  m.sign_vec = std::move(sv);
  m.weights = rep.w_star;
  m.threshold = opts.theta;
  m.mu_p = opts.mu_p;
  m.mu_n = opts.mu_n;
  m.scaling = opts.scaling;
  m.report = std::move(rep);
  return m;
}

}  // namespace

const EnsembleModel* MulticlassModel::find(int class_id) const {
  for (const auto& m : models)
    if (m.class_id == class_id) return &m;
  return nullptr;
}

optim::QuadraticObjective build_supervised_objective(
    const FeatureMatrix& F_flipped, const TargetVector& t) {
  Matrix A = core::gram(F_flipped);
  Vector c = -2.0 * core::linear_term(F_flipped, t);
  const double tt = core::dot_fixed_order(t.t, t.t);
  return optim::QuadraticObjective(std::move(A), std::move(c), tt);
}

optim::QuadraticObjective build_unsupervised_objective(
    const FeatureMatrix& F_flipped) {
  Matrix A = -core::gram(F_flipped);
  return optim::QuadraticObjective(std::move(A),
                                   Vector::Zero(F_flipped.cols()));
}

EnsembleModel fit_binary(const FeatureMatrix& F, const LabelVector& labels,
                         int positive_class, const FitOptions& opts,
                         const FeatureMatrix* unlabeled) {
  check_fit_options(opts);
  const FeatureMatrix Fs = opts.scaling.apply(F);
  const auto rule = signs::flip_rule_for(opts.scaling.mode);
  auto [est, sv] = signs::estimate_signs(Fs, labels, positive_class, rule);

  if (opts.mode == FitMode::Supervised) {
    const FeatureMatrix Ff = signs::flip(Fs, sv);
    const TargetVector t =
        core::make_targets(labels, positive_class, opts.mu_p, opts.mu_n);
    const auto obj = build_supervised_objective(Ff, t);
    const optim::CappedSimplex dom(Ff.cols(), opts.k);
    auto rep = optim::ipfp_solve(obj, dom, optim::uniform_weights(dom),
                                 opts.max_iter, opts.tol);
    return finish_model(positive_class, std::move(sv), std::move(rep), opts);
  }

  // Unsupervised: assemble the pool, flip it with the labeled-data signs,
  // and maximize w^T M w. Labels of pool rows are never consulted.
  FeatureMatrix pool;
  if (opts.pool == PoolPolicy::LabeledOnly) {
    pool = Fs;
  } else {
    if (unlabeled == nullptr || unlabeled->rows() == 0)
      throw core::InputError("fit: pool policy requires unlabeled samples");
    const FeatureMatrix Us = opts.scaling.apply(*unlabeled);
    if (opts.pool == PoolPolicy::UnlabeledOnly) {
      pool = Us;
    } else {
      pool.resize(Fs.rows() + Us.rows(), Fs.cols());
      pool.topRows(Fs.rows()) = Fs;
      pool.bottomRows(Us.rows()) = Us;
    }
  }
  const FeatureMatrix Pf = signs::flip(pool, sv);
  const auto obj = build_unsupervised_objective(Pf);
  const optim::CappedSimplex dom(Pf.cols(), opts.k);
  auto rep = optim::ipfp_solve(obj, dom, optim::uniform_weights(dom),
                               opts.max_iter, opts.tol);
  return finish_model(positive_class, std::move(sv), std::move(rep), opts);
}

MulticlassModel fit_multiclass(const FeatureMatrix& F,
                               const LabelVector& labels,
                               const FitOptions& opts,
                               const FeatureMatrix* unlabeled) {
  std::set<int> ids(labels.begin(), labels.end());
  if (ids.size() < 2)
    throw core::InsufficientLabelsError("fit_multiclass: need >= 2 classes");
  MulticlassModel mm;
  mm.scaling = opts.scaling;
  for (int id : ids) {
    try {
      mm.models.push_back(fit_binary(F, labels, id, opts, unlabeled));
    } catch (const core::Error& e) {
      throw core::Error("class " + std::to_string(id) + ": " + e.what());
    }
  }
  return mm;
}

EnsembleModel fit_binary_with_pool_gram(int class_id,
                                        const signs::SignVector& sv,
                                        const Matrix& pool_gram,
                                        const FitOptions& opts) {
  check_fit_options(opts);
  auto rep = solve_unsup_from_gram(pool_gram, sv, opts);
  return finish_model(class_id, sv, std::move(rep), opts);
}

namespace {

double score_scaled(const EnsembleModel& m, const Vector& z) {
  if (z.size() != m.sign_vec.n())
    throw core::DimensionError("predict: sample length != model n");
  Vector flipped(z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (m.sign_vec.signs[j] == 1)
      flipped[j] = z[j];
    else
      flipped[j] = m.sign_vec.flip_rule == signs::FlipRule::OneMinus
                       ? 1.0 - z[j]
                       : -z[j];
  }
  return core::dot_fixed_order(m.weights.w, flipped);
}

}  // namespace

double predict_score(const EnsembleModel& m, const Vector& f) {
  return score_scaled(m, m.scaling.apply(f));
}

Vector score_all(const MulticlassModel& mm, const Vector& f) {
  // All members share the multiclass scaling, so the transform runs once.
  const Vector z = mm.scaling.apply(f);
  Vector s(static_cast<Eigen::Index>(mm.models.size()));
  for (std::size_t i = 0; i < mm.models.size(); ++i)
    s[static_cast<Eigen::Index>(i)] = score_scaled(mm.models[i], z);
  return s;
}

int predict_class(const MulticlassModel& mm, const Vector& f) {
  if (mm.models.empty()) throw core::InputError("predict: empty model");
  const Vector s = score_all(mm, f);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < s.size(); ++i)
    if (s[i] > s[best]) best = i;  // ties keep the lowest class id
  return mm.models[static_cast<std::size_t>(best)].class_id;
}

std::vector<Eigen::Index> selected_features(const EnsembleModel& m) {
  const double cut = 0.5 / static_cast<double>(m.weights.k);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < m.weights.w.size(); ++j)
    if (m.weights.w[j] > cut) idx.push_back(j);
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (m.weights.w[a] != m.weights.w[b])
      return m.weights.w[a] > m.weights.w[b];
    return a < b;
  });
  return idx;
}

std::string to_json(const MulticlassModel& mm) {
  nlohmann::ordered_json root;
  root["format"] = "capsel-model";
  root["version"] = 1;
  nlohmann::ordered_json scaling;
  scaling["mode"] = core::to_string(mm.scaling.mode);
  if (mm.scaling.mode == core::Scaling::Standardized) {
    scaling["mean"] = hex_vector(mm.scaling.mean);
    scaling["std"] = hex_vector(mm.scaling.std);
  }
  root["scaling"] = scaling;
  root["class_names"] = mm.class_names;
  nlohmann::ordered_json models = nlohmann::ordered_json::array();
  for (const auto& m : mm.models) {
    nlohmann::ordered_json jm;
    jm["class_id"] = m.class_id;
    jm["k"] = m.weights.k;
    jm["threshold"] = hex_double(m.threshold);
    jm["mu_p"] = hex_double(m.mu_p);
    jm["mu_n"] = hex_double(m.mu_n);
    if (m.borrowed_from)
      jm["borrowed_from"] = *m.borrowed_from;
    else
      jm["borrowed_from"] = nullptr;
    nlohmann::ordered_json js;
    js["n"] = m.sign_vec.n();
    js["flip_rule"] = signs::to_string(m.sign_vec.flip_rule);
    js["signs"] = std::vector<int>(m.sign_vec.signs.data(),
                                   m.sign_vec.signs.data() + m.sign_vec.n());
    if (m.sign_vec.source_class)
      js["source_class"] = *m.sign_vec.source_class;
    else
      js["source_class"] = nullptr;
    jm["signs"] = js;
    jm["weights"] = hex_vector(m.weights.w);
    nlohmann::ordered_json solve;
    solve["iterations"] = m.report.iterations;
    solve["converged"] = m.report.converged;
    solve["final_objective"] = hex_double(
        m.report.objective_trace.empty() ? 0.0
                                         : m.report.objective_trace.back());
    jm["solve"] = solve;
    models.push_back(jm);
  }
  root["models"] = models;
  return root.dump(2);
}

MulticlassModel multiclass_model_from_json(const std::string& text) try {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw core::ParseError(std::string("model: ") + e.what());
  }
  if (root.value("format", "") != "capsel-model")
    throw core::ParseError("model: unrecognized document format");
  MulticlassModel mm;
  const auto& scaling = root.at("scaling");
  mm.scaling.mode = scaling.at("mode").get<std::string>() == "standardized"
                        ? core::Scaling::Standardized
                        : core::Scaling::UnitInterval;
  if (mm.scaling.mode == core::Scaling::Standardized) {
    mm.scaling.mean =
        vector_from_hex(scaling.at("mean").get<std::vector<std::string>>());
    mm.scaling.std =
        vector_from_hex(scaling.at("std").get<std::vector<std::string>>());
  }
  mm.class_names = root.at("class_names").get<std::vector<std::string>>();
  for (const auto& jm : root.at("models")) {
    EnsembleModel m;
    m.class_id = jm.at("class_id").get<int>();
    m.threshold = parse_hex_double(jm.at("threshold").get<std::string>());
    m.mu_p = parse_hex_double(jm.at("mu_p").get<std::string>());
    m.mu_n = parse_hex_double(jm.at("mu_n").get<std::string>());
    if (!jm.at("borrowed_from").is_null())
      m.borrowed_from = jm.at("borrowed_from").get<int>();
    m.sign_vec = signs::sign_vector_from_json(jm.at("signs").dump());
    m.weights.k = jm.at("k").get<Eigen::Index>();
    m.weights.w =
        vector_from_hex(jm.at("weights").get<std::vector<std::string>>());
    m.scaling = mm.scaling;
    const auto& solve = jm.at("solve");
    m.report.iterations = solve.at("iterations").get<int>();
    m.report.converged = solve.at("converged").get<bool>();
    m.report.objective_trace = {
        parse_hex_double(solve.at("final_objective").get<std::string>())};
    m.report.w_star = m.weights;
    mm.models.push_back(std::move(m));
  }
  std::sort(mm.models.begin(), mm.models.end(),
            [](const EnsembleModel& a, const EnsembleModel& b) {
              return a.class_id < b.class_id;
            });
  return mm;
} catch (const nlohmann::json::exception& e) {
  // Missing or mistyped keys surface as the library's parse error.
  throw core::ParseError(std::string("model: ") + e.what());
}

}  // namespace capsel::learn
