#include "capsel/eval.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

namespace capsel::eval {

namespace {

std::vector<int> sorted_class_ids(const LabelVector& labels) {
  std::set<int> ids(labels.begin(), labels.end());
  return {ids.begin(), ids.end()};
}

// Stratified subsample without replacement, per_class = 0 meaning "all".
// Chosen rows are re-sorted ascending so downstream reductions always see
// samples in canonical order regardless of shuffle history.
std::vector<Eigen::Index> select_labeled_rows(std::mt19937_64& rng,
                                              const LabelVector& labels,
                                              int per_class) {
  std::vector<Eigen::Index> chosen;
  if (per_class == 0) {
    chosen.resize(labels.size());
    std::iota(chosen.begin(), chosen.end(), Eigen::Index{0});
    return chosen;
  }
  for (int id : sorted_class_ids(labels)) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == id) rows.push_back(static_cast<Eigen::Index>(i));
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto take = std::min<std::size_t>(rows.size(),
                                            static_cast<std::size_t>(per_class));
    chosen.insert(chosen.end(), rows.begin(),
                  rows.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

FeatureMatrix take_rows(const FeatureMatrix& F,
                        const std::vector<Eigen::Index>& rows) {
  FeatureMatrix out(static_cast<Eigen::Index>(rows.size()), F.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = F.row(rows[i]);
  return out;
}

LabelVector take_labels(const LabelVector& labels,
                        const std::vector<Eigen::Index>& rows) {
  LabelVector out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out[i] = labels[static_cast<std::size_t>(rows[i])];
  return out;
}

FeatureMatrix vstack(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.cols() != b.cols())
    throw core::DimensionError("vstack: column mismatch");
  FeatureMatrix out(a.rows() + b.rows(), a.cols());
  out.topRows(a.rows()) = a;
  out.bottomRows(b.rows()) = b;
  return out;
}

learn::MulticlassModel equal_weight_baseline(
    const learn::MulticlassModel& mm) {
  learn::MulticlassModel base = mm;
  for (auto& m : base.models) {
    const Eigen::Index n = m.sign_vec.n();
    m.weights.k = n;
    m.weights.w = Vector::Constant(n, 1.0 / static_cast<double>(n));
    m.report = {};
  }
  return base;
}

// Per-class sign estimation on the scaled labeled subset.
std::map<int, signs::SignVector> estimate_all_signs(
    const FeatureMatrix& scaled_labeled, const LabelVector& labels,
    signs::FlipRule rule) {
  std::map<int, signs::SignVector> out;
  for (int id : sorted_class_ids(labels)) {
    auto [est, sv] = signs::estimate_signs(scaled_labeled, labels, id, rule);
    out.emplace(id, std::move(sv));
  }
  return out;
}

learn::FitOptions options_from(const RunSpec& spec,
                               const core::ScalingMode& stats) {
  learn::FitOptions opts;
  opts.k = spec.k;
  opts.mode = spec.mode;
  opts.pool = spec.pool_policy;
  opts.scaling = stats;
  opts.mu_p = spec.mu_p;
  opts.mu_n = spec.mu_n;
  opts.theta = spec.theta;
  opts.max_iter = spec.max_iter;
  opts.tol = spec.tol;
  return opts;
}

void check_spec(const RunSpec& spec) {
  if (!spec.train || !spec.train_labels || !spec.test || !spec.test_labels)
    throw core::InputError("run: data pointers must be set");
  if (spec.train->rows() !=
      static_cast<Eigen::Index>(spec.train_labels->size()))
    throw core::DimensionError("run: train labels != train rows");
  if (spec.test->rows() != static_cast<Eigen::Index>(spec.test_labels->size()))
    throw core::DimensionError("run: test labels != test rows");
  if (spec.train->cols() != spec.test->cols())
    throw core::DimensionError("run: train/test feature count mismatch");
  if (spec.labeled_per_class < 0)
    throw core::ConfigError("run: labeled_per_class must be >= 0");
}

// Fits every class against a shared pool, optionally with a sign-borrow
// map (target class -> class whose signs to reuse).
learn::MulticlassModel fit_with_signs(
    const RunSpec& spec, const core::ScalingMode& stats,
    const FeatureMatrix& labeled_raw, const LabelVector& labels,
    const FeatureMatrix* pool_raw, const std::map<int, int>& borrow,
    GramCache* cache) {
  const auto opts = options_from(spec, stats);
  const FeatureMatrix scaled_labeled = stats.apply(labeled_raw);
  const auto rule = signs::flip_rule_for(stats.mode);
  auto sign_by_class = estimate_all_signs(scaled_labeled, labels, rule);

  for (const auto& [target, source] : borrow)
    if (!sign_by_class.count(target) || !sign_by_class.count(source))
      throw core::InputError(
          fmt::format("transfer: unknown class in mapping {}->{}", target,
                      source));

  learn::MulticlassModel mm;
  mm.scaling = stats;
  mm.class_names = spec.class_names;

  auto assemble = [&](int id, const signs::SignVector& sv,
                      optim::SolveReport rep, std::optional<int> borrowed) {
    learn::EnsembleModel m;
    m.class_id = id;
    m.sign_vec = sv;
    m.weights = rep.w_star;
    m.threshold = opts.theta;
    m.mu_p = opts.mu_p;
    m.mu_n = opts.mu_n;
    m.scaling = stats;
    m.borrowed_from = borrowed;
    m.report = std::move(rep);
    mm.models.push_back(std::move(m));
  };
  auto sign_for = [&](int id) -> std::pair<const signs::SignVector&,
                                           std::optional<int>> {
    const auto it = borrow.find(id);
    if (it == borrow.end() || it->second == id)
      return {sign_by_class.at(id), std::nullopt};
    return {sign_by_class.at(it->second), it->second};
  };

  if (spec.mode == learn::FitMode::Supervised) {
    for (const auto& [id, own] : sign_by_class) {
      const auto [sv, borrowed] = sign_for(id);
      const FeatureMatrix Ff = signs::flip(scaled_labeled, sv);
      const auto t = core::make_targets(labels, id, opts.mu_p, opts.mu_n);
      const auto obj = learn::build_supervised_objective(Ff, t);
      const optim::CappedSimplex dom(Ff.cols(), opts.k);
      auto rep = optim::ipfp_solve(obj, dom, optim::uniform_weights(dom),
                                   opts.max_iter, opts.tol);
      assemble(id, sv, std::move(rep), borrowed);
    }
    return mm;
  }

  // Unsupervised: assemble the pool once (it is class-independent).
  FeatureMatrix pool_scaled;
  switch (spec.pool_policy) {
    case learn::PoolPolicy::LabeledOnly:
      pool_scaled = scaled_labeled;
      break;
    case learn::PoolPolicy::UnlabeledOnly:
      if (!pool_raw || pool_raw->rows() == 0)
        throw core::InputError("run: empty unlabeled pool");
      pool_scaled = stats.apply(*pool_raw);
      break;
    case learn::PoolPolicy::LabeledPlusUnlabeled:
      pool_scaled = pool_raw && pool_raw->rows() > 0
                        ? vstack(scaled_labeled, stats.apply(*pool_raw))
                        : scaled_labeled;
      break;
  }

  if (rule != signs::FlipRule::Negate) {
    // One-minus flipping is affine rather than a column negation, so the
    // gram-conjugation shortcut does not apply; build each class's flipped
    // pool objective directly.
    for (const auto& [id, own] : sign_by_class) {
      const auto [sv, borrowed] = sign_for(id);
      const FeatureMatrix Pf = signs::flip(pool_scaled, sv);
      const auto obj = learn::build_unsupervised_objective(Pf);
      const optim::CappedSimplex dom(Pf.cols(), opts.k);
      auto rep = optim::ipfp_solve(obj, dom, optim::uniform_weights(dom),
                                   opts.max_iter, opts.tol);
      assemble(id, sv, std::move(rep), borrowed);
    }
    return mm;
  }

  // Negation flips conjugate the pool gram exactly, so one gram serves
  // every class and every sign vector.
  const Matrix G_local = cache ? Matrix() : core::gram(pool_scaled);
  const Matrix& G = cache ? cache->get(pool_scaled) : G_local;

  for (const auto& [id, own] : sign_by_class) {
    const auto [sv, borrowed] = sign_for(id);
    auto m = learn::fit_binary_with_pool_gram(id, sv, G, opts);
    m.borrowed_from = borrowed;
    mm.models.push_back(std::move(m));
  }
  return mm;
}

learn::MulticlassModel fit_rows(const RunSpec& spec,
                                const std::vector<Eigen::Index>& labeled_rows,
                                const FeatureMatrix* pool_raw,
                                const std::map<int, int>& borrow,
                                GramCache* cache) {
  const core::ScalingMode stats = spec.scaling == core::Scaling::Standardized
                                      ? core::scaling_statistics(*spec.train)
                                      : core::ScalingMode{};
  const FeatureMatrix F_l = take_rows(*spec.train, labeled_rows);
  const LabelVector y_l = take_labels(*spec.train_labels, labeled_rows);
  if (sorted_class_ids(y_l).size() < 2)
    throw core::InsufficientLabelsError("run: need >= 2 labeled classes");
  return fit_with_signs(spec, stats, F_l, y_l, pool_raw, borrow, cache);
}

RunResult make_result(learn::MulticlassModel model, const RunSpec& spec,
                      std::uint64_t seed) {
  RunResult rr;
  rr.model = std::move(model);
  rr.metrics = evaluate(rr.model, *spec.test, *spec.test_labels);
  rr.metrics.run_seed = seed;
  rr.baseline_metrics =
      evaluate(equal_weight_baseline(rr.model), *spec.test, *spec.test_labels);
  rr.baseline_metrics.run_seed = seed;
  return rr;
}

// The raw pool matrix named by pool_source; TrainPlusTest materializes.
const FeatureMatrix* source_pool(const RunSpec& spec, FeatureMatrix& storage) {
  if (spec.mode == learn::FitMode::Supervised ||
      spec.pool_policy == learn::PoolPolicy::LabeledOnly)
    return nullptr;
  switch (spec.pool_source) {
    case PoolSource::Test: return spec.test;
    case PoolSource::Train: return spec.train;
    default:
      storage = vstack(*spec.train, *spec.test);
      return &storage;
  }
}

}  // namespace

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return core::sum_fixed_order(v.data(), static_cast<Eigen::Index>(v.size())) /
         static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  return std::sqrt(mean_of(sq));
}

MetricsReport evaluate(const learn::MulticlassModel& mm,
                       const FeatureMatrix& F_test,
                       const LabelVector& labels_test) {
  if (mm.models.empty()) throw core::InputError("evaluate: empty model");
  if (F_test.rows() != static_cast<Eigen::Index>(labels_test.size()))
    throw core::DimensionError("evaluate: label count != rows");

  MetricsReport rep;
  for (const auto& m : mm.models) rep.class_ids.push_back(m.class_id);
  std::map<int, Eigen::Index> col_of;
  for (std::size_t i = 0; i < rep.class_ids.size(); ++i)
    col_of[rep.class_ids[i]] = static_cast<Eigen::Index>(i);

  const auto C = static_cast<Eigen::Index>(rep.class_ids.size());
  rep.confusion = Eigen::MatrixXi::Zero(C, C);
  rep.n_test = F_test.rows();

  for (Eigen::Index i = 0; i < F_test.rows(); ++i) {
    const auto it = col_of.find(labels_test[static_cast<std::size_t>(i)]);
    if (it == col_of.end())
      throw core::InputError("evaluate: test label not covered by the model");
    const int pred = learn::predict_class(mm, F_test.row(i).transpose());
    rep.confusion(it->second, col_of.at(pred)) += 1;
  }

  Eigen::Index correct = 0;
  for (Eigen::Index r = 0; r < C; ++r) {
    correct += rep.confusion(r, r);
    const Eigen::Index total = rep.confusion.row(r).sum();
    rep.per_class_accuracy[rep.class_ids[static_cast<std::size_t>(r)]] =
        total > 0 ? static_cast<double>(rep.confusion(r, r)) /
                        static_cast<double>(total)
                  : 0.0;
  }
  rep.overall_accuracy =
      static_cast<double>(correct) / static_cast<double>(rep.n_test);
  return rep;
}

std::string MetricsReport::to_json(const std::vector<std::string>& class_names,
                                   const std::string& config_hash) const {
  auto name_of = [&](int id) {
    return id >= 0 && static_cast<std::size_t>(id) < class_names.size()
               ? class_names[static_cast<std::size_t>(id)]
               : std::to_string(id);
  };
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["seed"] = run_seed;
  j["n_test"] = n_test;
  j["overall_accuracy"] = overall_accuracy;
  nlohmann::ordered_json per;
  for (const auto& [id, acc] : per_class_accuracy) per[name_of(id)] = acc;
  j["per_class_accuracy"] = per;
  nlohmann::ordered_json conf;
  conf["classes"] = [&] {
    std::vector<std::string> out;
    for (int id : class_ids) out.push_back(name_of(id));
    return out;
  }();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    std::vector<int> row(static_cast<std::size_t>(confusion.cols()));
    for (Eigen::Index c = 0; c < confusion.cols(); ++c)
      row[static_cast<std::size_t>(c)] = confusion(r, c);
    rows.push_back(row);
  }
  conf["rows"] = rows;
  j["confusion"] = conf;
  return j.dump(2);
}

std::string MetricsReport::to_csv(const std::vector<std::string>& class_names,
                                  const std::string& config_hash) const {
  auto name_of = [&](int id) {
    return id >= 0 && static_cast<std::size_t>(id) < class_names.size()
               ? class_names[static_cast<std::size_t>(id)]
               : std::to_string(id);
  };
  std::string out = fmt::format("# config_hash={}\n# seed={}\n", config_hash,
                                run_seed);
  out += "class,test_count,correct,accuracy\n";
  Eigen::Index correct = 0;
  for (Eigen::Index r = 0; r < confusion.rows(); ++r) {
    const int id = class_ids[static_cast<std::size_t>(r)];
    const Eigen::Index total = confusion.row(r).sum();
    correct += confusion(r, r);
    out += fmt::format("{},{},{},{}\n", name_of(id), total, confusion(r, r),
                       per_class_accuracy.at(id));
  }
  out += fmt::format("overall,{},{},{}\n", n_test, correct, overall_accuracy);
  return out;
}

const Matrix& GramCache::get(const FeatureMatrix& scaled_pool) {
  const Eigen::Index r = scaled_pool.rows();
  const Eigen::Index c = scaled_pool.cols();
  std::uint64_t h = core::fnv1a(&r, sizeof r);
  h = core::fnv1a(&c, sizeof c, h);
  h = core::fnv1a(scaled_pool.data(),
                  static_cast<std::size_t>(scaled_pool.size()) * sizeof(double),
                  h);
  auto it = cache_.find(h);
  if (it == cache_.end())
    it = cache_.emplace(h, core::gram(scaled_pool)).first;
  return it->second;
}

std::vector<Eigen::Index> labeled_subset(std::uint64_t seed,
                                         const LabelVector& labels,
                                         int per_class) {
  std::mt19937_64 rng(seed);
  return select_labeled_rows(rng, labels, per_class);
}

learn::MulticlassModel fit_model(const RunSpec& spec, std::uint64_t seed,
                                 GramCache* cache) {
  check_spec(spec);
  const auto labeled =
      labeled_subset(seed, *spec.train_labels, spec.labeled_per_class);
  FeatureMatrix storage;
  const FeatureMatrix* pool = source_pool(spec, storage);
  return fit_rows(spec, labeled, pool, {}, cache);
}

RunResult run_once(const RunSpec& spec, std::uint64_t seed, GramCache* cache) {
  return make_result(fit_model(spec, seed, cache), spec, seed);
}

SweepResult sweep_unlabeled(const RunSpec& spec,
                            const std::vector<double>& fractions, int repeats,
                            std::uint64_t base_seed, GramCache* cache) {
  check_spec(spec);
  if (repeats < 1) throw core::ConfigError("sweep: repeats >= 1");
  for (double f : fractions)
    if (!(f >= 0.0 && f <= 1.0))
      throw core::ConfigError("sweep: fractions must lie in [0,1]");

  FeatureMatrix storage;
  const FeatureMatrix* pool = source_pool(spec, storage);

  std::vector<double> sorted_fr = fractions;
  std::sort(sorted_fr.begin(), sorted_fr.end());

  SweepResult res;
  res.axis = SweepAxis::UnlabeledFraction;
  res.repeats = repeats;
  for (double f : sorted_fr) {
    SweepPoint pt;
    pt.axis_value = f;
    for (int i = 0; i < repeats; ++i) {
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
      std::mt19937_64 rng(seed);
      const auto labeled =
          select_labeled_rows(rng, *spec.train_labels, spec.labeled_per_class);
      // Pool subsample: uniform without replacement, drawn after the
      // labeled subset from the same seeded stream.
      FeatureMatrix sub;
      const FeatureMatrix* sub_ptr = nullptr;
      if (pool) {
        std::vector<Eigen::Index> rows(static_cast<std::size_t>(pool->rows()));
        std::iota(rows.begin(), rows.end(), Eigen::Index{0});
        std::shuffle(rows.begin(), rows.end(), rng);
        const auto m = static_cast<std::size_t>(
            std::llround(f * static_cast<double>(pool->rows())));
        rows.resize(m);
        std::sort(rows.begin(), rows.end());
        sub = take_rows(*pool, rows);
        sub_ptr = &sub;
      }
      const auto rr =
          make_result(fit_rows(spec, labeled, sub_ptr, {}, cache), spec, seed);
      pt.seeds.push_back(seed);
      pt.accuracies.push_back(rr.metrics.overall_accuracy);
      pt.baseline_accuracies.push_back(rr.baseline_metrics.overall_accuracy);
    }
    pt.mean_accuracy = mean_of(pt.accuracies);
    pt.std_accuracy = std_of(pt.accuracies);
    pt.baseline_mean = mean_of(pt.baseline_accuracies);
    pt.baseline_std = std_of(pt.baseline_accuracies);
    res.points.push_back(std::move(pt));
  }
  return res;
}

SweepResult sweep_k(const RunSpec& spec, const std::vector<Eigen::Index>& ks,
                    int repeats, std::uint64_t base_seed, GramCache* cache) {
  check_spec(spec);
  if (repeats < 1) throw core::ConfigError("sweep: repeats >= 1");
  for (const auto k : ks)
    if (k < 1 || k > spec.train->cols())
      throw core::DomainError(
          fmt::format("sweep: k={} outside 1..{}", k, spec.train->cols()));

  std::vector<Eigen::Index> sorted_ks = ks;
  std::sort(sorted_ks.begin(), sorted_ks.end());

  SweepResult res;
  res.axis = SweepAxis::K;
  res.repeats = repeats;
  for (const auto k : sorted_ks) {
    RunSpec ps = spec;
    ps.k = k;
    SweepPoint pt;
    pt.axis_value = static_cast<double>(k);
    for (int i = 0; i < repeats; ++i) {
      const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
      const auto rr = run_once(ps, seed, cache);
      pt.seeds.push_back(seed);
      pt.accuracies.push_back(rr.metrics.overall_accuracy);
      pt.baseline_accuracies.push_back(rr.baseline_metrics.overall_accuracy);
    }
    pt.mean_accuracy = mean_of(pt.accuracies);
    pt.std_accuracy = std_of(pt.accuracies);
    pt.baseline_mean = mean_of(pt.baseline_accuracies);
    pt.baseline_std = std_of(pt.baseline_accuracies);
    res.points.push_back(std::move(pt));
  }
  return res;
}

TransferResult sign_transfer_experiment(const RunSpec& spec,
                                        const std::map<int, int>& partial_map,
                                        const std::map<int, int>& mostly_map,
                                        int repeats, std::uint64_t base_seed,
                                        GramCache* cache) {
  check_spec(spec);
  if (repeats < 1) throw core::ConfigError("transfer: repeats >= 1");

  FeatureMatrix storage;
  const FeatureMatrix* pool = source_pool(spec, storage);

  TransferResult res;
  res.settings = {{"all_own", {}, {}, 0, 0},
                  {"partial_borrowed", {}, {}, 0, 0},
                  {"mostly_borrowed", {}, {}, 0, 0}};
  const std::map<int, int> empty_map;
  const std::map<int, int>* maps[3] = {&empty_map, &partial_map, &mostly_map};

  for (int i = 0; i < repeats; ++i) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(i);
    const auto labeled =
        labeled_subset(seed, *spec.train_labels, spec.labeled_per_class);
    for (std::size_t s = 0; s < 3; ++s) {
      const auto mm = fit_rows(spec, labeled, pool, *maps[s], cache);
      const auto met = evaluate(mm, *spec.test, *spec.test_labels);
      res.settings[s].seeds.push_back(seed);
      res.settings[s].accuracies.push_back(met.overall_accuracy);
    }
  }
  for (auto& s : res.settings) {
    s.mean_accuracy = mean_of(s.accuracies);
    s.std_accuracy = std_of(s.accuracies);
  }
  return res;
}

std::string SweepResult::to_csv(const std::string& config_hash) const {
  std::string out = fmt::format("# config_hash={}\n", config_hash);
  out += "axis,value,repeat,seed,accuracy,baseline_accuracy\n";
  for (const auto& pt : points)
    for (std::size_t i = 0; i < pt.accuracies.size(); ++i)
      out += fmt::format("{},{},{},{},{},{}\n", to_string(axis), pt.axis_value,
                         i, pt.seeds[i], pt.accuracies[i],
                         pt.baseline_accuracies[i]);
  return out;
}

std::string SweepResult::to_json(const std::string& config_hash) const {
  nlohmann::ordered_json j;
  j["config_hash"] = config_hash;
  j["axis"] = to_string(axis);
  j["repeats"] = repeats;
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& pt : points) {
    nlohmann::ordered_json p;
    p["value"] = pt.axis_value;
    p["mean_accuracy"] = pt.mean_accuracy;
    p["std_accuracy"] = pt.std_accuracy;
    p["baseline_mean"] = pt.baseline_mean;
    p["baseline_std"] = pt.baseline_std;
    p["seeds"] = pt.seeds;
    p["accuracies"] = pt.accuracies;
    p["baseline_accuracies"] = pt.baseline_accuracies;
    pts.push_back(p);
  }
  j["points"] = pts;
  return j.dump(2);
}

std::string TransferResult::to_csv(const std::string& config_hash) const {
  std::string out = fmt::format("# config_hash={}\n", config_hash);
  out += "setting,repeat,seed,accuracy\n";
  for (const auto& s : settings)
    for (std::size_t i = 0; i < s.accuracies.size(); ++i)
      out += fmt::format("{},{},{},{}\n", s.name, i, s.seeds[i],
                         s.accuracies[i]);
  return out;
}

std::string similarity_csv(const Matrix& S,
                           const std::vector<std::string>& class_names,
                           const std::string& config_hash) {
  auto name_of = [&](Eigen::Index i) {
    return static_cast<std::size_t>(i) < class_names.size()
               ? class_names[static_cast<std::size_t>(i)]
               : std::to_string(i);
  };
  std::string out = fmt::format("# config_hash={}\n", config_hash);
  out += "class";
  for (Eigen::Index c = 0; c < S.cols(); ++c)
    out += fmt::format(",{}", name_of(c));
  out += "\n";
  for (Eigen::Index r = 0; r < S.rows(); ++r) {
    out += name_of(r);
    for (Eigen::Index c = 0; c < S.cols(); ++c)
      out += fmt::format(",{}", S(r, c));
    out += "\n";
  }
  return out;
}

}  // namespace capsel::eval
