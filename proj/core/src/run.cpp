#include "capsel/run.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <vector>

#include "capsel/eval.hpp"
#include "capsel/io.hpp"

namespace capsel::run {

namespace {

namespace fs = std::filesystem;
using config::RunConfig;
using core::FeatureMatrix;
using core::LabelVector;
using core::Vector;
using nlohmann::ordered_json;

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Collects artifact files so a failing command can clean up after itself.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& out_dir) : dir_(out_dir) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw core::InputError("cannot write " + p.string());
    out << content;
    out.close();
    if (!out) throw core::InputError("failed writing " + p.string());
    written_.push_back(p);
  }

  void log(const std::string& line) {
    std::ofstream out(dir_ / "run.log", std::ios::app);
    out << "[" << utc_now() << "] " << line << "\n";
  }

  void remove_partial() {
    for (const auto& p : written_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
    written_.clear();
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& p : written_) out.push_back(p.filename().string());
    return out;
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

struct LoadedData {
  io::Dataset train;
  bool has_test = false;
  io::Dataset test;
};

LoadedData load_data(const RunConfig& cfg) {
  LoadedData d;
  if (cfg.format == "csv") {
    d.train = io::ingest_csv(cfg.train_csv, cfg.label_column);
    if (!cfg.test_csv.empty()) {
      d.test = io::ingest_csv(cfg.test_csv, cfg.label_column);
      d.has_test = true;
    }
  } else {
    d.train = io::ingest_idx(cfg.train_images, cfg.train_labels, cfg.center_crop);
    d.test = io::ingest_idx(cfg.test_images, cfg.test_labels, cfg.center_crop);
    d.has_test = true;
  }
  if (d.has_test) {
    if (d.test.F.cols() != d.train.F.cols())
      throw core::DimensionError(
          fmt::format("test set has {} features, train set has {}",
                      d.test.F.cols(), d.train.F.cols()));
    // Re-key test labels onto the training class table.
    std::map<std::string, int> id_of;
    for (std::size_t i = 0; i < d.train.class_names.size(); ++i)
      id_of[d.train.class_names[i]] = static_cast<int>(i);
    for (auto& lbl : d.test.labels) {
      const std::string& name =
          d.test.class_names[static_cast<std::size_t>(lbl)];
      const auto it = id_of.find(name);
      if (it == id_of.end())
        throw core::InputError("test set contains class '" + name +
                               "' absent from the training data");
      lbl = it->second;
    }
    d.test.class_names = d.train.class_names;
  }
  return d;
}

eval::RunSpec make_spec(const RunConfig& cfg, const LoadedData& d) {
  eval::RunSpec spec;
  spec.train = &d.train.F;
  spec.train_labels = &d.train.labels;
  if (d.has_test) {
    spec.test = &d.test.F;
    spec.test_labels = &d.test.labels;
  }
  spec.class_names = d.train.class_names;
  spec.mode = cfg.mode;
  spec.k = cfg.k;
  spec.labeled_per_class = cfg.labeled_per_class;
  spec.pool_policy = cfg.pool_policy;
  spec.pool_source = cfg.pool_source;
  spec.scaling = cfg.scaling;
  spec.mu_p = cfg.mu_p;
  spec.mu_n = cfg.mu_n;
  spec.theta = cfg.theta;
  spec.max_iter = cfg.max_iter;
  spec.tol = cfg.tol;
  return spec;
}

void require_test(const LoadedData& d, const std::string& command) {
  if (!d.has_test)
    throw core::ConfigError("config: command '" + command +
                            "' needs a test set (set test_csv)");
}

learn::MulticlassModel load_model(const RunConfig& cfg) {
  if (cfg.model_path.empty())
    throw core::ConfigError("config: this command requires model_path");
  std::ifstream in(cfg.model_path);
  if (!in) throw core::InputError("cannot open model " + cfg.model_path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return learn::multiclass_model_from_json(text);
}

// The k-vs-caller contract: features used by every experiment must respect
// 1 <= k <= n before any heavy work happens.
void check_k(const RunConfig& cfg, Eigen::Index n) {
  if (cfg.k > n)
    throw core::ConfigError(
        fmt::format("config: k = {} exceeds the {} available features", cfg.k, n));
}

void cmd_signs(const RunConfig& cfg, const LoadedData& d, ArtifactWriter& w,
               const std::string& hash) {
  const auto rows =
      eval::labeled_subset(cfg.seed, d.train.labels, cfg.labeled_per_class);
  FeatureMatrix F_l(static_cast<Eigen::Index>(rows.size()), d.train.F.cols());
  LabelVector l_l;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    F_l.row(static_cast<Eigen::Index>(i)) = d.train.F.row(rows[i]);
    l_l.push_back(d.train.labels[static_cast<std::size_t>(rows[i])]);
  }
  core::ScalingMode stats;
  if (cfg.scaling == core::Scaling::Standardized)
    stats = core::scaling_statistics(d.train.F);
  const FeatureMatrix F_s = stats.apply(F_l);

  const std::set<int> ids(l_l.begin(), l_l.end());
  if (ids.size() < 2)
    throw core::InsufficientLabelsError(
        "signs: need at least two labeled classes");

  ordered_json doc;
  doc["config_hash"] = hash;
  doc["seed"] = cfg.seed;
  ordered_json classes = ordered_json::array();
  for (int id : ids) {
    auto sv = signs::estimate_signs(F_s, l_l, id, cfg.flip_rule).second;
    sv.source_class = id;
    ordered_json entry;
    entry["class_id"] = id;
    entry["class_name"] = d.train.class_names[static_cast<std::size_t>(id)];
    const ordered_json sv_doc = ordered_json::parse(signs::to_json(sv));
    for (const auto& [key, val] : sv_doc.items()) entry[key] = val;
    classes.push_back(entry);
  }
  doc["classes"] = classes;
  w.write("signs.json", doc.dump(2));
}

void cmd_train(const RunConfig& cfg, const LoadedData& d, ArtifactWriter& w,
               const std::string& hash) {
  const auto spec = make_spec(cfg, d);
  if (spec.mode == learn::FitMode::Unsupervised &&
      spec.pool_policy != learn::PoolPolicy::LabeledOnly &&
      spec.pool_source != eval::PoolSource::Train)
    require_test(d, "train");
  const auto model = eval::fit_model(spec, cfg.seed);

  ordered_json doc = ordered_json::parse(learn::to_json(model));
  doc["config_hash"] = hash;
  doc["seed"] = cfg.seed;
  w.write("model.json", doc.dump(2));

  ordered_json diag;
  diag["config_hash"] = hash;
  diag["seed"] = cfg.seed;
  ordered_json classes = ordered_json::array();
  for (const auto& m : model.models) {
    ordered_json entry;
    entry["class_id"] = m.class_id;
    entry["solve"] = ordered_json::parse(m.report.to_json());
    classes.push_back(entry);
  }
  diag["classes"] = classes;
  w.write("diagnostics.json", diag.dump(2));
}

void cmd_predict(const RunConfig& cfg, const LoadedData& d, ArtifactWriter& w,
                 const std::string& hash) {
  const auto model = load_model(cfg);
  const FeatureMatrix& F = d.has_test ? d.test.F : d.train.F;
  auto name_of = [&](int id) {
    return static_cast<std::size_t>(id) < model.class_names.size()
               ? model.class_names[static_cast<std::size_t>(id)]
               : std::to_string(id);
  };
  std::string csv = fmt::format("# config_hash={} seed={}\n", hash, cfg.seed);
  csv += "sample,predicted";
  for (const auto& m : model.models) csv += ",score_" + name_of(m.class_id);
  csv += "\n";
  for (Eigen::Index i = 0; i < F.rows(); ++i) {
    const Vector f = F.row(i).transpose();
    const Vector scores = learn::score_all(model, f);
    const int pred = learn::predict_class(model, f);
    csv += fmt::format("{},{}", i, name_of(pred));
    for (Eigen::Index c = 0; c < scores.size(); ++c)
      csv += fmt::format(",{}", scores[c]);
    csv += "\n";
  }
  w.write("predictions.csv", csv);
}

void cmd_eval(const RunConfig& cfg, const LoadedData& d, ArtifactWriter& w,
              const std::string& hash) {
  require_test(d, "eval");
  const auto model = load_model(cfg);
  auto metrics = eval::evaluate(model, d.test.F, d.test.labels);
  metrics.run_seed = cfg.seed;
  w.write("metrics.json", metrics.to_json(model.class_names, hash));
  w.write("metrics.csv", metrics.to_csv(model.class_names, hash));
}

void cmd_sweep_unlabeled(const RunConfig& cfg, const LoadedData& d,
                         ArtifactWriter& w, const std::string& hash) {
  require_test(d, "sweep-unlabeled");
  const auto spec = make_spec(cfg, d);
  eval::GramCache cache;
  const auto result = eval::sweep_unlabeled(spec, cfg.fractions, cfg.repeats,
                                            cfg.seed, &cache);
  w.write("sweep.csv", result.to_csv(hash));
  w.write("sweep.json", result.to_json(hash));
}

void cmd_sweep_k(const RunConfig& cfg, const LoadedData& d, ArtifactWriter& w,
                 const std::string& hash) {
  require_test(d, "sweep-k");
  if (cfg.k_values.empty())
    throw core::ConfigError("config: sweep-k requires k_values");
  const auto spec = make_spec(cfg, d);
  std::vector<Eigen::Index> ks(cfg.k_values.begin(), cfg.k_values.end());
  eval::GramCache cache;
  const auto result = eval::sweep_k(spec, ks, cfg.repeats, cfg.seed, &cache);
  w.write("sweep.csv", result.to_csv(hash));
  w.write("sweep.json", result.to_json(hash));
}

std::map<int, int> resolve_map(const std::map<std::string, std::string>& byname,
                               const std::vector<std::string>& class_names,
                               const char* which) {
  std::map<std::string, int> id_of;
  for (std::size_t i = 0; i < class_names.size(); ++i)
    id_of[class_names[i]] = static_cast<int>(i);
  std::map<int, int> out;
  for (const auto& [dst, src] : byname) {
    const auto di = id_of.find(dst);
    const auto si = id_of.find(src);
    if (di == id_of.end() || si == id_of.end())
      throw core::ConfigError(
          fmt::format("config: {} names unknown class '{}'", which,
                      di == id_of.end() ? dst : src));
    out[di->second] = si->second;
  }
  return out;
}

void cmd_transfer(const RunConfig& cfg, const LoadedData& d, ArtifactWriter& w,
                  const std::string& hash) {
  require_test(d, "transfer");
  if (cfg.transfer_partial.empty() || cfg.transfer_mostly.empty())
    throw core::ConfigError(
        "config: transfer requires transfer_partial and transfer_mostly maps");
  const auto spec = make_spec(cfg, d);
  const auto partial =
      resolve_map(cfg.transfer_partial, spec.class_names, "transfer_partial");
  const auto mostly =
      resolve_map(cfg.transfer_mostly, spec.class_names, "transfer_mostly");
  eval::GramCache cache;
  const auto result = eval::sign_transfer_experiment(spec, partial, mostly,
                                                     cfg.repeats, cfg.seed, &cache);
  w.write("transfer.csv", result.to_csv(hash));
}

void cmd_similarity(const RunConfig& cfg, const LoadedData& d,
                    ArtifactWriter& w, const std::string& hash) {
  const auto rows =
      eval::labeled_subset(cfg.seed, d.train.labels, cfg.labeled_per_class);
  FeatureMatrix F_l(static_cast<Eigen::Index>(rows.size()), d.train.F.cols());
  LabelVector l_l;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    F_l.row(static_cast<Eigen::Index>(i)) = d.train.F.row(rows[i]);
    l_l.push_back(d.train.labels[static_cast<std::size_t>(rows[i])]);
  }
  core::ScalingMode stats;
  if (cfg.scaling == core::Scaling::Standardized)
    stats = core::scaling_statistics(d.train.F);
  const FeatureMatrix F_s = stats.apply(F_l);

  const std::set<int> ids(l_l.begin(), l_l.end());
  std::vector<signs::SignVector> by_class;
  for (int id : ids) {
    auto sv = signs::estimate_signs(F_s, l_l, id, cfg.flip_rule).second;
    sv.source_class = id;
    by_class.push_back(std::move(sv));
  }
  const auto S = signs::class_similarity(by_class);
  w.write("similarity.csv",
          eval::similarity_csv(S, d.train.class_names, hash));
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg) {
  static const std::set<std::string> commands = {
      "signs", "train",           "predict", "eval",
      "sweep-unlabeled", "sweep-k", "transfer", "similarity"};
  if (!commands.count(command)) {
    std::string all;
    for (const auto& c : commands) all += (all.empty() ? "" : ", ") + c;
    throw core::ConfigError(
        fmt::format("unknown command '{}' (expected one of: {})", command, all));
  }

  const std::string hash = config::config_hash(cfg);
  ArtifactWriter w(cfg.out_dir);
  w.log(fmt::format("start command={} config_hash={} seed={}", command, hash,
                    cfg.seed));
  try {
    const LoadedData d = load_data(cfg);
    check_k(cfg, d.train.F.cols());
    if (command == "signs")
      cmd_signs(cfg, d, w, hash);
    else if (command == "train")
      cmd_train(cfg, d, w, hash);
    else if (command == "predict")
      cmd_predict(cfg, d, w, hash);
    else if (command == "eval")
      cmd_eval(cfg, d, w, hash);
    else if (command == "sweep-unlabeled")
      cmd_sweep_unlabeled(cfg, d, w, hash);
    else if (command == "sweep-k")
      cmd_sweep_k(cfg, d, w, hash);
    else if (command == "transfer")
      cmd_transfer(cfg, d, w, hash);
    else
      cmd_similarity(cfg, d, w, hash);
  } catch (...) {
    w.remove_partial();
    w.log(fmt::format("fail command={}", command));
    throw;
  }
  std::string files;
  for (const auto& n : w.names()) files += (files.empty() ? "" : ",") + n;
  w.log(fmt::format("ok command={} artifacts={}", command, files));
  return 0;
}

}  // namespace capsel::run
