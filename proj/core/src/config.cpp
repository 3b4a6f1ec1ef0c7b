#include "capsel/config.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace capsel::config {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) {
  throw core::ConfigError("config: " + msg);
}

const json& need(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) fail(fmt::format("missing required key '{}'", key));
  return *it;
}

std::string get_string(const json& j, const char* key) {
  const json& v = need(j, key);
  if (!v.is_string()) fail(fmt::format("key '{}' must be a string", key));
  return v.get<std::string>();
}

double as_number(const json& v, const char* key) {
  if (!v.is_number()) fail(fmt::format("key '{}' must be a number", key));
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(fmt::format("key '{}' must be finite", key));
  return d;
}

int as_int(const json& v, const char* key) {
  if (!v.is_number_integer())
    fail(fmt::format("key '{}' must be an integer", key));
  return v.get<int>();
}

std::map<std::string, std::string> as_string_map(const json& v,
                                                 const char* key) {
  if (!v.is_object()) fail(fmt::format("key '{}' must be an object", key));
  std::map<std::string, std::string> out;
  for (const auto& [name, val] : v.items()) {
    if (!val.is_string())
      fail(fmt::format("key '{}': value for '{}' must be a string", key, name));
    out[name] = val.get<std::string>();
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw core::ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");

  static const std::set<std::string> known = {
      "format",       "train_csv",      "test_csv",         "label_column",
      "train_images", "train_labels",   "test_images",      "test_labels",
      "center_crop",  "mode",           "scaling",          "flip_rule",
      "k",            "labeled_per_class", "pool_policy",   "pool_source",
      "seed",         "repeats",        "mu_p",             "mu_n",
      "theta",        "max_iter",       "tol",              "out_dir",
      "model_path",   "fractions",      "k_values",         "transfer_partial",
      "transfer_mostly"};
  for (const auto& [key, _] : j.items())
    if (!known.count(key)) fail(fmt::format("unknown key '{}'", key));

  RunConfig cfg;

  cfg.format = get_string(j, "format");
  if (cfg.format == "csv") {
    cfg.train_csv = get_string(j, "train_csv");
    cfg.label_column = get_string(j, "label_column");
    if (j.contains("test_csv")) cfg.test_csv = get_string(j, "test_csv");
  } else if (cfg.format == "idx") {
    cfg.train_images = get_string(j, "train_images");
    cfg.train_labels = get_string(j, "train_labels");
    cfg.test_images = get_string(j, "test_images");
    cfg.test_labels = get_string(j, "test_labels");
  } else {
    fail(fmt::format("format must be 'csv' or 'idx', got '{}'", cfg.format));
  }

  if (j.contains("center_crop")) {
    if (!j["center_crop"].is_boolean()) fail("key 'center_crop' must be a boolean");
    cfg.center_crop = j["center_crop"].get<bool>();
  }

  if (j.contains("mode")) {
    const auto m = get_string(j, "mode");
    if (m == "supervised")
      cfg.mode = learn::FitMode::Supervised;
    else if (m == "unsupervised")
      cfg.mode = learn::FitMode::Unsupervised;
    else
      fail(fmt::format("mode must be 'supervised' or 'unsupervised', got '{}'", m));
  }

  if (j.contains("scaling")) {
    const auto s = get_string(j, "scaling");
    if (s == "unit_interval")
      cfg.scaling = core::Scaling::UnitInterval;
    else if (s == "standardized")
      cfg.scaling = core::Scaling::Standardized;
    else
      fail(fmt::format("scaling must be 'unit_interval' or 'standardized', got '{}'", s));
  }
  cfg.flip_rule = signs::flip_rule_for(cfg.scaling);

  if (j.contains("flip_rule")) {
    const auto f = get_string(j, "flip_rule");
    if (f == "one_minus")
      cfg.flip_rule = signs::FlipRule::OneMinus;
    else if (f == "negate")
      cfg.flip_rule = signs::FlipRule::Negate;
    else
      fail(fmt::format("flip_rule must be 'one_minus' or 'negate', got '{}'", f));
    if (cfg.flip_rule != signs::flip_rule_for(cfg.scaling))
      fail(fmt::format("flip_rule '{}' is inconsistent with scaling '{}'", f,
                       core::to_string(cfg.scaling)));
  }

  if (j.contains("k")) cfg.k = as_int(j["k"], "k");
  if (cfg.k < 1) fail("k must be >= 1");

  if (j.contains("labeled_per_class")) {
    cfg.labeled_per_class = as_int(j["labeled_per_class"], "labeled_per_class");
    if (cfg.labeled_per_class < 1) fail("labeled_per_class must be >= 1");
  }

  if (j.contains("pool_policy")) {
    const auto p = get_string(j, "pool_policy");
    if (p == "labeled_only")
      cfg.pool_policy = learn::PoolPolicy::LabeledOnly;
    else if (p == "labeled_plus_unlabeled")
      cfg.pool_policy = learn::PoolPolicy::LabeledPlusUnlabeled;
    else if (p == "unlabeled_only")
      cfg.pool_policy = learn::PoolPolicy::UnlabeledOnly;
    else
      fail(fmt::format(
          "pool_policy must be 'labeled_only', 'labeled_plus_unlabeled' or "
          "'unlabeled_only', got '{}'",
          p));
  }

  if (j.contains("pool_source")) {
    const auto p = get_string(j, "pool_source");
    if (p == "test")
      cfg.pool_source = eval::PoolSource::Test;
    else if (p == "train")
      cfg.pool_source = eval::PoolSource::Train;
    else if (p == "train_plus_test")
      cfg.pool_source = eval::PoolSource::TrainPlusTest;
    else
      fail(fmt::format(
          "pool_source must be 'test', 'train' or 'train_plus_test', got '{}'", p));
  }

  {
    const json& s = need(j, "seed");
    if (!s.is_number_integer() || (s.is_number_integer() && s.get<long long>() < 0))
      fail("key 'seed' must be a non-negative integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  if (j.contains("repeats")) {
    cfg.repeats = as_int(j["repeats"], "repeats");
    if (cfg.repeats < 1) fail("repeats must be >= 1");
  }

  if (j.contains("mu_p")) cfg.mu_p = as_number(j["mu_p"], "mu_p");
  if (j.contains("mu_n")) cfg.mu_n = as_number(j["mu_n"], "mu_n");
  if (j.contains("theta")) cfg.theta = as_number(j["theta"], "theta");
  if (!(0.0 <= cfg.mu_n && cfg.mu_n < cfg.mu_p && cfg.mu_p <= 1.0))
    fail("targets must satisfy 0 <= mu_n < mu_p <= 1");
  if (!(cfg.mu_n < cfg.theta && cfg.theta < cfg.mu_p))
    fail("theta must lie strictly between mu_n and mu_p");

  if (j.contains("max_iter")) {
    cfg.max_iter = as_int(j["max_iter"], "max_iter");
    if (cfg.max_iter < 1) fail("max_iter must be >= 1");
  }
  if (j.contains("tol")) {
    cfg.tol = as_number(j["tol"], "tol");
    if (cfg.tol <= 0.0) fail("tol must be > 0");
  }

  if (j.contains("out_dir")) cfg.out_dir = get_string(j, "out_dir");
  if (j.contains("model_path")) cfg.model_path = get_string(j, "model_path");

  if (j.contains("fractions")) {
    const json& arr = j["fractions"];
    if (!arr.is_array()) fail("key 'fractions' must be an array");
    cfg.fractions.clear();
    for (const auto& v : arr) {
      const double f = as_number(v, "fractions");
      if (f < 0.0 || f > 1.0) fail("fractions must lie in [0,1]");
      cfg.fractions.push_back(f);
    }
    if (cfg.fractions.empty()) fail("fractions must be non-empty");
  }

  if (j.contains("k_values")) {
    const json& arr = j["k_values"];
    if (!arr.is_array()) fail("key 'k_values' must be an array");
    cfg.k_values.clear();
    for (const auto& v : arr) {
      const int kv = as_int(v, "k_values");
      if (kv < 1) fail("k_values entries must be >= 1");
      cfg.k_values.push_back(kv);
    }
    if (cfg.k_values.empty()) fail("k_values must be non-empty");
  }

  if (j.contains("transfer_partial"))
    cfg.transfer_partial = as_string_map(j["transfer_partial"], "transfer_partial");
  if (j.contains("transfer_mostly"))
    cfg.transfer_mostly = as_string_map(j["transfer_mostly"], "transfer_mostly");

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw core::ConfigError("config: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string canonical_json(const RunConfig& cfg) {
  json j;  // nlohmann::json orders object keys lexicographically
  j["format"] = cfg.format;
  if (cfg.format == "csv") {
    j["train_csv"] = cfg.train_csv;
    j["label_column"] = cfg.label_column;
    if (!cfg.test_csv.empty()) j["test_csv"] = cfg.test_csv;
  } else {
    j["train_images"] = cfg.train_images;
    j["train_labels"] = cfg.train_labels;
    j["test_images"] = cfg.test_images;
    j["test_labels"] = cfg.test_labels;
  }
  j["center_crop"] = cfg.center_crop;
  j["mode"] = learn::to_string(cfg.mode);
  j["scaling"] = core::to_string(cfg.scaling);
  j["flip_rule"] = signs::to_string(cfg.flip_rule);
  j["k"] = cfg.k;
  j["labeled_per_class"] = cfg.labeled_per_class;
  j["pool_policy"] = learn::to_string(cfg.pool_policy);
  j["pool_source"] = eval::to_string(cfg.pool_source);
  j["repeats"] = cfg.repeats;
  j["mu_p"] = cfg.mu_p;
  j["mu_n"] = cfg.mu_n;
  j["theta"] = cfg.theta;
  j["max_iter"] = cfg.max_iter;
  j["tol"] = cfg.tol;
  if (!cfg.model_path.empty()) j["model_path"] = cfg.model_path;
  j["fractions"] = cfg.fractions;
  j["k_values"] = cfg.k_values;
  j["transfer_partial"] = cfg.transfer_partial;
  j["transfer_mostly"] = cfg.transfer_mostly;
  return j.dump();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = canonical_json(cfg);
  return core::to_hex(core::fnv1a(canon.data(), canon.size()));
}

}  // namespace capsel::config
