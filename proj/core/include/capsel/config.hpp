#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "capsel/eval.hpp"
#include "capsel/learn.hpp"

namespace capsel::config {

// Run configuration parsed from a JSON file. Unknown keys are rejected and
// everything is validated before any data is touched. `seed` is mandatory:
// no entropy is ever drawn from the environment.
struct RunConfig {
  // Data source: exactly one of csv / idx.
  std::string format;  // "csv" | "idx"
  std::string train_csv, test_csv, label_column;
  std::string train_images, train_labels, test_images, test_labels;
  bool center_crop = false;

  learn::FitMode mode = learn::FitMode::Unsupervised;
  core::Scaling scaling = core::Scaling::Standardized;
  signs::FlipRule flip_rule = signs::FlipRule::Negate;
  int k = 1;
  int labeled_per_class = 0;  // 0 = use every labeled sample
  learn::PoolPolicy pool_policy = learn::PoolPolicy::UnlabeledOnly;
  eval::PoolSource pool_source = eval::PoolSource::Test;

  std::uint64_t seed = 0;
  int repeats = 30;

  double mu_p = 1.0, mu_n = 0.0, theta = 0.5;
  int max_iter = 100;
  double tol = 1e-9;

  std::string out_dir = ".";
  std::string model_path;  // input for predict/eval

  std::vector<double> fractions{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<int> k_values;
  std::map<std::string, std::string> transfer_partial;
  std::map<std::string, std::string> transfer_mostly;
};

// Parses and validates a config document. Throws core::ConfigError on
// unknown keys, missing mandatory keys (format, data paths, seed), type
// mismatches, or inconsistent values (e.g. a flip rule that does not match
// the scaling mode).
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Canonical form of the config: sorted keys, seed and out_dir excluded, so
// that reruns with a different seed or output directory still share a hash.
std::string canonical_json(const RunConfig& cfg);

// FNV-1a hash of the canonical form, hex-encoded.
std::string config_hash(const RunConfig& cfg);

}  // namespace capsel::config
