#pragma once

#include "capsel/core.hpp"

#include <map>
#include <string>
#include <vector>

// Dataset ingestion: CSV (canonical interchange) and the big-endian IDX
// image/label format used by the MNIST acceptance runs.
namespace capsel::io {

struct DatasetManifest {
  std::string source_format;  // "csv" | "idx"
  Eigen::Index N = 0;
  Eigen::Index n = 0;
  std::map<std::string, Eigen::Index> class_histogram;  // by display name
  std::string scaling_checksum;  // FNV over raw per-feature mean/std

  std::string to_json() const;
};

struct Dataset {
  core::FeatureMatrix F;
  core::LabelVector labels;  // ids indexing class_names
  std::vector<std::string> class_names;  // sorted distinct label strings
  DatasetManifest manifest;
};

// Strict CSV with a header row: the named label column supplies class
// strings, every other cell must parse as a finite number. Row order is
// preserved; errors carry the 1-based data row and the column name.
Dataset ingest_csv(const std::string& path, const std::string& label_column);

// IDX pair: images (magic 0x00000803) and labels (magic 0x00000801),
// big-endian dimensions. Pixels map to [0,1] by /255; each RxC image
// flattens row-major. center_crop keeps the central 14x14 of 28x28 images.
Dataset ingest_idx(const std::string& images_path,
                   const std::string& labels_path, bool center_crop = false);

}  // namespace capsel::io
