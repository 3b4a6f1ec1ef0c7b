#include "capsel/io.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>

namespace capsel::io {

namespace {

void finish_manifest(Dataset& ds, const std::string& format) {
  ds.manifest.source_format = format;
  ds.manifest.N = ds.F.rows();
  ds.manifest.n = ds.F.cols();
  for (int id : ds.labels)
    ds.manifest.class_histogram[ds.class_names[static_cast<std::size_t>(id)]]++;
  const auto stats = core::scaling_statistics(ds.F);
  std::uint64_t h = core::fnv1a(
      stats.mean.data(), static_cast<std::size_t>(stats.mean.size()) * 8);
  h = core::fnv1a(stats.std.data(),
                  static_cast<std::size_t>(stats.std.size()) * 8, h);
  ds.manifest.scaling_checksum = core::to_hex(h);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

std::uint32_t read_be32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4))
    throw core::ParseError(path + ": truncated header");
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

}  // namespace

std::string DatasetManifest::to_json() const {
  nlohmann::ordered_json j;
  j["source_format"] = source_format;
  j["N"] = N;
  j["n"] = n;
  j["class_histogram"] = class_histogram;
  j["scaling_checksum"] = scaling_checksum;
  return j.dump(2);
}

Dataset ingest_csv(const std::string& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw core::ParseError(path + ": cannot open");

  std::string line;
  if (!std::getline(in, line))
    throw core::ParseError(path + ": empty file, expected a header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx == header.size()) {
    std::string cols;
    for (const auto& h : header) cols += (cols.empty() ? "" : ", ") + h;
    throw core::ParseError(fmt::format(
        "{}: no column named '{}' (available: {})", path, label_column, cols));
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  std::size_t row_no = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == EOF) break;  // trailing newline
    ++row_no;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw core::ParseError(
          fmt::format("{}: row {} has {} cells, expected {}", path, row_no,
                      cells.size(), header.size()));
    std::vector<double> feats;
    feats.reserve(header.size() - 1);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == label_idx) {
        row_labels.push_back(cells[c]);
        continue;
      }
      double v = 0.0;
      const char* first = cells[c].data();
      const char* last = first + cells[c].size();
      const auto [p, ec] = std::from_chars(first, last, v);
      if (ec != std::errc{} || p != last || !std::isfinite(v))
        throw core::ParseError(
            fmt::format("{}: row {} column '{}': non-numeric cell '{}'", path,
                        row_no, header[c], cells[c]));
      feats.push_back(v);
    }
    rows.push_back(std::move(feats));
  }
  if (rows.empty()) throw core::ParseError(path + ": no data rows");

  Dataset ds;
  const std::set<std::string> names(row_labels.begin(), row_labels.end());
  ds.class_names.assign(names.begin(), names.end());
  std::map<std::string, int> id_of;
  for (std::size_t i = 0; i < ds.class_names.size(); ++i)
    id_of[ds.class_names[i]] = static_cast<int>(i);

  ds.F.resize(static_cast<Eigen::Index>(rows.size()),
              static_cast<Eigen::Index>(header.size() - 1));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      ds.F(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          rows[r][c];
    ds.labels.push_back(id_of.at(row_labels[r]));
  }
  finish_manifest(ds, "csv");
  return ds;
}

Dataset ingest_idx(const std::string& images_path,
                   const std::string& labels_path, bool center_crop) {
  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw core::ParseError(images_path + ": cannot open");
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw core::ParseError(labels_path + ": cannot open");

  if (read_be32(img, images_path) != 0x00000803u)
    throw core::ParseError(images_path + ": bad magic, expected 0x00000803");
  const auto count = static_cast<Eigen::Index>(read_be32(img, images_path));
  const auto rows = static_cast<Eigen::Index>(read_be32(img, images_path));
  const auto cols = static_cast<Eigen::Index>(read_be32(img, images_path));

  if (read_be32(lab, labels_path) != 0x00000801u)
    throw core::ParseError(labels_path + ": bad magic, expected 0x00000801");
  const auto lcount = static_cast<Eigen::Index>(read_be32(lab, labels_path));
  if (lcount != count)
    throw core::DimensionError(
        fmt::format("idx: {} images but {} labels", count, lcount));

  if (center_crop && (rows != 28 || cols != 28))
    throw core::InputError("idx: center crop expects 28x28 images");

  std::vector<unsigned char> pix(static_cast<std::size_t>(rows * cols));
  std::vector<unsigned char> lbl(static_cast<std::size_t>(count));
  if (!lab.read(reinterpret_cast<char*>(lbl.data()),
                static_cast<std::streamsize>(lbl.size())))
    throw core::ParseError(labels_path + ": length mismatch, file truncated");

  const Eigen::Index off = center_crop ? 7 : 0;
  const Eigen::Index side_r = center_crop ? 14 : rows;
  const Eigen::Index side_c = center_crop ? 14 : cols;

  Dataset ds;
  ds.F.resize(count, side_r * side_c);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!img.read(reinterpret_cast<char*>(pix.data()),
                  static_cast<std::streamsize>(pix.size())))
      throw core::ParseError(images_path + ": length mismatch, file truncated");
    for (Eigen::Index r = 0; r < side_r; ++r)
      for (Eigen::Index c = 0; c < side_c; ++c)
        ds.F(i, r * side_c + c) =
            static_cast<double>(
                pix[static_cast<std::size_t>((r + off) * cols + (c + off))]) /
            255.0;
  }

  const std::set<unsigned char> seen(lbl.begin(), lbl.end());
  std::map<unsigned char, int> id_of;
  for (unsigned char v : seen) {
    id_of[v] = static_cast<int>(ds.class_names.size());
    ds.class_names.push_back(std::to_string(static_cast<int>(v)));
  }
  ds.labels.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i)
    ds.labels.push_back(id_of.at(lbl[static_cast<std::size_t>(i)]));

  finish_manifest(ds, "idx");
  return ds;
}

}  // namespace capsel::io
