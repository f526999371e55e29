//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_INGESTION_HPP_
#define LATEFUSION_INGESTION_HPP_

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefusion/detail/text.hpp"
#include "latefusion/error.hpp"

namespace latefusion {

struct SampleKey {
  std::string video_id;
  std::string image_id;

  auto operator<=>(const SampleKey &) const = default;
};

inline std::string to_string(const SampleKey &key) {
  return "(" + key.video_id + ", " + key.image_id + ")";
}

/// One data line of an inducer file.
struct InducerRecord {
  std::string video_id;
  std::string image_id;
  int class_label = 0;
  double raw_score = 0.0;

  SampleKey key() const { return {video_id, image_id}; }
};

struct InducerTable {
  std::string inducer_name;
  std::vector<InducerRecord> records;
};

/// Ground truth for one sample. `label` is the binary relevance judgment;
/// `target` is the regression target used by the fitness function and equals
/// `label` unless the truth file carries an explicit target column.
struct TruthEntry {
  int label = 0;
  double target = 0.0;
};

class GroundTruth {
 public:
  void add(SampleKey key, TruthEntry entry) {
    auto [it, inserted] = entries_.emplace(std::move(key), entry);
    if (!inserted)
      throw DuplicateKeyError("duplicate ground-truth key "
                              + to_string(it->first));
  }

  const TruthEntry *find(const SampleKey &key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool has_targets() const { return has_targets_; }
  void set_has_targets(bool value) { has_targets_ = value; }

  const std::map<SampleKey, TruthEntry> &entries() const { return entries_; }

  /// Merges `other` into this truth; overlapping keys are an error.
  void merge(const GroundTruth &other) {
    for (const auto &[key, entry] : other.entries_) add(key, entry);
    has_targets_ = has_targets_ || other.has_targets_;
  }

 private:
  std::map<SampleKey, TruthEntry> entries_;
  bool has_targets_ = false;
};

struct Sample {
  std::string video_id;
  std::string image_id;
  int label = 0;
  double target = 0.0;

  SampleKey key() const { return {video_id, image_id}; }
  bool operator==(const Sample &) const = default;
};

/// n samples by m inducers, stored row-major.
///
/// `assemble` produces rows in canonical (video_id, image_id) order. The
/// constructor itself accepts any order so callers can build permuted or
/// synthetic matrices directly.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;

  ScoreMatrix(std::vector<Sample> samples,
              std::vector<std::string> inducer_names,
              std::vector<double> scores)
      : samples_(std::move(samples)), inducer_names_(std::move(inducer_names)),
        scores_(std::move(scores)) {
    if (scores_.size() != samples_.size() * inducer_names_.size())
      throw ContractError("score matrix: expected "
                          + std::to_string(samples_.size()) + "x"
                          + std::to_string(inducer_names_.size())
                          + " entries, got " + std::to_string(scores_.size()));
  }

  std::size_t rows() const { return samples_.size(); }
  std::size_t cols() const { return inducer_names_.size(); }

  const std::vector<Sample> &samples() const { return samples_; }
  const std::vector<std::string> &inducer_names() const {
    return inducer_names_;
  }
  const std::vector<double> &data() const { return scores_; }

  std::span<const double> row(std::size_t i) const {
    return {scores_.data() + i * cols(), cols()};
  }

  double operator()(std::size_t i, std::size_t j) const {
    return scores_[i * cols() + j];
  }

  std::vector<double> column(std::size_t j) const {
    std::vector<double> out(rows());
    for (std::size_t i = 0; i < rows(); ++i) out[i] = (*this)(i, j);
    return out;
  }

  bool is_canonical() const {
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (!(samples_[i - 1].key() < samples_[i].key())) return false;
    return true;
  }

  bool operator==(const ScoreMatrix &) const = default;

 private:
  std::vector<Sample> samples_;
  std::vector<std::string> inducer_names_;
  std::vector<double> scores_;
};

/// Per-inducer score range fitted on a reference split.
struct NormalizationParams {
  struct Range {
    std::string inducer;
    double min = 0.0;
    double max = 0.0;

    bool operator==(const Range &) const = default;
  };

  std::vector<Range> ranges;

  bool operator==(const NormalizationParams &) const = default;
};

// ---------------------------------------------------------------------------
// Parsing

inline constexpr std::string_view kInducerHeader = "video_id,image_id,class,score";
inline constexpr std::string_view kTruthHeader = "video_id,image_id,label";
inline constexpr std::string_view kTruthHeaderWithTarget =
    "video_id,image_id,label,target";

namespace detail {
  inline int parse_binary(std::string_view field, std::size_t line,
                          std::string_view what) {
    if (field == "0") return 0;
    if (field == "1") return 1;
    throw ParseError(line, std::string(what) + " out of {0,1}");
  }

  inline double parse_finite(std::string_view field, std::size_t line,
                             std::string_view what) {
    auto value = parse_double(field);
    if (!value)
      throw ParseError(line, "non-numeric " + std::string(what) + " '"
                                 + std::string(field) + "'");
    if (!std::isfinite(*value))
      throw ParseError(line, "non-finite " + std::string(what));
    return *value;
  }

  inline void check_id(std::string_view field, std::size_t line,
                       std::string_view what) {
    if (field.empty()) throw ParseError(line, "empty " + std::string(what));
  }
}  // namespace detail

/// Parses a `video_id,image_id,class,score` CSV. Records keep file order.
inline InducerTable parse_inducer_file(std::istream &source,
                                       std::string inducer_name) {
  InducerTable table{std::move(inducer_name), {}};
  std::set<SampleKey> seen;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(source, line)) {
    ++line_no;
    const auto text = detail::strip_cr(line);
    if (!header_seen) {
      if (text != kInducerHeader)
        throw ParseError(line_no, "expected header '"
                                      + std::string(kInducerHeader) + "'");
      header_seen = true;
      continue;
    }
    if (text.empty()) continue;
    const auto fields = detail::split_fields(text);
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 fields, got "
                                    + std::to_string(fields.size()));
    detail::check_id(fields[0], line_no, "video_id");
    detail::check_id(fields[1], line_no, "image_id");
    InducerRecord rec{std::string(fields[0]), std::string(fields[1]),
                      detail::parse_binary(fields[2], line_no, "class"),
                      detail::parse_finite(fields[3], line_no, "score")};
    if (!seen.insert(rec.key()).second)
      throw DuplicateKeyError("line " + std::to_string(line_no)
                              + ": duplicate key " + to_string(rec.key())
                              + " in inducer '" + table.inducer_name + "'");
    table.records.push_back(std::move(rec));
  }
  if (!header_seen) throw ParseError(1, "empty inducer file");
  return table;
}

/// Parses `video_id,image_id,label` or `video_id,image_id,label,target`.
inline GroundTruth parse_ground_truth(std::istream &source) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(source, line)) {
    ++line_no;
    const auto text = detail::strip_cr(line);
    if (width == 0) {
      if (text == kTruthHeader) {
        width = 3;
      } else if (text == kTruthHeaderWithTarget) {
        width = 4;
        truth.set_has_targets(true);
      } else {
        throw ParseError(line_no, "expected header '"
                                      + std::string(kTruthHeader) + "'");
      }
      continue;
    }
    if (text.empty()) continue;
    const auto fields = detail::split_fields(text);
    if (fields.size() != width)
      throw ParseError(line_no, "expected " + std::to_string(width)
                                    + " fields, got "
                                    + std::to_string(fields.size()));
    detail::check_id(fields[0], line_no, "video_id");
    detail::check_id(fields[1], line_no, "image_id");
    TruthEntry entry;
    entry.label = detail::parse_binary(fields[2], line_no, "label");
    entry.target = width == 4
                       ? detail::parse_finite(fields[3], line_no, "target")
                       : static_cast<double>(entry.label);
    SampleKey key{std::string(fields[0]), std::string(fields[1])};
    if (truth.find(key))
      throw DuplicateKeyError("line " + std::to_string(line_no)
                              + ": duplicate key " + to_string(key));
    truth.add(std::move(key), entry);
  }
  if (width == 0) throw ParseError(1, "empty ground-truth file");
  return truth;
}

namespace detail {
  inline std::ifstream open_input(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
  }

  template <class Fn>
  auto with_path_context(const std::filesystem::path &path, Fn &&fn) {
    try {
      return fn();
    } catch (const ParseError &e) {
      throw ParseError(e.line(), e.reason(), path.string());
    } catch (const DuplicateKeyError &e) {
      throw DuplicateKeyError(path.string() + ": " + e.what());
    }
  }
}  // namespace detail

/// Reads an inducer file; the inducer is named after the file stem.
inline InducerTable read_inducer_file(const std::filesystem::path &path) {
  auto in = detail::open_input(path);
  return detail::with_path_context(
      path, [&] { return parse_inducer_file(in, path.stem().string()); });
}

inline GroundTruth read_ground_truth(
    std::span<const std::filesystem::path> paths) {
  GroundTruth truth;
  for (const auto &path : paths) {
    auto in = detail::open_input(path);
    truth.merge(detail::with_path_context(
        path, [&] { return parse_ground_truth(in); }));
  }
  return truth;
}

// ---------------------------------------------------------------------------
// Alignment

/// Aligns m inducer tables on their shared keys and attaches truth labels.
/// Rows come out sorted by (video_id, image_id); column j is table j.
inline ScoreMatrix assemble(std::span<const InducerTable> tables,
                            const GroundTruth &truth) {
  if (tables.empty()) throw ContractError("assemble: need at least one table");

  std::vector<std::map<SampleKey, double>> by_key(tables.size());
  std::set<SampleKey> all_keys;
  for (std::size_t j = 0; j < tables.size(); ++j) {
    for (const auto &rec : tables[j].records) {
      if (!by_key[j].emplace(rec.key(), rec.raw_score).second)
        throw DuplicateKeyError("duplicate key " + to_string(rec.key())
                                + " in inducer '" + tables[j].inducer_name
                                + "'");
      all_keys.insert(rec.key());
    }
  }

  constexpr std::size_t kMaxListed = 10;
  std::vector<std::string> problems;
  std::size_t missing_total = 0;
  for (std::size_t j = 0; j < tables.size(); ++j) {
    for (const auto &key : all_keys) {
      if (by_key[j].count(key)) continue;
      if (problems.size() < kMaxListed)
        problems.push_back(to_string(key) + " missing from '"
                           + tables[j].inducer_name + "'");
      ++missing_total;
    }
  }
  if (missing_total)
    throw AlignmentError("inducer tables cover different keys ("
                         + std::to_string(missing_total)
                         + " gaps): " + detail::join(problems, "; "));

  std::vector<Sample> samples;
  samples.reserve(all_keys.size());
  std::vector<std::string> unlabeled;
  for (const auto &key : all_keys) {
    const auto *entry = truth.find(key);
    if (!entry) {
      if (unlabeled.size() < kMaxListed) unlabeled.push_back(to_string(key));
      continue;
    }
    samples.push_back({key.video_id, key.image_id, entry->label,
                       entry->target});
  }
  if (samples.size() != all_keys.size())
    throw MissingLabelError(
        "ground truth lacks " + std::to_string(all_keys.size() - samples.size())
        + " key(s): " + detail::join(unlabeled, "; "));

  std::vector<std::string> names;
  for (const auto &t : tables) names.push_back(t.inducer_name);

  const std::size_t m = tables.size();
  std::vector<double> scores(samples.size() * m);
  std::size_t i = 0;
  for (const auto &key : all_keys) {
    for (std::size_t j = 0; j < m; ++j) scores[i * m + j] = by_key[j].at(key);
    ++i;
  }
  return ScoreMatrix(std::move(samples), std::move(names), std::move(scores));
}

// ---------------------------------------------------------------------------
// Min-max normalization

inline NormalizationParams fit_minmax(const ScoreMatrix &matrix) {
  if (matrix.rows() == 0) throw EmptyDatasetError("fit_minmax: no rows");
  NormalizationParams params;
  for (std::size_t j = 0; j < matrix.cols(); ++j) {
    double lo = matrix(0, j);
    double hi = lo;
    for (std::size_t i = 1; i < matrix.rows(); ++i) {
      lo = std::min(lo, matrix(i, j));
      hi = std::max(hi, matrix(i, j));
    }
    params.ranges.push_back({matrix.inducer_names()[j], lo, hi});
  }
  return params;
}

/// Maps column j through (x - min_j) / (max_j - min_j) clamped to [0,1].
/// Constant columns (min_j == max_j) become 0.
inline ScoreMatrix apply_minmax(const NormalizationParams &params,
                                const ScoreMatrix &matrix) {
  if (params.ranges.size() != matrix.cols())
    throw ContractError("apply_minmax: " + std::to_string(params.ranges.size())
                        + " ranges for " + std::to_string(matrix.cols())
                        + " columns");
  for (std::size_t j = 0; j < matrix.cols(); ++j)
    if (params.ranges[j].inducer != matrix.inducer_names()[j])
      throw ContractError("apply_minmax: column " + std::to_string(j) + " is '"
                          + matrix.inducer_names()[j] + "' but params hold '"
                          + params.ranges[j].inducer + "'");

  const std::size_t m = matrix.cols();
  std::vector<double> out(matrix.data().size());
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const auto &r = params.ranges[j];
      double v = 0.0;
      if (r.max > r.min)
        v = std::clamp((matrix(i, j) - r.min) / (r.max - r.min), 0.0, 1.0);
      out[i * m + j] = v;
    }
  }
  return ScoreMatrix(matrix.samples(), matrix.inducer_names(), std::move(out));
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json to_json(const NormalizationParams &params) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  for (const auto &r : params.ranges)
    doc[r.inducer] = {{"min", r.min}, {"max", r.max}};
  return doc;
}

/// Restores params for the given column order. Every name must be present.
inline NormalizationParams normalization_from_json(
    const nlohmann::json &doc, std::span<const std::string> inducer_names) {
  NormalizationParams params;
  for (const auto &name : inducer_names) {
    if (!doc.contains(name))
      throw DataError("normalization params lack inducer '" + name + "'");
    const auto &entry = doc.at(name);
    NormalizationParams::Range r{name, entry.at("min").get<double>(),
                                 entry.at("max").get<double>()};
    if (!(r.min <= r.max))
      throw DataError("normalization params for '" + name + "' have min > max");
    params.ranges.push_back(r);
  }
  return params;
}

inline std::string format_inducer_file(const InducerTable &table) {
  std::string out(kInducerHeader);
  out += '\n';
  for (const auto &rec : table.records) {
    out += rec.video_id + ',' + rec.image_id + ','
           + std::to_string(rec.class_label) + ','
           + detail::format_double(rec.raw_score) + '\n';
  }
  return out;
}

inline std::string format_ground_truth(const GroundTruth &truth) {
  std::string out(truth.has_targets() ? kTruthHeaderWithTarget : kTruthHeader);
  out += '\n';
  for (const auto &[key, entry] : truth.entries()) {
    out += key.video_id + ',' + key.image_id + ','
           + std::to_string(entry.label);
    if (truth.has_targets()) out += ',' + detail::format_double(entry.target);
    out += '\n';
  }
  return out;
}

/// Full dump of a matrix: `video_id,image_id,label,target,<inducers...>`.
inline std::string format_matrix_csv(const ScoreMatrix &matrix) {
  std::string out = "video_id,image_id,label,target";
  for (const auto &name : matrix.inducer_names()) out += ',' + name;
  out += '\n';
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto &s = matrix.samples()[i];
    out += s.video_id + ',' + s.image_id + ',' + std::to_string(s.label) + ','
           + detail::format_double(s.target);
    for (double v : matrix.row(i)) out += ',' + detail::format_double(v);
    out += '\n';
  }
  return out;
}

inline ScoreMatrix parse_matrix_csv(std::istream &source) {
  std::string line;
  if (!std::getline(source, line)) throw ParseError(1, "empty matrix file");
  auto header = detail::split_fields(detail::strip_cr(line));
  if (header.size() < 4 || header[0] != "video_id" || header[1] != "image_id"
      || header[2] != "label" || header[3] != "target")
    throw ParseError(1, "expected header 'video_id,image_id,label,target,...'");
  std::vector<std::string> names(header.begin() + 4, header.end());
  std::vector<Sample> samples;
  std::vector<double> scores;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    const auto text = detail::strip_cr(line);
    if (text.empty()) continue;
    const auto fields = detail::split_fields(text);
    if (fields.size() != header.size())
      throw ParseError(line_no, "expected " + std::to_string(header.size())
                                    + " fields, got "
                                    + std::to_string(fields.size()));
    samples.push_back({std::string(fields[0]), std::string(fields[1]),
                       detail::parse_binary(fields[2], line_no, "label"),
                       detail::parse_finite(fields[3], line_no, "target")});
    for (std::size_t j = 4; j < fields.size(); ++j)
      scores.push_back(detail::parse_finite(fields[j], line_no, "score"));
  }
  return ScoreMatrix(std::move(samples), std::move(names), std::move(scores));
}

}  // namespace latefusion

#endif  // LATEFUSION_INGESTION_HPP_
