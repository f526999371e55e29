//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_SYNTH_HPP_
#define LATEFUSION_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefusion/error.hpp"
#include "latefusion/fusion.hpp"
#include "latefusion/ingestion.hpp"

namespace latefusion::synth {

enum class LabelRule {
  // label = 1 iff fuse(w*, row) + noise >= split median; target = label
  threshold_on_planted_fusion,
  // balanced labels in random order, unrelated to the scores
  random_balanced,
  // target = fuse(w*, row) + noise; label thresholded at the median target
  planted_regression,
};

inline std::string_view rule_name(LabelRule rule) {
  switch (rule) {
    case LabelRule::threshold_on_planted_fusion: return "threshold";
    case LabelRule::random_balanced: return "random_balanced";
    case LabelRule::planted_regression: return "planted_regression";
  }
  return "?";
}

inline LabelRule parse_rule(std::string_view name) {
  for (auto r : {LabelRule::threshold_on_planted_fusion,
                 LabelRule::random_balanced, LabelRule::planted_regression})
    if (rule_name(r) == name) return r;
  throw UsageError("unknown label rule '" + std::string(name)
                   + "' (expected threshold, random_balanced or "
                     "planted_regression)");
}

struct SynthSpec {
  std::size_t n_samples = 100;
  std::size_t n_test_samples = 0;  // 0: no test split
  std::size_t m_inducers = 5;
  std::size_t n_videos = 10;
  std::size_t n_test_videos = 0;  // 0: proportional to the dev split
  std::optional<std::vector<double>> planted_weights;
  double noise_sigma = 0.0;
  LabelRule label_rule = LabelRule::threshold_on_planted_fusion;
  std::uint64_t seed = 0;
  // Inducers with index % stride == stride - 1 draw raw scores from
  // [-2, 5] instead of [0, 1]. 0 disables.
  std::size_t out_of_range_stride = 7;

  std::size_t test_videos() const {
    if (n_test_samples == 0) return 0;
    if (n_test_videos) return n_test_videos;
    return std::clamp<std::size_t>(n_videos * n_test_samples / n_samples, 1,
                                   n_test_samples);
  }

  void validate() const {
    if (m_inducers < 1) throw ContractError("synth: m_inducers must be >= 1");
    if (n_videos < 1 || n_samples < n_videos)
      throw ContractError("synth: need n_samples >= n_videos >= 1");
    if (n_test_samples && test_videos() > n_test_samples)
      throw ContractError("synth: more test videos than test samples");
    if (!(noise_sigma >= 0)) throw ContractError("synth: noise_sigma < 0");
    if (planted_weights) {
      if (planted_weights->size() != m_inducers)
        throw ContractError("synth: planted weights need m entries");
      WeightVector check(*planted_weights);
    }
  }
};

struct SynthSplit {
  std::vector<InducerTable> inducers;
  GroundTruth truth;
};

struct SynthData {
  SynthSplit dev;
  std::optional<SynthSplit> test;
  std::vector<double> planted_weights;
};

inline std::string inducer_name(std::size_t j) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "inducer_%02zu", j);
  return buf;
}

namespace detail {
  inline std::string padded(const char *prefix, std::size_t i) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
    return buf;
  }

  struct RawSplit {
    std::vector<Sample> samples;  // labels filled in later
    std::vector<double> scores;   // row-major n x m
  };

  inline RawSplit draw_scores(std::mt19937_64 &rng, const SynthSpec &spec,
                              std::size_t n, std::size_t videos,
                              const char *video_prefix,
                              std::size_t image_offset) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t m = spec.m_inducers;
    RawSplit split;
    split.scores.resize(n * m);
    for (std::size_t i = 0; i < n; ++i) {
      split.samples.push_back({padded(video_prefix, i * videos / n),
                               padded("i", image_offset + i), 0, 0.0});
      for (std::size_t j = 0; j < m; ++j) {
        const bool wide = spec.out_of_range_stride
                          && j % spec.out_of_range_stride
                                 == spec.out_of_range_stride - 1;
        const double u = unit(rng);
        split.scores[i * m + j] = wide ? -2.0 + 7.0 * u : u;
      }
    }
    return split;
  }

  // Value at sorted index n/2: exactly ceil(n/2) entries are >= it when the
  // values are distinct.
  inline double upper_median(std::vector<double> values) {
    auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
    std::nth_element(values.begin(), mid, values.end());
    return *mid;
  }

  inline SynthSplit finish_split(std::mt19937_64 &rng, const SynthSpec &spec,
                                 RawSplit raw,
                                 const NormalizationParams &params,
                                 const WeightVector &planted) {
    const std::size_t m = spec.m_inducers;
    const std::size_t n = raw.samples.size();
    std::vector<std::string> names;
    for (std::size_t j = 0; j < m; ++j) names.push_back(inducer_name(j));
    const ScoreMatrix raw_matrix(raw.samples, names, raw.scores);
    const ScoreMatrix normalized = apply_minmax(params, raw_matrix);
    const FusedScores fused = fuse(planted, normalized);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> signal(fused.values);
    if (spec.noise_sigma > 0)
      for (auto &v : signal) v += spec.noise_sigma * gauss(rng);

    std::vector<int> labels(n);
    std::vector<double> targets(n);
    if (spec.label_rule == LabelRule::random_balanced) {
      for (std::size_t i = 0; i < n; ++i) labels[i] = i < n / 2 ? 1 : 0;
      std::shuffle(labels.begin(), labels.end(), rng);
      for (std::size_t i = 0; i < n; ++i) targets[i] = labels[i];
    } else {
      const double median = upper_median(signal);
      for (std::size_t i = 0; i < n; ++i) {
        labels[i] = signal[i] >= median ? 1 : 0;
        targets[i] = spec.label_rule == LabelRule::planted_regression
                         ? signal[i]
                         : static_cast<double>(labels[i]);
      }
    }

    SynthSplit out;
    out.truth.set_has_targets(spec.label_rule == LabelRule::planted_regression);
    for (std::size_t j = 0; j < m; ++j) {
      InducerTable table{names[j], {}};
      for (std::size_t i = 0; i < n; ++i) {
        const auto &s = raw.samples[i];
        table.records.push_back({s.video_id, s.image_id,
                                 normalized(i, j) >= 0.5 ? 1 : 0,
                                 raw.scores[i * m + j]});
      }
      out.inducers.push_back(std::move(table));
    }
    for (std::size_t i = 0; i < n; ++i)
      out.truth.add(raw.samples[i].key(), {labels[i], targets[i]});
    return out;
  }
}  // namespace detail

/// Draws a synthetic dataset in the ingestion formats. Planted fusion is
/// computed on scores normalized with the dev split's min-max ranges, so a
/// planted_regression dataset with zero noise has MSE exactly 0 at w* after
/// the usual ingest-and-normalize pipeline. Deterministic in the seed.
inline SynthData generate(const SynthSpec &spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SynthData data;
  if (spec.planted_weights) {
    data.planted_weights = *spec.planted_weights;
  } else {
    for (std::size_t j = 0; j < spec.m_inducers; ++j)
      data.planted_weights.push_back(unit(rng));
  }
  const WeightVector planted(data.planted_weights);

  auto dev_raw = detail::draw_scores(rng, spec, spec.n_samples, spec.n_videos,
                                     "v", 0);
  std::optional<detail::RawSplit> test_raw;
  if (spec.n_test_samples)
    test_raw = detail::draw_scores(rng, spec, spec.n_test_samples,
                                   spec.test_videos(), "t", spec.n_samples);

  std::vector<std::string> names;
  for (std::size_t j = 0; j < spec.m_inducers; ++j)
    names.push_back(inducer_name(j));
  const auto params =
      fit_minmax(ScoreMatrix(dev_raw.samples, names, dev_raw.scores));

  data.dev = detail::finish_split(rng, spec, std::move(dev_raw), params,
                                  planted);
  if (test_raw)
    data.test = detail::finish_split(rng, spec, std::move(*test_raw), params,
                                     planted);
  return data;
}

/// Normalized dev matrix of a generated dataset.
inline ScoreMatrix dev_matrix(const SynthData &data) {
  const auto raw = assemble(data.dev.inducers, data.dev.truth);
  return apply_minmax(fit_minmax(raw), raw);
}

inline nlohmann::ordered_json to_json(const SynthSpec &spec,
                                      const std::vector<double> &planted) {
  nlohmann::ordered_json doc;
  doc["n_samples"] = spec.n_samples;
  doc["n_test_samples"] = spec.n_test_samples;
  doc["m_inducers"] = spec.m_inducers;
  doc["n_videos"] = spec.n_videos;
  doc["n_test_videos"] = spec.test_videos();
  doc["planted_weights"] = planted;
  doc["noise_sigma"] = spec.noise_sigma;
  doc["label_rule"] = std::string(rule_name(spec.label_rule));
  doc["seed"] = spec.seed;
  doc["out_of_range_stride"] = spec.out_of_range_stride;
  return doc;
}

/// Relative path and content of every file of a generated dataset:
/// dev/<inducer>.csv, test/<inducer>.csv, truth_dev.csv, truth_test.csv and
/// the synth_spec.json sidecar.
inline std::vector<std::pair<std::string, std::string>> dataset_files(
    const SynthData &data, const SynthSpec &spec) {
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto &t : data.dev.inducers)
    files.emplace_back("dev/" + t.inducer_name + ".csv",
                       format_inducer_file(t));
  files.emplace_back("truth_dev.csv", format_ground_truth(data.dev.truth));
  if (data.test) {
    for (const auto &t : data.test->inducers)
      files.emplace_back("test/" + t.inducer_name + ".csv",
                         format_inducer_file(t));
    files.emplace_back("truth_test.csv", format_ground_truth(data.test->truth));
  }
  files.emplace_back("synth_spec.json",
                     to_json(spec, data.planted_weights).dump(2) + "\n");
  return files;
}

// ---------------------------------------------------------------------------
// Oracles

struct GridResult {
  std::vector<double> weights;
  double objective = 0.0;
  std::size_t evaluations = 0;
};

/// Exhaustive MSE minimization over the lattice {0, step, ..., 1}^m.
/// Lattice points are visited in lexicographic order and only a strictly
/// smaller objective replaces the incumbent.
inline GridResult grid_oracle(const ScoreMatrix &matrix, double step) {
  const std::size_t m = matrix.cols();
  if (m > 4)
    throw OracleRefusal("grid_oracle: m = " + std::to_string(m)
                        + " exceeds the exhaustive limit of 4");
  if (m == 0) throw OracleRefusal("grid_oracle: no inducers");
  if (!(step > 0 && step <= 1))
    throw OracleRefusal("grid_oracle: step must be in (0, 1]");
  const auto divisions = static_cast<std::size_t>(std::llround(1.0 / step));
  if (std::abs(static_cast<double>(divisions) * step - 1.0) > 1e-9)
    throw OracleRefusal("grid_oracle: step does not divide 1 evenly");

  GridResult best;
  best.objective = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> w(m);
  while (true) {
    for (std::size_t j = 0; j < m; ++j)
      w[j] = static_cast<double>(idx[j]) / static_cast<double>(divisions);
    const double f = mse(WeightVector(w), matrix);
    ++best.evaluations;
    if (f < best.objective) {
      best.objective = f;
      best.weights = w;
    }
    std::size_t j = m;
    while (j > 0 && idx[j - 1] == divisions) idx[--j] = 0;
    if (j == 0) break;
    ++idx[j - 1];
  }
  return best;
}

/// AP@k by the literal definition: for each relevant rank r <= k, count the
/// relevant items in the top r from scratch, divide by r, sum, then divide
/// by min(R, k). Returns 0 when nothing is relevant.
inline double ap_oracle(const std::vector<int> &relevances, std::size_t k) {
  std::size_t total_relevant = 0;
  for (std::size_t i = 0; i < relevances.size(); ++i)
    if (relevances[i] == 1) total_relevant = total_relevant + 1;
  if (total_relevant == 0) return 0.0;

  std::size_t depth = k;
  if (relevances.size() < depth) depth = relevances.size();

  double sum = 0.0;
  for (std::size_t r = 1; r <= depth; ++r) {
    if (relevances[r - 1] != 1) continue;
    std::size_t hits = 0;
    for (std::size_t q = 1; q <= r; ++q)
      if (relevances[q - 1] == 1) hits = hits + 1;
    sum = sum + static_cast<double>(hits) / static_cast<double>(r);
  }
  std::size_t normalizer = total_relevant;
  if (k < normalizer) normalizer = k;
  return sum / static_cast<double>(normalizer);
}

}  // namespace latefusion::synth

#endif  // LATEFUSION_SYNTH_HPP_
