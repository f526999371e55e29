//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_EVALUATION_HPP_
#define LATEFUSION_EVALUATION_HPP_

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefusion/detail/text.hpp"
#include "latefusion/error.hpp"
#include "latefusion/fusion.hpp"
#include "latefusion/ingestion.hpp"

namespace latefusion {

struct RankedItem {
  std::string image_id;
  double score = 0.0;
  int relevance = 0;

  bool operator==(const RankedItem &) const = default;
};

/// Items of one group sorted by score descending, ties by image_id
/// ascending.
struct RankedList {
  std::string group_id;
  std::vector<RankedItem> items;
};

struct AveragePrecision {
  double value = 0.0;
  std::size_t num_relevant = 0;  // relevant items in the whole group
  bool excluded = false;         // no relevant items; left out of the mean
};

struct GroupResult {
  std::string video_id;
  double ap_at_k = 0.0;
  std::size_t num_relevant = 0;

  bool operator==(const GroupResult &) const = default;
};

/// MAP@k plus per-video AP. Groups without relevant items are listed with
/// num_relevant = 0 and do not enter the mean.
struct EvalReport {
  double map_at_k = 0.0;
  std::size_t k = 10;
  std::vector<GroupResult> per_group;

  bool operator==(const EvalReport &) const = default;
};

inline RankedList rank(std::vector<RankedItem> group,
                       std::string group_id = {}) {
  if (group.empty()) throw ContractError("rank: empty group");
  std::sort(group.begin(), group.end(),
            [](const RankedItem &a, const RankedItem &b) {
              if (a.score != b.score) return a.score > b.score;
              return a.image_id < b.image_id;
            });
  return {std::move(group_id), std::move(group)};
}

/// AP@k = (1 / min(R, k)) * sum over ranks r <= k of precision@r * rel(r),
/// with R the number of relevant items in the full group.
inline AveragePrecision average_precision_at_k(const RankedList &ranked,
                                               std::size_t k) {
  if (k < 1) throw ContractError("average_precision_at_k: k must be >= 1");
  AveragePrecision out;
  for (const auto &item : ranked.items)
    if (item.relevance) ++out.num_relevant;
  if (out.num_relevant == 0) {
    out.excluded = true;
    return out;
  }
  const std::size_t depth = std::min(k, ranked.items.size());
  double hits = 0.0;
  double sum = 0.0;
  for (std::size_t r = 0; r < depth; ++r) {
    if (!ranked.items[r].relevance) continue;
    hits += 1.0;
    sum += hits / static_cast<double>(r + 1);
  }
  out.value = sum / static_cast<double>(std::min(out.num_relevant, k));
  return out;
}

/// Groups rows by video, ranks each group by fused score and averages AP@k
/// over groups that contain at least one relevant item.
inline EvalReport map_at_k(const FusedScores &fused, const ScoreMatrix &matrix,
                           std::size_t k) {
  if (k < 1) throw ContractError("map_at_k: k must be >= 1");
  if (fused.values.size() != matrix.rows())
    throw ContractError("map_at_k: " + std::to_string(fused.values.size())
                        + " fused scores for " + std::to_string(matrix.rows())
                        + " rows");
  std::map<std::string, std::vector<RankedItem>> groups;
  for (std::size_t i = 0; i < matrix.rows(); ++i) {
    const auto &s = matrix.samples()[i];
    groups[s.video_id].push_back({s.image_id, fused.values[i], s.label});
  }

  EvalReport report;
  report.k = k;
  double sum = 0.0;
  std::size_t included = 0;
  for (auto &[video, items] : groups) {
    const auto ap = average_precision_at_k(rank(std::move(items), video), k);
    report.per_group.push_back({video, ap.value, ap.num_relevant});
    if (ap.excluded) continue;
    sum += ap.value;
    ++included;
  }
  if (included == 0)
    throw UndefinedMetricError("MAP@" + std::to_string(k)
                               + " undefined: no group has a relevant item");
  report.map_at_k = sum / static_cast<double>(included);
  return report;
}

inline nlohmann::ordered_json to_json(const EvalReport &report) {
  nlohmann::ordered_json doc;
  doc["k"] = report.k;
  doc["map_at_k"] = report.map_at_k;
  auto groups = nlohmann::ordered_json::array();
  for (const auto &g : report.per_group)
    groups.push_back({{"video_id", g.video_id},
                      {"ap_at_k", g.ap_at_k},
                      {"num_relevant", g.num_relevant}});
  doc["per_group"] = std::move(groups);
  return doc;
}

inline std::string eval_csv(const EvalReport &report) {
  std::string out =
      "video_id,ap_at_" + std::to_string(report.k) + ",num_relevant\n";
  for (const auto &g : report.per_group)
    out += g.video_id + ',' + detail::format_double(g.ap_at_k) + ','
           + std::to_string(g.num_relevant) + '\n';
  return out;
}

}  // namespace latefusion

#endif  // LATEFUSION_EVALUATION_HPP_
