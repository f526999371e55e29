//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace latefusion {
namespace {

std::vector<RankedItem> items_from(const std::vector<int> &relevance) {
  std::vector<RankedItem> items;
  for (std::size_t i = 0; i < relevance.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "i%03zu", i);
    items.push_back({id, 1.0 - 0.01 * static_cast<double>(i), relevance[i]});
  }
  return items;
}

double ap(const std::vector<int> &relevance, std::size_t k) {
  return average_precision_at_k(rank(items_from(relevance)), k).value;
}

// One-column matrix whose fused score (weight 1) is the given score.
struct Labelled {
  std::string video;
  std::string image;
  double score;
  int label;
};

ScoreMatrix matrix_of(std::vector<Labelled> rows) {
  std::sort(rows.begin(), rows.end(), [](const auto &a, const auto &b) {
    return std::tie(a.video, a.image) < std::tie(b.video, b.image);
  });
  std::vector<Sample> samples;
  std::vector<double> scores;
  for (const auto &r : rows) {
    samples.push_back({r.video, r.image, r.label, static_cast<double>(r.label)});
    scores.push_back(r.score);
  }
  return ScoreMatrix(std::move(samples), {"s"}, std::move(scores));
}

EvalReport evaluate(const ScoreMatrix &m, std::size_t k = 10) {
  return map_at_k(fuse(WeightVector({1.0}), m), m, k);
}

TEST(Rank, SortsByScoreDescending) {
  const auto r = rank({{"a", 0.9, 0}, {"b", 0.1, 0}, {"c", 0.5, 0}});
  ASSERT_EQ(r.items.size(), 3u);
  EXPECT_EQ(r.items[0].image_id, "a");
  EXPECT_EQ(r.items[1].image_id, "c");
  EXPECT_EQ(r.items[2].image_id, "b");
}

TEST(Rank, TiesByImageIdAscending) {
  const auto r = rank({{"b", 0.5, 1}, {"a", 0.5, 0}});
  EXPECT_EQ(r.items[0].image_id, "a");
  EXPECT_EQ(r.items[1].image_id, "b");
}

TEST(Rank, SingleItem) {
  const auto r = rank({{"x", 0.3, 1}}, "v");
  ASSERT_EQ(r.items.size(), 1u);
  EXPECT_EQ(r.items[0].image_id, "x");
  EXPECT_EQ(r.group_id, "v");
}

TEST(Rank, EmptyGroupRejected) {
  EXPECT_THROW(rank({}), ContractError);
}

TEST(AveragePrecision, HandExample) {
  EXPECT_DOUBLE_EQ(ap({1, 0, 1}, 10), 0.5 * (1.0 + 2.0 / 3.0));
}

TEST(AveragePrecision, AllRelevantIsOne) {
  for (std::size_t k = 1; k <= 12; ++k) EXPECT_EQ(ap({1, 1, 1, 1}, k), 1.0);
}

TEST(AveragePrecision, NoRelevantIsExcluded) {
  const auto res = average_precision_at_k(rank(items_from({0, 0, 0})), 10);
  EXPECT_EQ(res.value, 0.0);
  EXPECT_TRUE(res.excluded);
  EXPECT_EQ(res.num_relevant, 0u);
}

TEST(AveragePrecision, CutoffNormalizer) {
  // Five relevant, k = 2, both top items relevant: normalizer is min(5, 2).
  EXPECT_EQ(ap({1, 1, 1, 1, 1, 0}, 2), 1.0);
  // Relevant item beyond the cutoff contributes nothing.
  EXPECT_EQ(ap({0, 0, 1}, 2), 0.0);
}

TEST(AveragePrecision, RejectsZeroCutoff) {
  EXPECT_THROW(average_precision_at_k(rank(items_from({1})), 0), ContractError);
}

TEST(AveragePrecision, DeepCutoffEqualsFullAp) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int> rel(1 + rng() % 12);
    for (auto &r : rel) r = static_cast<int>(rng() % 2);
    const double full = ap(rel, rel.size());
    for (std::size_t k = rel.size(); k <= rel.size() + 5; ++k)
      EXPECT_EQ(ap(rel, k), full);
  }
}

TEST(AveragePrecision, MatchesOracleOnAllShortPatterns) {
  for (std::size_t len = 1; len <= 8; ++len) {
    for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
      std::vector<int> rel(len);
      for (std::size_t i = 0; i < len; ++i) rel[i] = (bits >> i) & 1u;
      for (std::size_t k = 1; k <= 12; ++k)
        ASSERT_EQ(ap(rel, k), synth::ap_oracle(rel, k));
    }
  }
}

TEST(MapAtK, SingleVideo) {
  const auto m = matrix_of({{"v", "a", 0.9, 1}, {"v", "b", 0.5, 0},
                            {"v", "c", 0.1, 1}});
  const auto r = evaluate(m);
  EXPECT_DOUBLE_EQ(r.map_at_k, 0.5 * (1.0 + 2.0 / 3.0));
  ASSERT_EQ(r.per_group.size(), 1u);
  EXPECT_EQ(r.per_group[0].num_relevant, 2u);
}

TEST(MapAtK, MeanOverVideos) {
  // v1 perfect (AP 1), v2 relevant item second (AP 0.5).
  const auto m = matrix_of({{"v1", "a", 0.9, 1}, {"v1", "b", 0.1, 0},
                            {"v2", "a", 0.9, 0}, {"v2", "b", 0.1, 1}});
  EXPECT_EQ(evaluate(m).map_at_k, 0.75);
}

TEST(MapAtK, GroupsWithoutRelevantItemsLeftOut) {
  const auto m = matrix_of({{"v1", "a", 0.9, 1}, {"v2", "a", 0.9, 0},
                            {"v2", "b", 0.1, 0}});
  const auto r = evaluate(m);
  EXPECT_EQ(r.map_at_k, 1.0);
  ASSERT_EQ(r.per_group.size(), 2u);
  EXPECT_EQ(r.per_group[1].video_id, "v2");
  EXPECT_EQ(r.per_group[1].num_relevant, 0u);
}

TEST(MapAtK, UndefinedWhenNothingRelevant) {
  const auto m = matrix_of({{"v1", "a", 0.9, 0}, {"v2", "a", 0.9, 0}});
  EXPECT_THROW(evaluate(m), UndefinedMetricError);
}

TEST(MapAtK, MisalignedScoresRejected) {
  const auto m = matrix_of({{"v1", "a", 0.9, 1}});
  EXPECT_THROW(map_at_k(FusedScores{{0.1, 0.2}}, m, 10), ContractError);
  EXPECT_THROW(map_at_k(FusedScores{{0.1}}, m, 0), ContractError);
}

// Random instance with at most 8 items per video; returns the matrix and
// the oracle MAP computed from each group's relevance order.
std::pair<ScoreMatrix, double> random_instance(std::mt19937_64 &rng,
                                               std::size_t k) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Labelled> rows;
  const std::size_t videos = 1 + rng() % 5;
  double sum = 0.0;
  std::size_t included = 0;
  for (std::size_t v = 0; v < videos; ++v) {
    const std::size_t count = 1 + rng() % 8;
    std::vector<std::pair<double, int>> group;
    for (std::size_t i = 0; i < count; ++i) {
      // Coarse scores force ties so the tie rule is exercised.
      const double score = std::floor(unit(rng) * 4.0) / 4.0;
      const int label = static_cast<int>(rng() % 2);
      rows.push_back({"v" + std::to_string(v), "i" + std::to_string(i), score,
                      label});
      group.push_back({score, label});
    }
    // Image ids i0..i7 sort like their indices, so a stable sort by score
    // reproduces the tie rule.
    std::stable_sort(group.begin(), group.end(),
                     [](const auto &a, const auto &b) { return a.first > b.first; });
    std::vector<int> rel;
    for (const auto &g : group) rel.push_back(g.second);
    bool any = false;
    for (int r : rel) any = any || r;
    if (!any) continue;
    sum += synth::ap_oracle(rel, k);
    ++included;
  }
  if (included == 0) return random_instance(rng, k);
  return {matrix_of(rows), sum / static_cast<double>(included)};
}

TEST(MapAtK, MatchesOracleOnRandomInstances) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t k = 1 + rng() % 12;
    const auto [m, expected] = random_instance(rng, k);
    EXPECT_EQ(evaluate(m, k).map_at_k, expected);
  }
}

TEST(MapAtK, WithinUnitInterval) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto [m, expected] = random_instance(rng, 10);
    const auto r = evaluate(m);
    EXPECT_GE(r.map_at_k, 0.0);
    EXPECT_LE(r.map_at_k, 1.0);
    double sum = 0.0;
    std::size_t included = 0;
    for (const auto &g : r.per_group) {
      if (g.num_relevant == 0) continue;
      sum += g.ap_at_k;
      ++included;
    }
    EXPECT_EQ(r.map_at_k, sum / static_cast<double>(included));
  }
}

TEST(MapAtK, InvariantUnderIncreasingTransforms) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = testing::random_matrix(rng, 60, 3, 6);
    const auto fused = fuse(WeightVector({0.2, 0.5, 0.3}), m);
    // Ties in the transformed scores would change the order, so the
    // instance uses scores on a coarse grid that the transforms keep apart.
    FusedScores coarse = fused;
    for (auto &v : coarse.values) v = std::floor(v * 1024.0) / 1024.0;
    const auto base = map_at_k(coarse, m, 10);
    FusedScores moved = coarse;
    const double a = 0.5 + static_cast<double>(rng() % 100) / 10.0;
    const double b = static_cast<double>(rng() % 100) / 10.0 - 5.0;
    for (auto &v : moved.values) v = std::exp(a * v) + b;
    EXPECT_EQ(map_at_k(moved, m, 10), base);
  }
}

TEST(MapAtK, PerfectSeparationIsOne) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Labelled> rows;
    for (std::size_t v = 0; v < 4; ++v)
      for (std::size_t i = 0; i < 15; ++i) {
        const int label = i == 0 || rng() % 3 == 0 ? 1 : 0;
        const double score = label ? 0.6 + 0.4 * unit(rng) : 0.5 * unit(rng);
        rows.push_back({"v" + std::to_string(v), "i" + std::to_string(i), score,
                        label});
      }
    for (std::size_t k = 1; k <= 12; ++k)
      EXPECT_EQ(evaluate(matrix_of(rows), k).map_at_k, 1.0);
  }
}

TEST(EvalReport, JsonAndCsv) {
  const auto m = matrix_of({{"v1", "a", 0.9, 1}, {"v1", "b", 0.1, 0},
                            {"v2", "a", 0.9, 0}, {"v2", "b", 0.1, 1}});
  const auto r = evaluate(m);
  const auto doc = to_json(r);
  EXPECT_EQ(doc["k"], 10);
  EXPECT_EQ(doc["map_at_k"], 0.75);
  EXPECT_EQ(doc["per_group"].size(), 2u);
  EXPECT_EQ(eval_csv(r), "video_id,ap_at_10,num_relevant\nv1,1,1\nv2,0.5,1\n");
}

}  // namespace
}  // namespace latefusion
