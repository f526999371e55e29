//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_FUSION_HPP_
#define LATEFUSION_FUSION_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefusion/error.hpp"
#include "latefusion/ingestion.hpp"

namespace latefusion {

/// m fusion weights, each in [0,1].
class WeightVector {
 public:
  WeightVector() = default;

  explicit WeightVector(std::vector<double> values)
      : values_(std::move(values)) {
    for (std::size_t j = 0; j < values_.size(); ++j) {
      if (!(values_[j] >= 0.0 && values_[j] <= 1.0))
        throw ContractError("weight " + std::to_string(j) + " = "
                            + detail::format_double(values_[j])
                            + " outside [0,1]");
    }
  }

  /// 1/m in every slot.
  static WeightVector uniform(std::size_t m) {
    if (m == 0) throw ContractError("uniform weights need m >= 1");
    return WeightVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
  }

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t j) const { return values_[j]; }
  std::span<const double> values() const { return values_; }
  const std::vector<double> &vector() const { return values_; }

  bool operator==(const WeightVector &) const = default;

 private:
  std::vector<double> values_;
};

/// One fused score per ScoreMatrix row.
struct FusedScores {
  std::vector<double> values;
};

namespace detail {
  inline void check_dims(std::size_t weights, const ScoreMatrix &matrix) {
    if (weights != matrix.cols())
      throw ContractError("dimension mismatch: " + std::to_string(weights)
                          + " weights for " + std::to_string(matrix.cols())
                          + " inducers");
  }

  inline double dot_row(std::span<const double> w, std::span<const double> row) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * row[j];
    return s;
  }

  // The kernels below take raw spans so optimizers can probe points outside
  // the WeightVector invariant (finite differences, arbitrary boxes). The
  // public functions route through the same code, keeping results bit-equal.

  inline double mse_kernel(std::span<const double> w,
                           const ScoreMatrix &matrix) {
    check_dims(w.size(), matrix);
    const std::size_t n = matrix.rows();
    if (n == 0) throw EmptyDatasetError("mse: dataset has no rows");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = dot_row(w, matrix.row(i)) - matrix.samples()[i].target;
      acc += r * r;
    }
    return acc / static_cast<double>(n);
  }

  inline void mse_gradient_kernel(std::span<const double> w,
                                  const ScoreMatrix &matrix,
                                  std::span<double> grad) {
    check_dims(w.size(), matrix);
    if (grad.size() != w.size())
      throw ContractError("gradient buffer has wrong size");
    const std::size_t n = matrix.rows();
    if (n == 0) throw EmptyDatasetError("mse_gradient: dataset has no rows");
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = matrix.row(i);
      const double r = dot_row(w, row) - matrix.samples()[i].target;
      for (std::size_t j = 0; j < grad.size(); ++j) grad[j] += r * row[j];
    }
    const double scale = 2.0 / static_cast<double>(n);
    for (auto &g : grad) g *= scale;
  }
}  // namespace detail

/// Weighted sum of inducer scores per row.
inline FusedScores fuse(const WeightVector &weights, const ScoreMatrix &matrix) {
  detail::check_dims(weights.size(), matrix);
  FusedScores out;
  out.values.resize(matrix.rows());
  for (std::size_t i = 0; i < matrix.rows(); ++i)
    out.values[i] = detail::dot_row(weights.values(), matrix.row(i));
  return out;
}

/// Mean squared error between fused scores and per-sample targets, summed
/// in row order.
inline double mse(const WeightVector &weights, const ScoreMatrix &matrix) {
  return detail::mse_kernel(weights.values(), matrix);
}

/// d(mse)/dw_j = (2/n) sum_i (fused_i - target_i) * score_ij.
inline std::vector<double> mse_gradient(const WeightVector &weights,
                                        const ScoreMatrix &matrix) {
  std::vector<double> grad(weights.size());
  detail::mse_gradient_kernel(weights.values(), matrix, grad);
  return grad;
}

// Weight files carry the inducer names so they are self-describing.

inline nlohmann::ordered_json weights_to_json(
    const WeightVector &weights, std::span<const std::string> inducer_names) {
  if (inducer_names.size() != weights.size())
    throw ContractError("weights_to_json: name count mismatch");
  nlohmann::ordered_json doc;
  doc["inducers"] = std::vector<std::string>(inducer_names.begin(),
                                             inducer_names.end());
  doc["weights"] = weights.vector();
  return doc;
}

struct NamedWeights {
  std::vector<std::string> inducers;
  WeightVector weights;
};

inline NamedWeights weights_from_json(const nlohmann::json &doc) {
  NamedWeights out;
  out.inducers = doc.at("inducers").get<std::vector<std::string>>();
  out.weights = WeightVector(doc.at("weights").get<std::vector<double>>());
  if (out.inducers.size() != out.weights.size())
    throw DataError("weight file: " + std::to_string(out.inducers.size())
                    + " names but " + std::to_string(out.weights.size())
                    + " weights");
  return out;
}

}  // namespace latefusion

#endif  // LATEFUSION_FUSION_HPP_
