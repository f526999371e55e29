//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_OBJECTIVE_HPP_
#define LATEFUSION_OPTIM_OBJECTIVE_HPP_

#include <concepts>
#include <functional>
#include <span>
#include <utility>

#include "latefusion/error.hpp"
#include "latefusion/fusion.hpp"
#include "latefusion/ingestion.hpp"

namespace latefusion::optim {

/// A pure scalar function of an m-vector. `value` may be called from several
/// threads at once.
template <class F>
concept Objective = requires(const F &f, std::span<const double> x) {
  { f.value(x) } -> std::convertible_to<double>;
};

template <class F>
concept DifferentiableObjective =
    Objective<F>
    && requires(const F &f, std::span<const double> x, std::span<double> g) {
         f.gradient(x, g);
       };

/// Type-erased objective; the gradient is optional.
class FunctionObjective {
 public:
  using ValueFn = std::function<double(std::span<const double>)>;
  using GradientFn =
      std::function<void(std::span<const double>, std::span<double>)>;

  explicit FunctionObjective(ValueFn value, GradientFn gradient = {})
      : value_(std::move(value)), gradient_(std::move(gradient)) {}

  double value(std::span<const double> x) const { return value_(x); }

  void gradient(std::span<const double> x, std::span<double> g) const {
    if (!gradient_) throw ContractError("objective has no gradient");
    gradient_(x, g);
  }

  bool has_gradient() const { return static_cast<bool>(gradient_); }

 private:
  ValueFn value_;
  GradientFn gradient_;
};

/// The fusion MSE over a fixed matrix. The matrix must outlive the objective.
class MseObjective {
 public:
  explicit MseObjective(const ScoreMatrix &matrix) : matrix_(&matrix) {}

  double value(std::span<const double> w) const {
    return latefusion::detail::mse_kernel(w, *matrix_);
  }

  void gradient(std::span<const double> w, std::span<double> g) const {
    latefusion::detail::mse_gradient_kernel(w, *matrix_, g);
  }

  bool has_gradient() const { return true; }

  const ScoreMatrix &matrix() const { return *matrix_; }

 private:
  const ScoreMatrix *matrix_;
};

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_OBJECTIVE_HPP_
