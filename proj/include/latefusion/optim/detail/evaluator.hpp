//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_DETAIL_EVALUATOR_HPP_
#define LATEFUSION_OPTIM_DETAIL_EVALUATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "latefusion/detail/text.hpp"
#include "latefusion/error.hpp"
#include "latefusion/optim/config.hpp"
#include "latefusion/optim/objective.hpp"
#include "latefusion/optim/report.hpp"

namespace latefusion::optim::detail {

struct Box {
  double lo = 0.0;
  double hi = 1.0;

  double width() const { return hi - lo; }
  double clamp(double v) const { return std::clamp(v, lo, hi); }

  void project(std::span<double> x) const {
    for (auto &v : x) v = clamp(v);
  }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Components of P(x - g) - x, the projected-gradient step.
inline std::vector<double> projected_gradient(std::span<const double> x,
                                              std::span<const double> g,
                                              const Box &box) {
  std::vector<double> pg(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    pg[i] = box.clamp(x[i] - g[i]) - x[i];
  return pg;
}

/// A variable is held fixed when it sits on a bound and the negative
/// gradient points out of the box.
inline std::vector<bool> free_variables(std::span<const double> x,
                                        std::span<const double> g,
                                        const Box &box) {
  std::vector<bool> free(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const bool at_lo = x[i] <= box.lo && g[i] > 0;
    const bool at_hi = x[i] >= box.hi && g[i] < 0;
    free[i] = !(at_lo || at_hi);
  }
  return free;
}

inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Wraps an objective for one optimizer run: projects every probe into the
/// box, counts evaluations, rejects non-finite values and tracks the
/// incumbent and trace.
template <Objective F>
class Evaluator {
 public:
  Evaluator(const F &objective, const OptimizerConfig &cfg)
      : objective_(objective), cfg_(cfg),
        box_{cfg.lower_bound, cfg.upper_bound},
        threads_(resolve_threads(cfg.threads)) {}

  const Box &box() const { return box_; }
  std::size_t dimension() const { return cfg_.dimension; }

  /// Projects `x` into the box in place and evaluates it.
  double value(std::span<double> x) {
    box_.project(x);
    const double f = objective_.value(x);
    commit(x, f);
    return f;
  }

  /// Evaluates `count` points stored row-major in `points`, possibly in
  /// parallel. Counting, validation and incumbent updates happen afterwards
  /// in index order, so results do not depend on the thread count.
  void values(std::span<double> points, std::span<double> out) {
    const std::size_t m = dimension();
    const std::size_t count = out.size();
    box_.project(points);
    auto work = [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k)
        out[k] = objective_.value(points.subspan(k * m, m));
    };
    const std::size_t workers = std::min(threads_, count);
    if (workers <= 1) {
      work(0, count);
    } else {
      std::vector<std::exception_ptr> errors(workers);
      {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t t = 0; t < workers; ++t) {
          const std::size_t begin = count * t / workers;
          const std::size_t end = count * (t + 1) / workers;
          pool.emplace_back([&, t, begin, end] {
            try {
              work(begin, end);
            } catch (...) {
              errors[t] = std::current_exception();
            }
          });
        }
      }
      for (auto &e : errors)
        if (e) std::rethrow_exception(e);
    }
    for (std::size_t k = 0; k < count; ++k)
      commit(points.subspan(k * m, m), out[k]);
  }

  void gradient(std::span<const double> x, std::span<double> g)
    requires DifferentiableObjective<F>
  {
    objective_.gradient(x, g);
    ++gradient_evaluations_;
    for (double v : g) {
      if (!std::isfinite(v))
        throw OptimizationAbort(
            "non-finite gradient at "
            + latefusion::detail::format_point({x.begin(), x.end()}));
    }
  }

  double best() const { return best_f_; }
  const std::vector<double> &best_point() const { return best_x_; }

  void record(std::size_t iteration) { trace_.push_back({iteration, best_f_}); }

  OptimizerReport finish(Method method, std::size_t iterations, bool converged,
                         std::string reason) {
    OptimizerReport r;
    r.method = method;
    r.seed = cfg_.seed;
    r.config = cfg_;
    r.best_weights = best_x_;
    r.best_objective = best_f_;
    r.function_evaluations = function_evaluations_;
    r.gradient_evaluations = gradient_evaluations_;
    r.iterations = iterations;
    r.converged = converged;
    r.stop_reason = std::move(reason);
    r.trace = std::move(trace_);
    return r;
  }

 private:
  void commit(std::span<const double> x, double f) {
    ++function_evaluations_;
    if (!std::isfinite(f))
      throw OptimizationAbort(
          "objective returned " + latefusion::detail::format_double(f) + " at "
          + latefusion::detail::format_point({x.begin(), x.end()}));
    if (best_x_.empty() || f < best_f_) {
      best_f_ = f;
      best_x_.assign(x.begin(), x.end());
    }
  }

  const F &objective_;
  const OptimizerConfig &cfg_;
  Box box_;
  std::size_t threads_;
  std::size_t function_evaluations_ = 0;
  std::size_t gradient_evaluations_ = 0;
  double best_f_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_x_;
  std::vector<TracePoint> trace_;
};

/// Uniform point 1/m, projected into the box.
inline std::vector<double> uniform_start(const OptimizerConfig &cfg) {
  std::vector<double> x(cfg.dimension,
                        1.0 / static_cast<double>(cfg.dimension));
  Box{cfg.lower_bound, cfg.upper_bound}.project(x);
  return x;
}

template <class F>
void require_gradient(const F &objective) {
  if constexpr (requires { objective.has_gradient(); }) {
    if (!objective.has_gradient())
      throw ContractError("this method needs an objective with a gradient");
  }
}

}  // namespace latefusion::optim::detail

#endif  // LATEFUSION_OPTIM_DETAIL_EVALUATOR_HPP_
