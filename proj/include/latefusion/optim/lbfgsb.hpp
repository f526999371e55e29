//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_LBFGSB_HPP_
#define LATEFUSION_OPTIM_LBFGSB_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <vector>

#include "latefusion/optim/detail/evaluator.hpp"
#include "latefusion/optim/detail/line_search.hpp"

namespace latefusion::optim {

namespace detail {
  struct CorrectionPair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;  // 1 / (y . s)
  };

  /// Two-loop recursion: returns -H q for the inverse-Hessian approximation
  /// built from `pairs` with initial scaling (s.y / y.y) of the newest pair.
  inline std::vector<double> two_loop(const std::deque<CorrectionPair> &pairs,
                                      std::vector<double> q) {
    std::vector<double> alpha(pairs.size());
    for (std::size_t k = pairs.size(); k-- > 0;) {
      const auto &p = pairs[k];
      alpha[k] = p.rho * dot(p.s, q);
      for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * p.y[i];
    }
    if (!pairs.empty()) {
      const auto &last = pairs.back();
      const double gamma = 1.0 / (last.rho * dot(last.y, last.y));
      for (auto &v : q) v *= gamma;
    }
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const auto &p = pairs[k];
      const double beta = p.rho * dot(p.y, q);
      for (std::size_t i = 0; i < q.size(); ++i)
        q[i] += (alpha[k] - beta) * p.s[i];
    }
    for (auto &v : q) v = -v;
    return q;
  }
}  // namespace detail

/// Limited-memory BFGS with bounds via gradient projection.
///
/// The search direction comes from the two-loop recursion over the last
/// lbfgsb.history correction pairs, restricted to variables not held at a
/// bound. Steps follow the projected path with Armijo backtracking; a
/// non-descent direction or failed line search drops the history and retries
/// along the steepest descent. Starts at 1/m; stops when the projected
/// gradient max-norm is within `tolerance`.
template <DifferentiableObjective F>
OptimizerReport optimize_lbfgsb(const F &objective, const OptimizerConfig &cfg) {
  cfg.validate();
  detail::require_gradient(objective);
  detail::Evaluator ev(objective, cfg);
  const auto &box = ev.box();
  const std::size_t m = cfg.dimension;
  const auto &p = cfg.lbfgsb;

  auto x = detail::uniform_start(cfg);
  double f = ev.value(x);
  std::vector<double> g(m), g_new(m);
  ev.gradient(x, g);
  ev.record(0);

  std::deque<detail::CorrectionPair> pairs;
  std::size_t it = 0;
  bool converged = false;
  const char *reason = "iteration budget";
  while (true) {
    if (detail::norm_inf(detail::projected_gradient(x, g, box))
        <= cfg.tolerance) {
      converged = true;
      reason = "projected gradient below tolerance";
      break;
    }
    if (it >= cfg.max_iterations) break;
    ++it;

    const auto free = detail::free_variables(x, g, box);
    std::vector<double> q(m, 0.0), steepest(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (!free[i]) continue;
      q[i] = g[i];
      steepest[i] = -g[i];
    }

    const double steepest_alpha = std::min(1.0, 1.0 / detail::norm2(steepest));
    std::vector<double> d;
    bool quasi = !pairs.empty();
    if (quasi) {
      d = detail::two_loop(pairs, q);
      for (std::size_t i = 0; i < m; ++i)
        if (!free[i]) d[i] = 0.0;
      if (!(detail::dot(g, d) < 0)) {
        pairs.clear();
        quasi = false;
      }
    }
    if (!quasi) d = steepest;
    auto step = detail::projected_backtracking(
        ev, x, f, g, d, quasi ? 1.0 : steepest_alpha, p.armijo,
        p.max_backtracks);
    if (!step.accepted && quasi) {
      pairs.clear();
      step = detail::projected_backtracking(ev, x, f, g, steepest,
                                            steepest_alpha, p.armijo,
                                            p.max_backtracks);
    }
    if (!step.accepted) {
      ev.record(it);
      reason = "line search failed";
      break;
    }

    ev.gradient(step.x, g_new);
    detail::CorrectionPair pair{std::vector<double>(m), std::vector<double>(m),
                                0.0};
    for (std::size_t i = 0; i < m; ++i) {
      pair.s[i] = step.x[i] - x[i];
      pair.y[i] = g_new[i] - g[i];
    }
    const double sy = detail::dot(pair.s, pair.y);
    if (sy > std::numeric_limits<double>::epsilon()
                 * detail::dot(pair.y, pair.y)) {
      pair.rho = 1.0 / sy;
      pairs.push_back(std::move(pair));
      if (pairs.size() > p.history) pairs.pop_front();
    }
    x = std::move(step.x);
    f = step.f;
    g = g_new;
    ev.record(it);
  }
  return ev.finish(Method::lbfgsb, it, converged, reason);
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_LBFGSB_HPP_
