//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_TNC_HPP_
#define LATEFUSION_OPTIM_TNC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "latefusion/optim/detail/evaluator.hpp"
#include "latefusion/optim/detail/line_search.hpp"

namespace latefusion::optim {

/// Truncated Newton (Hessian-free) with bound constraints.
///
/// Variables held at a bound by the gradient are frozen for the iteration;
/// the Newton system on the rest is solved approximately by conjugate
/// gradients, stopped after min(2m, tnc.max_cg_iterations) steps, on negative
/// curvature, or once the residual drops below min(0.5, sqrt|g|) * |g|.
/// Hessian-vector products are forward differences of the gradient with step
/// sqrt(eps) * (1 + |x|) along the unit direction; the probe may leave the box
/// by that much. Steps use projected Armijo backtracking from a = 1.
template <DifferentiableObjective F>
OptimizerReport optimize_tnc(const F &objective, const OptimizerConfig &cfg) {
  cfg.validate();
  detail::require_gradient(objective);
  detail::Evaluator ev(objective, cfg);
  const auto &box = ev.box();
  const std::size_t m = cfg.dimension;
  const auto &p = cfg.tnc;
  const std::size_t cg_limit =
      std::max<std::size_t>(1, std::min(2 * m, p.max_cg_iterations));
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());

  auto x = detail::uniform_start(cfg);
  double f = ev.value(x);
  std::vector<double> g(m), g_probe(m), probe(m);
  ev.gradient(x, g);
  ev.record(0);

  std::vector<bool> free(m);
  auto hessian_times = [&](const std::vector<double> &v,
                           std::vector<double> &out) {
    const double vnorm = detail::norm2(v);
    const double h = sqrt_eps * (1.0 + detail::norm2(x)) / vnorm;
    for (std::size_t i = 0; i < m; ++i) probe[i] = x[i] + h * v[i];
    ev.gradient(probe, g_probe);
    for (std::size_t i = 0; i < m; ++i)
      out[i] = free[i] ? (g_probe[i] - g[i]) / h : 0.0;
  };

  std::size_t it = 0;
  bool converged = false;
  const char *reason = "iteration budget";
  std::vector<double> d(m), r(m), dir(m), Hd(m), steepest(m);
  while (true) {
    if (detail::norm_inf(detail::projected_gradient(x, g, box))
        <= cfg.tolerance) {
      converged = true;
      reason = "projected gradient below tolerance";
      break;
    }
    if (it >= cfg.max_iterations) break;
    ++it;

    free = detail::free_variables(x, g, box);
    for (std::size_t i = 0; i < m; ++i) {
      steepest[i] = free[i] ? -g[i] : 0.0;
      r[i] = steepest[i];
      d[i] = 0.0;
    }
    dir = r;
    const double gnorm = detail::norm2(steepest);
    const double residual_target = std::min(0.5, std::sqrt(gnorm)) * gnorm;
    double rr = detail::dot(r, r);
    for (std::size_t k = 0; k < cg_limit; ++k) {
      hessian_times(dir, Hd);
      const double curvature = detail::dot(dir, Hd);
      if (!(curvature > 0)) {
        if (k == 0) d = steepest;
        break;
      }
      const double a = rr / curvature;
      for (std::size_t i = 0; i < m; ++i) {
        d[i] += a * dir[i];
        r[i] -= a * Hd[i];
      }
      const double rr_next = detail::dot(r, r);
      if (std::sqrt(rr_next) <= residual_target) break;
      const double beta = rr_next / rr;
      for (std::size_t i = 0; i < m; ++i) dir[i] = r[i] + beta * dir[i];
      rr = rr_next;
    }
    if (!(detail::dot(g, d) < 0)) d = steepest;

    auto step = detail::projected_backtracking(ev, x, f, g, d, 1.0, p.armijo,
                                               p.max_backtracks);
    if (!step.accepted && d != steepest) {
      step = detail::projected_backtracking(
          ev, x, f, g, steepest, std::min(1.0, 1.0 / gnorm), p.armijo,
          p.max_backtracks);
    }
    if (!step.accepted) {
      ev.record(it);
      reason = "line search failed";
      break;
    }
    x = std::move(step.x);
    f = step.f;
    ev.gradient(x, g);
    ev.record(it);
  }
  return ev.finish(Method::tnc, it, converged, reason);
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_TNC_HPP_
