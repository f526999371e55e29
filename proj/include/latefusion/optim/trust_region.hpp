//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_TRUST_REGION_HPP_
#define LATEFUSION_OPTIM_TRUST_REGION_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "latefusion/optim/detail/evaluator.hpp"

namespace latefusion::optim {

namespace detail {
  /// Dogleg minimizer of g.p + p.B.p/2 subject to |p| <= radius.
  inline Eigen::VectorXd dogleg_step(const Eigen::MatrixXd &B,
                                     const Eigen::VectorXd &g, double radius) {
    const double gnorm = g.norm();
    Eigen::LLT<Eigen::MatrixXd> llt(B);
    const bool pd = llt.info() == Eigen::Success;
    Eigen::VectorXd newton;
    if (pd) {
      newton = -llt.solve(g);
      if (newton.norm() <= radius) return newton;
    }
    const double gBg = g.dot(B * g);
    if (!(gBg > 0)) return -(radius / gnorm) * g;
    const Eigen::VectorXd cauchy = -(g.squaredNorm() / gBg) * g;
    const double cnorm = cauchy.norm();
    if (cnorm >= radius) return -(radius / gnorm) * g;
    if (!pd) return cauchy;
    const Eigen::VectorXd diff = newton - cauchy;
    const double a = diff.squaredNorm();
    const double b = 2.0 * cauchy.dot(diff);
    const double c = cauchy.squaredNorm() - radius * radius;
    const double tau = (-b + std::sqrt(std::max(0.0, b * b - 4.0 * a * c)))
                       / (2.0 * a);
    return cauchy + tau * diff;
  }
}  // namespace detail

/// Box-constrained trust-region method on a BFGS quadratic model.
///
/// Each iteration freezes variables held at a bound by the gradient, takes a
/// dogleg step on the free variables within the current radius, projects it
/// onto the box and compares actual with predicted reduction. The radius
/// shrinks below a ratio of 1/4 and grows above 3/4 when the step reached the
/// boundary. Starts at 1/m; stops when the projected gradient max-norm is
/// within `tolerance`.
template <DifferentiableObjective F>
OptimizerReport optimize_trust_region(const F &objective,
                                      const OptimizerConfig &cfg) {
  cfg.validate();
  detail::require_gradient(objective);
  detail::Evaluator ev(objective, cfg);
  const auto &box = ev.box();
  const std::size_t m = cfg.dimension;

  auto x = detail::uniform_start(cfg);
  double f = ev.value(x);
  std::vector<double> g(m), g_trial(m);
  ev.gradient(x, g);
  ev.record(0);

  Eigen::MatrixXd B = Eigen::MatrixXd::Identity(m, m);
  bool scaled = false;
  double radius = cfg.trust_region.initial_radius;
  const double max_radius =
      std::max(radius, box.width() * std::sqrt(static_cast<double>(m)));

  std::size_t it = 0;
  bool converged = false;
  const char *reason = "iteration budget";
  std::vector<double> trial(m), s(m);
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
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m; ++i)
      if (free[i]) idx.push_back(i);
    const auto nf = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd Bf(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf[a] = g[idx[a]];
      for (Eigen::Index b = 0; b < nf; ++b) Bf(a, b) = B(idx[a], idx[b]);
    }
    const Eigen::VectorXd p = detail::dogleg_step(Bf, gf, radius);

    trial = x;
    for (Eigen::Index a = 0; a < nf; ++a) trial[idx[a]] += p[a];
    box.project(trial);
    for (std::size_t i = 0; i < m; ++i) s[i] = trial[i] - x[i];
    const double snorm = detail::norm2(s);
    if (snorm == 0.0) {
      reason = "no feasible step";
      break;
    }

    const Eigen::Map<const Eigen::VectorXd> sv(s.data(),
                                               static_cast<Eigen::Index>(m));
    const double predicted = -(detail::dot(g, s) + 0.5 * sv.dot(B * sv));
    if (!(predicted > 0)) {
      radius = 0.25 * snorm;
      ev.record(it);
      if (radius < 1e-15) {
        reason = "trust radius collapsed";
        break;
      }
      continue;
    }

    const double f_trial = ev.value(trial);
    const double rho = (f - f_trial) / predicted;
    if (rho < 0.25) {
      radius = 0.25 * snorm;
    } else if (rho > 0.75 && p.norm() >= 0.99 * radius) {
      radius = std::min(2.0 * radius, max_radius);
    }

    if (rho > cfg.trust_region.eta) {
      ev.gradient(trial, g_trial);
      Eigen::VectorXd y(static_cast<Eigen::Index>(m));
      for (std::size_t i = 0; i < m; ++i) y[i] = g_trial[i] - g[i];
      const double sy = sv.dot(y);
      if (sy > 1e-12 * snorm * y.norm()) {
        if (!scaled) {
          B = (y.squaredNorm() / sy) * Eigen::MatrixXd::Identity(m, m);
          scaled = true;
        }
        const Eigen::VectorXd Bs = B * sv;
        B += (y * y.transpose()) / sy - (Bs * Bs.transpose()) / sv.dot(Bs);
      }
      x = trial;
      f = f_trial;
      g = g_trial;
    }
    ev.record(it);
    if (radius < 1e-15) {
      reason = "trust radius collapsed";
      break;
    }
  }
  return ev.finish(Method::trust_region, it, converged, reason);
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_TRUST_REGION_HPP_
