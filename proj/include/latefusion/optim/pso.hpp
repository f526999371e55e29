//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_PSO_HPP_
#define LATEFUSION_OPTIM_PSO_HPP_

#include <algorithm>
#include <cstddef>
#include <random>
#include <vector>

#include "latefusion/optim/detail/evaluator.hpp"

namespace latefusion::optim {

/// Global-best particle swarm.
///
/// Particle 0 starts at the uniform point 1/m so the swarm never ends worse
/// than the baseline; the rest start uniformly in the box. Each iteration
/// evaluates every particle, updates personal and global bests in particle
/// order, then moves the swarm:
///
///   v <- inertia * v + cognitive * r1 * (pbest - x) + social * r2 * (gbest - x)
///   x <- clamp(x + v)
///
/// with velocities clamped to +-(hi - lo). A coordinate that leaves the box
/// is clamped back and its velocity set to zero. All random draws happen on
/// the calling thread before a batch is evaluated.
template <Objective F>
OptimizerReport optimize_pso(const F &objective, const OptimizerConfig &cfg) {
  cfg.validate();
  detail::Evaluator ev(objective, cfg);
  const auto &box = ev.box();
  const std::size_t m = cfg.dimension;
  const std::size_t swarm = cfg.pso.swarm_size;
  const double vmax = box.width();

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> pos(swarm * m), vel(swarm * m);
  const auto start = detail::uniform_start(cfg);
  for (std::size_t s = 0; s < swarm; ++s)
    for (std::size_t j = 0; j < m; ++j)
      pos[s * m + j] = s == 0 ? start[j] : box.lo + box.width() * unit(rng);
  for (auto &v : vel) v = -vmax + 2.0 * vmax * unit(rng);

  std::vector<double> fit(swarm);
  ev.values(pos, fit);

  std::vector<double> pbest = pos;
  std::vector<double> pbest_f = fit;
  std::size_t gbest = 0;
  for (std::size_t s = 1; s < swarm; ++s)
    if (fit[s] < pbest_f[gbest]) gbest = s;
  ev.record(0);

  double reference = pbest_f[gbest];
  std::size_t stall = 0;
  std::size_t it = 0;
  bool converged = false;
  while (it < cfg.max_iterations) {
    ++it;
    const double *g = &pbest[gbest * m];
    for (std::size_t s = 0; s < swarm; ++s) {
      for (std::size_t j = 0; j < m; ++j) {
        const std::size_t k = s * m + j;
        const double r1 = unit(rng);
        const double r2 = unit(rng);
        double v = cfg.pso.inertia * vel[k]
                   + cfg.pso.cognitive * r1 * (pbest[k] - pos[k])
                   + cfg.pso.social * r2 * (g[j] - pos[k]);
        vel[k] = std::clamp(v, -vmax, vmax);
        pos[k] += vel[k];
        if (pos[k] < box.lo || pos[k] > box.hi) vel[k] = 0.0;
      }
    }
    ev.values(pos, fit);  // clamps positions into the box

    for (std::size_t s = 0; s < swarm; ++s) {
      if (fit[s] < pbest_f[s]) {
        pbest_f[s] = fit[s];
        std::copy_n(&pos[s * m], m, &pbest[s * m]);
        if (fit[s] < pbest_f[gbest]) gbest = s;
      }
    }
    ev.record(it);

    if (reference - pbest_f[gbest] > cfg.tolerance) {
      reference = pbest_f[gbest];
      stall = 0;
    } else if (++stall >= cfg.pso.stall_iterations) {
      converged = true;
      break;
    }
  }
  return ev.finish(Method::pso, it, converged,
                   converged ? "global best stalled" : "iteration budget");
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_PSO_HPP_
