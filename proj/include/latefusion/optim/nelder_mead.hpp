//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_NELDER_MEAD_HPP_
#define LATEFUSION_OPTIM_NELDER_MEAD_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "latefusion/optim/detail/evaluator.hpp"

namespace latefusion::optim {

/// Nelder-Mead simplex search. Candidate vertices are clipped into the box
/// before evaluation, so the simplex never leaves it.
///
/// A simplex is the start point plus one vertex per coordinate offset by
/// nelder_mead.initial_step * (hi - lo) (stepping down instead when the upper
/// bound is in the way). A simplex has converged when both the vertex spread
/// (max-norm distance to the best vertex) and the objective spread are within
/// `tolerance`. Clipping can flatten the simplex onto a face of the box, so
/// on convergence the search restarts from a fresh simplex around the best
/// vertex; it stops once a restart improves the best value by no more than
/// `tolerance`. The first simplex starts at 1/m.
template <Objective F>
OptimizerReport optimize_nelder_mead(const F &objective,
                                     const OptimizerConfig &cfg) {
  cfg.validate();
  detail::Evaluator ev(objective, cfg);
  const auto &box = ev.box();
  const auto &p = cfg.nelder_mead;
  const std::size_t m = cfg.dimension;
  const std::size_t nv = m + 1;
  const double step = p.initial_step * box.width();

  std::vector<std::vector<double>> verts(nv);
  std::vector<double> fv(nv);
  auto build_simplex = [&](const std::vector<double> &start) {
    for (std::size_t i = 0; i < nv; ++i) {
      verts[i] = start;
      if (i > 0) {
        auto &v = verts[i][i - 1];
        v = v + step <= box.hi ? v + step : v - step;
      }
      fv[i] = ev.value(verts[i]);
    }
  };

  std::vector<std::size_t> order(nv);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::vector<std::vector<double>> v2(nv);
    std::vector<double> f2(nv);
    for (std::size_t i = 0; i < nv; ++i) {
      v2[i] = std::move(verts[order[i]]);
      f2[i] = fv[order[i]];
    }
    verts = std::move(v2);
    fv = std::move(f2);
  };

  auto collapsed = [&] {
    double x_spread = 0.0;
    double f_spread = 0.0;
    for (std::size_t i = 1; i < nv; ++i) {
      for (std::size_t j = 0; j < m; ++j)
        x_spread = std::max(x_spread, std::abs(verts[i][j] - verts[0][j]));
      f_spread = std::max(f_spread, std::abs(fv[i] - fv[0]));
    }
    return x_spread <= cfg.tolerance && f_spread <= cfg.tolerance;
  };

  std::vector<double> centroid(m), trial(m), trial2(m);
  // point = centroid + coef * (centroid - worst)
  auto along = [&](double coef, std::vector<double> &out) {
    const auto &worst = verts[m];
    for (std::size_t j = 0; j < m; ++j)
      out[j] = centroid[j] + coef * (centroid[j] - worst[j]);
  };

  build_simplex(detail::uniform_start(cfg));
  ev.record(0);

  std::size_t it = 0;
  std::size_t restarts = 0;
  bool converged = false;
  double previous_best = ev.best();
  while (true) {
    sort_simplex();
    if (collapsed()) {
      if (restarts > 0 && previous_best - fv[0] <= cfg.tolerance) {
        converged = true;
        break;
      }
      if (it >= cfg.max_iterations) break;
      previous_best = fv[0];
      ++restarts;
      build_simplex(std::vector<double>(verts[0]));
      continue;
    }
    if (it >= cfg.max_iterations) break;
    ++it;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) centroid[j] += verts[i][j];
    for (auto &c : centroid) c /= static_cast<double>(m);

    along(p.reflection, trial);
    const double fr = ev.value(trial);
    bool shrink = false;
    if (fr < fv[0]) {
      along(p.reflection * p.expansion, trial2);
      const double fe = ev.value(trial2);
      if (fe < fr) {
        verts[m] = trial2;
        fv[m] = fe;
      } else {
        verts[m] = trial;
        fv[m] = fr;
      }
    } else if (fr < fv[m - 1]) {
      verts[m] = trial;
      fv[m] = fr;
    } else if (fr < fv[m]) {
      along(p.reflection * p.contraction, trial2);
      const double fc = ev.value(trial2);
      if (fc <= fr) {
        verts[m] = trial2;
        fv[m] = fc;
      } else {
        shrink = true;
      }
    } else {
      along(-p.contraction, trial2);
      const double fcc = ev.value(trial2);
      if (fcc < fv[m]) {
        verts[m] = trial2;
        fv[m] = fcc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t i = 1; i < nv; ++i) {
        for (std::size_t j = 0; j < m; ++j)
          verts[i][j] = verts[0][j] + p.shrink * (verts[i][j] - verts[0][j]);
        fv[i] = ev.value(verts[i]);
      }
    }
    ev.record(it);
  }
  return ev.finish(Method::nelder_mead, it, converged,
                   converged ? "simplex spread below tolerance after "
                                   + std::to_string(restarts) + " restart(s)"
                             : "iteration budget");
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_NELDER_MEAD_HPP_
