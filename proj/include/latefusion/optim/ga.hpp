//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_GA_HPP_
#define LATEFUSION_OPTIM_GA_HPP_

#include <algorithm>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include "latefusion/optim/detail/evaluator.hpp"

namespace latefusion::optim {

/// Real-coded genetic algorithm with tournament selection, uniform
/// crossover, per-gene Gaussian mutation clipped to the box and an elite of
/// one. Individual 0 of the initial population is the uniform point 1/m.
///
/// Runs for min(max_iterations, ga.max_generations) generations or until the
/// best fitness has not improved by more than `tolerance` for
/// ga.stall_generations generations.
template <Objective F>
OptimizerReport optimize_ga(const F &objective, const OptimizerConfig &cfg) {
  cfg.validate();
  detail::Evaluator ev(objective, cfg);
  const auto &box = ev.box();
  const std::size_t m = cfg.dimension;
  const std::size_t pop_size = cfg.ga.population;
  const double rate = cfg.ga.mutation_rate > 0
                          ? cfg.ga.mutation_rate
                          : 1.0 / static_cast<double>(m);
  const double sigma = cfg.ga.mutation_sigma * box.width();
  const std::size_t generations =
      std::min(cfg.max_iterations, cfg.ga.max_generations);

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pop_size - 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> pop(pop_size * m);
  const auto start = detail::uniform_start(cfg);
  for (std::size_t i = 0; i < pop_size; ++i)
    for (std::size_t j = 0; j < m; ++j)
      pop[i * m + j] = i == 0 ? start[j] : box.lo + box.width() * unit(rng);
  std::vector<double> fit(pop_size);
  ev.values(pop, fit);
  ev.record(0);

  auto tournament = [&] {
    std::size_t winner = pick(rng);
    for (std::size_t t = 1; t < cfg.ga.tournament_size; ++t) {
      const std::size_t challenger = pick(rng);
      if (fit[challenger] < fit[winner]) winner = challenger;
    }
    return winner;
  };

  std::vector<double> next(pop.size());
  std::vector<double> next_fit(pop_size);
  double reference = ev.best();
  std::size_t stall = 0;
  std::size_t gen = 0;
  bool converged = false;
  while (gen < generations) {
    ++gen;
    const auto elite = static_cast<std::size_t>(
        std::min_element(fit.begin(), fit.end()) - fit.begin());
    std::copy_n(&pop[elite * m], m, next.begin());
    next_fit[0] = fit[elite];

    for (std::size_t i = 1; i < pop_size; ++i) {
      const std::size_t a = tournament();
      const std::size_t b = tournament();
      double *child = &next[i * m];
      std::copy_n(&pop[a * m], m, child);
      if (unit(rng) < cfg.ga.crossover_rate) {
        for (std::size_t j = 0; j < m; ++j)
          if (unit(rng) < 0.5) child[j] = pop[b * m + j];
      }
      for (std::size_t j = 0; j < m; ++j)
        if (unit(rng) < rate) child[j] = box.clamp(child[j] + sigma * gauss(rng));
    }
    ev.values(std::span(next).subspan(m),
              std::span(next_fit).subspan(1));
    std::swap(pop, next);
    std::swap(fit, next_fit);
    ev.record(gen);

    if (reference - ev.best() > cfg.tolerance) {
      reference = ev.best();
      stall = 0;
    } else if (++stall >= cfg.ga.stall_generations) {
      converged = true;
      break;
    }
  }
  return ev.finish(Method::ga, gen, converged,
                   converged ? "best fitness stalled" : "generation budget");
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_GA_HPP_
