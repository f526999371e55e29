//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_DETAIL_LINE_SEARCH_HPP_
#define LATEFUSION_OPTIM_DETAIL_LINE_SEARCH_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "latefusion/optim/detail/evaluator.hpp"

namespace latefusion::optim::detail {

struct LineSearchResult {
  bool accepted = false;
  std::vector<double> x;
  double f = 0.0;
};

/// Backtracking along the projected path x(a) = P(x + a d), halving a until
///   f(x(a)) <= f(x) + c * g . (x(a) - x).
template <class F>
LineSearchResult projected_backtracking(Evaluator<F> &ev,
                                        std::span<const double> x, double f,
                                        std::span<const double> g,
                                        std::span<const double> d,
                                        double alpha, double c,
                                        std::size_t max_backtracks) {
  const std::size_t m = x.size();
  LineSearchResult r;
  r.x.resize(m);
  std::vector<double> s(m);
  for (std::size_t k = 0; k <= max_backtracks; ++k, alpha *= 0.5) {
    bool moved = false;
    for (std::size_t i = 0; i < m; ++i) {
      r.x[i] = ev.box().clamp(x[i] + alpha * d[i]);
      s[i] = r.x[i] - x[i];
      moved = moved || s[i] != 0.0;
    }
    if (!moved) break;
    r.f = ev.value(r.x);
    if (r.f <= f + c * dot(g, s)) {
      r.accepted = true;
      return r;
    }
  }
  return r;
}

}  // namespace latefusion::optim::detail

#endif  // LATEFUSION_OPTIM_DETAIL_LINE_SEARCH_HPP_
