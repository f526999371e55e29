//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_EQUAL_HPP_
#define LATEFUSION_OPTIM_EQUAL_HPP_

#include "latefusion/optim/detail/evaluator.hpp"

namespace latefusion::optim {

/// Baseline: every weight 1/m. One evaluation, no iterations.
template <Objective F>
OptimizerReport optimize_equal(const F &objective, const OptimizerConfig &cfg) {
  cfg.validate();
  detail::Evaluator ev(objective, cfg);
  auto x = detail::uniform_start(cfg);
  ev.value(x);
  ev.record(0);
  return ev.finish(Method::equal, 0, true, "uniform weights");
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_EQUAL_HPP_
