//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIMIZERS_HPP_
#define LATEFUSION_OPTIMIZERS_HPP_

#include "latefusion/optim/config.hpp"
#include "latefusion/optim/equal.hpp"
#include "latefusion/optim/ga.hpp"
#include "latefusion/optim/lbfgsb.hpp"
#include "latefusion/optim/nelder_mead.hpp"
#include "latefusion/optim/objective.hpp"
#include "latefusion/optim/pso.hpp"
#include "latefusion/optim/report.hpp"
#include "latefusion/optim/tnc.hpp"
#include "latefusion/optim/trust_region.hpp"

namespace latefusion::optim {

/// Runs `method` on `objective`.
template <DifferentiableObjective F>
OptimizerReport optimize(Method method, const F &objective,
                         const OptimizerConfig &cfg) {
  switch (method) {
    case Method::equal: return optimize_equal(objective, cfg);
    case Method::pso: return optimize_pso(objective, cfg);
    case Method::ga: return optimize_ga(objective, cfg);
    case Method::nelder_mead: return optimize_nelder_mead(objective, cfg);
    case Method::trust_region: return optimize_trust_region(objective, cfg);
    case Method::lbfgsb: return optimize_lbfgsb(objective, cfg);
    case Method::tnc: return optimize_tnc(objective, cfg);
  }
  throw ContractError("unknown optimizer method");
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIMIZERS_HPP_
