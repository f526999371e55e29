//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_LATEFUSION_HPP_
#define LATEFUSION_LATEFUSION_HPP_

#include "latefusion/error.hpp"
#include "latefusion/evaluation.hpp"
#include "latefusion/fusion.hpp"
#include "latefusion/ingestion.hpp"
#include "latefusion/optimizers.hpp"
#include "latefusion/pipeline.hpp"
#include "latefusion/synth.hpp"

#endif  // LATEFUSION_LATEFUSION_HPP_
