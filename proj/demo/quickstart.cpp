//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

// Generates a small dataset in memory, learns fusion weights with every
// method and prints dev MSE next to test MAP@10.

#include <cstdio>

#include "latefusion/latefusion.hpp"

int main() {
  using namespace latefusion;

  synth::SynthSpec spec;
  spec.n_samples = 400;
  spec.n_test_samples = 120;
  spec.m_inducers = 6;
  spec.n_videos = 20;
  spec.noise_sigma = 0.1;
  spec.seed = 11;
  const auto data = synth::generate(spec);

  const auto dev_raw = assemble(data.dev.inducers, data.dev.truth);
  const auto test_raw = assemble(data.test->inducers, data.test->truth);
  const auto params = fit_minmax(dev_raw);
  const auto dev = apply_minmax(params, dev_raw);
  const auto test = apply_minmax(params, test_raw);

  optim::OptimizerConfig cfg;
  cfg.dimension = dev.cols();
  cfg.seed = 1;
  cfg.pso.swarm_size = 60;
  const optim::MseObjective objective(dev);

  std::printf("%-14s %12s %10s\n", "method", "dev_mse", "test_map");
  for (auto method : optim::kAllMethods) {
    const auto report = optim::optimize(method, objective, cfg);
    const auto eval = map_at_k(fuse(report.weights(), test), test, 10);
    std::printf("%-14s %12.6f %10.4f\n",
                std::string(optim::method_name(method)).c_str(),
                report.best_objective, eval.map_at_k);
  }
}
