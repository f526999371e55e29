//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_REPORT_HPP_
#define LATEFUSION_OPTIM_REPORT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefusion/detail/text.hpp"
#include "latefusion/fusion.hpp"
#include "latefusion/optim/config.hpp"

namespace latefusion::optim {

struct TracePoint {
  std::size_t iteration = 0;
  double best_objective = 0.0;

  bool operator==(const TracePoint &) const = default;
};

/// Outcome of one optimizer run.
struct OptimizerReport {
  Method method = Method::equal;
  std::uint64_t seed = 0;
  OptimizerConfig config;
  std::vector<double> best_weights;
  double best_objective = 0.0;
  std::size_t function_evaluations = 0;
  std::size_t gradient_evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string stop_reason;
  // Best objective seen so far, one entry per iteration; non-increasing.
  std::vector<TracePoint> trace;

  WeightVector weights() const { return WeightVector(best_weights); }
};

inline nlohmann::ordered_json to_json(const OptimizerReport &report) {
  nlohmann::ordered_json doc;
  doc["method"] = std::string(method_name(report.method));
  doc["seed"] = report.seed;
  doc["config"] = config_to_json(report.config, report.method);
  doc["best_weights"] = report.best_weights;
  doc["best_objective"] = report.best_objective;
  doc["function_evaluations"] = report.function_evaluations;
  doc["gradient_evaluations"] = report.gradient_evaluations;
  doc["iterations"] = report.iterations;
  doc["converged"] = report.converged;
  doc["stop_reason"] = report.stop_reason;
  auto trace = nlohmann::ordered_json::array();
  for (const auto &p : report.trace)
    trace.push_back(nlohmann::ordered_json::array({p.iteration,
                                                   p.best_objective}));
  doc["trace"] = std::move(trace);
  return doc;
}

inline std::string trace_csv(const OptimizerReport &report) {
  std::string out = "iteration,best_objective\n";
  for (const auto &p : report.trace)
    out += std::to_string(p.iteration) + ','
           + latefusion::detail::format_double(p.best_objective) + '\n';
  return out;
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_REPORT_HPP_
