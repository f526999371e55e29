//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_OPTIM_CONFIG_HPP_
#define LATEFUSION_OPTIM_CONFIG_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "latefusion/detail/text.hpp"
#include "latefusion/error.hpp"

namespace latefusion::optim {

enum class Method { equal, pso, ga, nelder_mead, trust_region, lbfgsb, tnc };

inline constexpr std::array<Method, 7> kAllMethods = {
    Method::equal,        Method::trust_region, Method::pso,
    Method::ga,           Method::lbfgsb,       Method::nelder_mead,
    Method::tnc};

inline std::string_view method_name(Method method) {
  switch (method) {
    case Method::equal: return "equal";
    case Method::pso: return "pso";
    case Method::ga: return "ga";
    case Method::nelder_mead: return "nelder-mead";
    case Method::trust_region: return "trust-region";
    case Method::lbfgsb: return "lbfgsb";
    case Method::tnc: return "tnc";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  for (auto m : kAllMethods)
    if (method_name(m) == name) return m;
  throw UsageError("unknown method '" + std::string(name)
                   + "' (expected equal, pso, ga, nelder-mead, trust-region, "
                     "lbfgsb or tnc)");
}

inline bool uses_gradient(Method method) {
  return method == Method::trust_region || method == Method::lbfgsb
         || method == Method::tnc;
}

struct PsoParams {
  std::size_t swarm_size = 300;
  double inertia = 0.729;
  double cognitive = 1.49445;
  double social = 1.49445;
  // Stop once the global best has not improved by more than `tolerance` for
  // this many consecutive iterations.
  std::size_t stall_iterations = 100;
};

struct GaParams {
  std::size_t population = 100;
  std::size_t tournament_size = 3;
  double crossover_rate = 0.9;
  double mutation_rate = 0.0;  // 0 selects 1/m
  double mutation_sigma = 0.1;  // relative to the box width
  std::size_t max_generations = 1000;
  std::size_t stall_generations = 100;
};

struct NelderMeadParams {
  double reflection = 1.0;
  double expansion = 2.0;
  double contraction = 0.5;
  double shrink = 0.5;
  double initial_step = 0.05;  // relative to the box width
};

struct TrustRegionParams {
  double initial_radius = 1.0;
  double eta = 1e-4;  // minimum actual/predicted ratio to accept a step
};

struct LbfgsbParams {
  std::size_t history = 10;
  double armijo = 1e-4;
  std::size_t max_backtracks = 50;
};

struct TncParams {
  std::size_t max_cg_iterations = 50;  // capped further at 2m
  double armijo = 1e-4;
  std::size_t max_backtracks = 50;
};

struct OptimizerConfig {
  std::size_t dimension = 1;
  double lower_bound = 0.0;
  double upper_bound = 1.0;
  std::size_t max_iterations = 10000;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  // Worker threads for batched objective evaluation (0 = hardware
  // concurrency). Results do not depend on it, so it is not echoed.
  std::size_t threads = 1;

  PsoParams pso;
  GaParams ga;
  NelderMeadParams nelder_mead;
  TrustRegionParams trust_region;
  LbfgsbParams lbfgsb;
  TncParams tnc;

  void validate() const {
    if (dimension < 1) throw ContractError("dimension must be >= 1");
    if (!(lower_bound < upper_bound))
      throw ContractError("lower_bound must be < upper_bound");
    if (max_iterations < 1) throw ContractError("max_iterations must be >= 1");
    if (!(tolerance > 0)) throw ContractError("tolerance must be > 0");
    if (pso.swarm_size < 1) throw ContractError("pso.swarm_size must be >= 1");
    if (ga.population < 2) throw ContractError("ga.population must be >= 2");
    if (ga.tournament_size < 1)
      throw ContractError("ga.tournament_size must be >= 1");
    if (lbfgsb.history < 1) throw ContractError("lbfgsb.history must be >= 1");
    if (!(trust_region.initial_radius > 0))
      throw ContractError("trust_region.initial_radius must be > 0");
  }
};

namespace detail {
  inline double override_real(std::string_view key, std::string_view value) {
    auto v = latefusion::detail::parse_double(value);
    if (!v)
      throw UsageError("override " + std::string(key) + ": '"
                       + std::string(value) + "' is not a number");
    return *v;
  }

  inline std::uint64_t override_count(std::string_view key,
                                      std::string_view value) {
    const double v = override_real(key, value);
    if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v)))
      throw UsageError("override " + std::string(key) + ": '"
                       + std::string(value)
                       + "' is not a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
}  // namespace detail

/// Applies one `key=value` override, e.g. `pso.swarm_size=50`.
inline void apply_override(OptimizerConfig &cfg, std::string_view key,
                           std::string_view value) {
  using detail::override_count;
  using detail::override_real;
  auto real = [&](double &slot) { slot = override_real(key, value); };
  auto count = [&](std::size_t &slot) {
    slot = static_cast<std::size_t>(override_count(key, value));
  };

  if (key == "lower_bound") real(cfg.lower_bound);
  else if (key == "upper_bound") real(cfg.upper_bound);
  else if (key == "max_iterations") count(cfg.max_iterations);
  else if (key == "tolerance") real(cfg.tolerance);
  else if (key == "pso.swarm_size") count(cfg.pso.swarm_size);
  else if (key == "pso.inertia") real(cfg.pso.inertia);
  else if (key == "pso.cognitive") real(cfg.pso.cognitive);
  else if (key == "pso.social") real(cfg.pso.social);
  else if (key == "pso.stall_iterations") count(cfg.pso.stall_iterations);
  else if (key == "ga.population") count(cfg.ga.population);
  else if (key == "ga.tournament_size") count(cfg.ga.tournament_size);
  else if (key == "ga.crossover_rate") real(cfg.ga.crossover_rate);
  else if (key == "ga.mutation_rate") real(cfg.ga.mutation_rate);
  else if (key == "ga.mutation_sigma") real(cfg.ga.mutation_sigma);
  else if (key == "ga.max_generations") count(cfg.ga.max_generations);
  else if (key == "ga.stall_generations") count(cfg.ga.stall_generations);
  else if (key == "nelder_mead.reflection") real(cfg.nelder_mead.reflection);
  else if (key == "nelder_mead.expansion") real(cfg.nelder_mead.expansion);
  else if (key == "nelder_mead.contraction") real(cfg.nelder_mead.contraction);
  else if (key == "nelder_mead.shrink") real(cfg.nelder_mead.shrink);
  else if (key == "nelder_mead.initial_step") real(cfg.nelder_mead.initial_step);
  else if (key == "trust_region.initial_radius")
    real(cfg.trust_region.initial_radius);
  else if (key == "trust_region.eta") real(cfg.trust_region.eta);
  else if (key == "lbfgsb.history") count(cfg.lbfgsb.history);
  else if (key == "lbfgsb.armijo") real(cfg.lbfgsb.armijo);
  else if (key == "lbfgsb.max_backtracks") count(cfg.lbfgsb.max_backtracks);
  else if (key == "tnc.max_cg_iterations") count(cfg.tnc.max_cg_iterations);
  else if (key == "tnc.armijo") real(cfg.tnc.armijo);
  else if (key == "tnc.max_backtracks") count(cfg.tnc.max_backtracks);
  else
    throw UsageError("unknown optimizer override '" + std::string(key) + "'");
}

/// Config echo: shared settings plus the parameters of `method` only.
inline nlohmann::ordered_json config_to_json(const OptimizerConfig &cfg,
                                             Method method) {
  nlohmann::ordered_json doc;
  doc["dimension"] = cfg.dimension;
  doc["lower_bound"] = cfg.lower_bound;
  doc["upper_bound"] = cfg.upper_bound;
  doc["max_iterations"] = cfg.max_iterations;
  doc["tolerance"] = cfg.tolerance;
  doc["seed"] = cfg.seed;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  switch (method) {
    case Method::equal: break;
    case Method::pso:
      params = {{"swarm_size", cfg.pso.swarm_size},
                {"inertia", cfg.pso.inertia},
                {"cognitive", cfg.pso.cognitive},
                {"social", cfg.pso.social},
                {"stall_iterations", cfg.pso.stall_iterations}};
      break;
    case Method::ga:
      params = {{"population", cfg.ga.population},
                {"tournament_size", cfg.ga.tournament_size},
                {"crossover_rate", cfg.ga.crossover_rate},
                {"mutation_rate", cfg.ga.mutation_rate},
                {"mutation_sigma", cfg.ga.mutation_sigma},
                {"max_generations", cfg.ga.max_generations},
                {"stall_generations", cfg.ga.stall_generations}};
      break;
    case Method::nelder_mead:
      params = {{"reflection", cfg.nelder_mead.reflection},
                {"expansion", cfg.nelder_mead.expansion},
                {"contraction", cfg.nelder_mead.contraction},
                {"shrink", cfg.nelder_mead.shrink},
                {"initial_step", cfg.nelder_mead.initial_step}};
      break;
    case Method::trust_region:
      params = {{"initial_radius", cfg.trust_region.initial_radius},
                {"eta", cfg.trust_region.eta}};
      break;
    case Method::lbfgsb:
      params = {{"history", cfg.lbfgsb.history},
                {"armijo", cfg.lbfgsb.armijo},
                {"max_backtracks", cfg.lbfgsb.max_backtracks}};
      break;
    case Method::tnc:
      params = {{"max_cg_iterations", cfg.tnc.max_cg_iterations},
                {"armijo", cfg.tnc.armijo},
                {"max_backtracks", cfg.tnc.max_backtracks}};
      break;
  }
  doc["method_params"] = params;
  return doc;
}

}  // namespace latefusion::optim

#endif  // LATEFUSION_OPTIM_CONFIG_HPP_
