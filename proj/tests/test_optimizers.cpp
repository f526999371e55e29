//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <limits>
#include <mutex>
#include <random>
#include <string>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "test_support.hpp"

namespace latefusion::optim {
namespace {

std::string name_of(Method m) { return std::string(method_name(m)); }

double method_tolerance(Method m) { return uses_gradient(m) ? 1e-6 : 1e-3; }

FunctionObjective shifted_square(double centre) {
  return FunctionObjective(
      [centre](std::span<const double> x) {
        return (x[0] - centre) * (x[0] - centre);
      },
      [centre](std::span<const double> x, std::span<double> g) {
        g[0] = 2.0 * (x[0] - centre);
      });
}

OptimizerConfig config(std::size_t m, std::uint64_t seed = 0) {
  OptimizerConfig cfg;
  cfg.dimension = m;
  cfg.seed = seed;
  return cfg;
}

void expect_trace_non_increasing(const OptimizerReport &r) {
  ASSERT_FALSE(r.trace.empty());
  for (std::size_t i = 1; i < r.trace.size(); ++i)
    EXPECT_LE(r.trace[i].best_objective, r.trace[i - 1].best_objective)
        << name_of(r.method) << " at trace entry " << i;
  EXPECT_EQ(r.trace.back().best_objective, r.best_objective);
}

class EveryOptimizer : public ::testing::TestWithParam<Method> {};

TEST_P(EveryOptimizer, InteriorQuadraticIn1D) {
  const auto r = optimize(GetParam(), shifted_square(0.3), config(1));
  ASSERT_EQ(r.best_weights.size(), 1u);
  EXPECT_NEAR(r.best_weights[0], 0.3, method_tolerance(GetParam()));
}

TEST_P(EveryOptimizer, BoundActiveQuadraticIn1D) {
  const auto r = optimize(GetParam(), shifted_square(1.5), config(1));
  EXPECT_NEAR(r.best_weights[0], 1.0, method_tolerance(GetParam()));
  EXPECT_LE(r.best_weights[0], 1.0);
}

TEST_P(EveryOptimizer, RecoversPlantedFusion) {
  const auto mat = testing::planted_matrix(500, 5, 1);
  const auto r = optimize(GetParam(), MseObjective(mat), config(5, 3));
  EXPECT_LE(r.best_objective, uses_gradient(GetParam()) ? 1e-6 : 1e-3);
}

TEST_P(EveryOptimizer, ReportInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t m = 1 + rng() % 8;
    const auto mat = testing::threshold_matrix(120, m, rng(), 0.2);
    const MseObjective obj(mat);
    auto cfg = config(m, rng());
    cfg.max_iterations = 300;
    const auto r = optimize(GetParam(), obj, cfg);
    EXPECT_EQ(r.method, GetParam());
    EXPECT_EQ(r.seed, cfg.seed);
    ASSERT_EQ(r.best_weights.size(), m);
    for (double w : r.best_weights) {
      EXPECT_GE(w, 0.0);
      EXPECT_LE(w, 1.0);
    }
    EXPECT_EQ(r.best_objective, mse(r.weights(), mat));
    EXPECT_LE(r.best_objective, mse(WeightVector::uniform(m), mat));
    EXPECT_GE(r.function_evaluations, 1u);
    expect_trace_non_increasing(r);
  }
}

TEST_P(EveryOptimizer, RespectsCustomBounds) {
  std::mt19937_64 rng(12);
  const auto mat = testing::threshold_matrix(100, 4, 5, 0.1);
  auto cfg = config(4, 9);
  cfg.lower_bound = 0.2;
  cfg.upper_bound = 0.6;
  cfg.max_iterations = 200;
  const auto r = optimize(GetParam(), MseObjective(mat), cfg);
  for (double w : r.best_weights) {
    EXPECT_GE(w, 0.2);
    EXPECT_LE(w, 0.6);
  }
}

TEST_P(EveryOptimizer, SameSeedSameReport) {
  const auto mat = testing::threshold_matrix(150, 4, 21, 0.2);
  const MseObjective obj(mat);
  auto cfg = config(4, 42);
  cfg.max_iterations = 200;
  const auto a = to_json(optimize(GetParam(), obj, cfg)).dump();
  const auto b = to_json(optimize(GetParam(), obj, cfg)).dump();
  EXPECT_EQ(a, b);
}

TEST_P(EveryOptimizer, ThreadCountDoesNotChangeReport) {
  const auto mat = testing::threshold_matrix(150, 6, 22, 0.2);
  const MseObjective obj(mat);
  auto cfg = config(6, 7);
  cfg.max_iterations = 100;
  const auto serial = to_json(optimize(GetParam(), obj, cfg)).dump();
  cfg.threads = 4;
  EXPECT_EQ(to_json(optimize(GetParam(), obj, cfg)).dump(), serial);
}

TEST_P(EveryOptimizer, NonFiniteObjectiveAborts) {
  const FunctionObjective nan_objective(
      [](std::span<const double>) {
        return std::numeric_limits<double>::quiet_NaN();
      },
      [](std::span<const double>, std::span<double> g) {
        for (auto &v : g) v = 0.0;
      });
  try {
    optimize(GetParam(), nan_objective, config(2));
    FAIL() << "expected OptimizationAbort";
  } catch (const OptimizationAbort &e) {
    EXPECT_NE(std::string(e.what()).find("0.5"), std::string::npos)
        << e.what();
  }
}

TEST_P(EveryOptimizer, InvalidConfigRejected) {
  auto cfg = config(2);
  cfg.lower_bound = 1.0;
  EXPECT_THROW(optimize(GetParam(), shifted_square(0.3), cfg), ContractError);
  cfg = config(0);
  EXPECT_THROW(optimize(GetParam(), shifted_square(0.3), cfg), ContractError);
}

INSTANTIATE_TEST_SUITE_P(Methods, EveryOptimizer,
                         ::testing::ValuesIn(kAllMethods.begin() + 1,
                                             kAllMethods.end()),
                         [](const auto &info) {
                           std::string n = name_of(info.param);
                           for (auto &c : n)
                             if (c == '-') c = '_';
                           return n;
                         });

TEST(OptimizeEqual, TwentyNineInducers) {
  const auto r = optimize_equal(shifted_square(0.3), config(29));
  ASSERT_EQ(r.best_weights.size(), 29u);
  for (double w : r.best_weights) EXPECT_NEAR(w, 0.03448, 1e-5);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_TRUE(r.converged);
}

TEST(OptimizeEqual, SmallDimensions) {
  EXPECT_EQ(optimize_equal(shifted_square(0.3), config(1)).best_weights,
            std::vector<double>{1.0});
  EXPECT_EQ(optimize_equal(shifted_square(0.3), config(4)).best_weights,
            std::vector<double>(4, 0.25));
}

TEST(OptimizePso, Seed42IsBitIdentical) {
  const auto mat = testing::planted_matrix(200, 5, 4);
  const MseObjective obj(mat);
  const auto cfg = config(5, 42);
  const auto a = optimize_pso(obj, cfg);
  const auto b = optimize_pso(obj, cfg);
  EXPECT_EQ(a.best_weights, b.best_weights);
  EXPECT_EQ(a.best_objective, b.best_objective);
  EXPECT_EQ(a.trace, b.trace);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(OptimizePso, DifferentSeedsDiffer) {
  const auto mat = testing::threshold_matrix(200, 5, 4, 0.3);
  const MseObjective obj(mat);
  auto cfg = config(5, 1);
  cfg.max_iterations = 5;
  const auto a = optimize_pso(obj, cfg);
  cfg.seed = 2;
  const auto b = optimize_pso(obj, cfg);
  EXPECT_NE(a.trace, b.trace);
}

TEST(OptimizeGa, ElitismKeepsEqualWeights) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 1 + rng() % 29;
    const auto mat = testing::threshold_matrix(80, m, rng(), 0.5);
    auto cfg = config(m, rng());
    cfg.ga.max_generations = 5;
    const auto r = optimize_ga(MseObjective(mat), cfg);
    EXPECT_LE(r.best_objective, mse(WeightVector::uniform(m), mat));
  }
}

TEST(OptimizeGa, GenerationBudget) {
  const auto mat = testing::threshold_matrix(80, 3, 1, 0.5);
  auto cfg = config(3, 1);
  cfg.ga.max_generations = 7;
  cfg.ga.stall_generations = 1000;
  const auto r = optimize_ga(MseObjective(mat), cfg);
  EXPECT_EQ(r.iterations, 7u);
  EXPECT_FALSE(r.converged);
}

TEST(OptimizeNelderMead, EveryEvaluatedPointInsideBox) {
  const auto mat = testing::threshold_matrix(100, 3, 31, 0.2);
  const MseObjective mse_obj(mat);
  std::mutex lock;
  bool outside = false;
  const FunctionObjective watched([&](std::span<const double> x) {
    for (double v : x)
      if (v < 0.0 || v > 1.0) {
        std::lock_guard g(lock);
        outside = true;
      }
    return mse_obj.value(x);
  });
  optimize_nelder_mead(watched, config(3));
  EXPECT_FALSE(outside);
}

TEST(OptimizeNelderMead, IterationBudgetReportsNotConverged) {
  const auto mat = testing::threshold_matrix(100, 6, 32, 0.2);
  auto cfg = config(6);
  cfg.max_iterations = 3;
  const auto r = optimize_nelder_mead(MseObjective(mat), cfg);
  EXPECT_EQ(r.iterations, 3u);
  EXPECT_FALSE(r.converged);
}

TEST(OptimizeLbfgsb, InteriorQuadraticMatchesLinearSolve) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 15);
    // Least-squares form 0.5 * |Qx - r|^2 of the quadratic with A = Q'Q and
    // b = Q'r; the minimizer comes from solving A x = b directly.
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(2 * m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) q(i, j) = unit(rng) - 0.5;
    q.bottomRows(m) = std::sqrt(0.5) * Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd target(m);
    for (int i = 0; i < m; ++i) target(i) = 0.2 + 0.6 * unit(rng);
    const Eigen::VectorXd rhs = q * target;
    const Eigen::MatrixXd a = q.transpose() * q;
    const Eigen::VectorXd b = q.transpose() * rhs;
    const Eigen::VectorXd solved = a.ldlt().solve(b);

    const FunctionObjective quad(
        [&](std::span<const double> x) {
          const Eigen::Map<const Eigen::VectorXd> v(x.data(), m);
          return 0.5 * (q * v - rhs).squaredNorm();
        },
        [&](std::span<const double> x, std::span<double> g) {
          const Eigen::Map<const Eigen::VectorXd> v(x.data(), m);
          Eigen::Map<Eigen::VectorXd>(g.data(), m) = q.transpose() * (q * v - rhs);
        });
    const auto r = optimize_lbfgsb(quad, config(static_cast<std::size_t>(m)));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.iterations, 100u);
    std::vector<double> g(static_cast<std::size_t>(m));
    quad.gradient(r.best_weights, g);
    for (double v : g) EXPECT_LE(std::abs(v), 1e-8);
    for (int i = 0; i < m; ++i)
      EXPECT_NEAR(r.best_weights[static_cast<std::size_t>(i)], solved(i), 1e-7);
  }
}

TEST(GradientMethods, RequireGradient) {
  const FunctionObjective value_only(
      [](std::span<const double> x) { return x[0] * x[0]; });
  for (auto m : {Method::trust_region, Method::lbfgsb, Method::tnc})
    EXPECT_THROW(optimize(m, value_only, config(1)), ContractError)
        << name_of(m);
  EXPECT_NO_THROW(optimize_nelder_mead(value_only, config(1)));
}

TEST(Method, NamesRoundTrip) {
  for (auto m : kAllMethods) EXPECT_EQ(parse_method(method_name(m)), m);
  EXPECT_THROW(parse_method("simplex"), UsageError);
  EXPECT_EQ(kAllMethods.size(), 7u);
}

TEST(ApplyOverride, SetsFields) {
  OptimizerConfig cfg;
  apply_override(cfg, "pso.swarm_size", "50");
  apply_override(cfg, "ga.crossover_rate", "0.75");
  apply_override(cfg, "tolerance", "1e-6");
  apply_override(cfg, "lbfgsb.history", "5");
  EXPECT_EQ(cfg.pso.swarm_size, 50u);
  EXPECT_EQ(cfg.ga.crossover_rate, 0.75);
  EXPECT_EQ(cfg.tolerance, 1e-6);
  EXPECT_EQ(cfg.lbfgsb.history, 5u);
}

TEST(ApplyOverride, RejectsBadInput) {
  OptimizerConfig cfg;
  EXPECT_THROW(apply_override(cfg, "pso.swarm", "5"), UsageError);
  EXPECT_THROW(apply_override(cfg, "tolerance", "tiny"), UsageError);
  EXPECT_THROW(apply_override(cfg, "ga.population", "2.5"), UsageError);
  EXPECT_THROW(apply_override(cfg, "max_iterations", "-3"), UsageError);
}

TEST(ReportJson, CarriesConfigEchoAndTrace) {
  const auto mat = testing::threshold_matrix(50, 2, 3, 0.2);
  auto cfg = config(2, 5);
  cfg.max_iterations = 3;
  const auto r = optimize_pso(MseObjective(mat), cfg);
  const auto doc = to_json(r);
  EXPECT_EQ(doc["method"], "pso");
  EXPECT_EQ(doc["seed"], 5);
  EXPECT_EQ(doc["config"]["method_params"]["swarm_size"], 300);
  EXPECT_EQ(doc["trace"].size(), r.trace.size());
  const auto csv = trace_csv(r);
  EXPECT_EQ(csv.rfind("iteration,best_objective\n", 0), 0u);
}

}  // namespace
}  // namespace latefusion::optim
