//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

// Command-line front end: run, compare, synth, evaluate.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 optimization abort.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latefusion/latefusion.hpp"

namespace fs = std::filesystem;
using namespace latefusion;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitAbort = 4;

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string> &items) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto &item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw UsageError("--set expects key=value, got '" + item + "'");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

std::vector<fs::path> to_paths(const std::vector<std::string> &items) {
  return {items.begin(), items.end()};
}

struct DataFlags {
  std::vector<std::string> dev, test, truth, overrides;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  bool trace = false;

  void attach(CLI::App *cmd) {
    cmd->add_option("--dev", dev, "Dev-split inducer files")->expected(1, -1);
    cmd->add_option("--test", test, "Test-split inducer files")->expected(1, -1);
    cmd->add_option("--truth", truth, "Ground-truth file(s)")->expected(1, -1);
    cmd->add_option("--k", k, "MAP cutoff")->capture_default_str();
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--set", overrides, "Optimizer override key=value")
        ->expected(1, -1);
    cmd->add_option("--threads", threads,
                    "Evaluation threads (0 = all cores)")
        ->capture_default_str();
    cmd->add_flag("--trace", trace, "Write trace.csv per run");
  }

  RunManifest manifest(optim::Method method, fs::path out) const {
    RunManifest m;
    m.method = method;
    m.dev_paths = to_paths(dev);
    m.test_paths = to_paths(test);
    m.truth_paths = to_paths(truth);
    m.k = k;
    m.seed = seed;
    m.overrides = parse_overrides(overrides);
    m.trace = trace;
    m.threads = threads;
    m.out = std::move(out);
    return m;
  }
};

void print_run(const RunResult &r) {
  std::cout << optim::method_name(r.report.method)
            << ": dev_mse=" << detail::format_double(r.report.best_objective)
            << " test_map@" << r.eval.k << "="
            << detail::format_double(r.eval.map_at_k)
            << " evaluations=" << r.report.function_evaluations << "+"
            << r.report.gradient_evaluations
            << " iterations=" << r.report.iterations
            << " converged=" << (r.report.converged ? "true" : "false") << "\n";
}

void write_text(const fs::path &path, const std::string &content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Late fusion of inducer scores with learned weights"};
  app.require_subcommand(1);

  // run
  auto *run_cmd = app.add_subcommand("run", "Optimize weights on dev, score test");
  DataFlags run_flags;
  std::string run_method = "equal";
  std::string run_out;
  std::string run_manifest;
  run_cmd->add_option("--method", run_method,
                      "equal|pso|ga|nelder-mead|trust-region|lbfgsb|tnc")
      ->capture_default_str();
  run_cmd->add_option("--out", run_out, "Output directory");
  run_cmd->add_option("--manifest", run_manifest,
                      "Re-run a manifest echo (flags other than --out and "
                      "--threads are ignored)");
  run_flags.attach(run_cmd);

  // compare
  auto *cmp_cmd = app.add_subcommand("compare", "Run several methods on one dataset");
  DataFlags cmp_flags;
  std::vector<std::string> cmp_manifests;
  std::vector<std::string> cmp_methods;
  std::string cmp_out;
  cmp_cmd->add_option("--manifest", cmp_manifests, "Manifest files")
      ->expected(1, -1);
  cmp_cmd->add_option("--methods", cmp_methods,
                      "Methods to run with the data flags ('all' for seven)")
      ->expected(1, -1);
  cmp_cmd->add_option("--out", cmp_out, "Output directory")->required();
  cmp_flags.attach(cmp_cmd);

  // synth
  auto *syn_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth::SynthSpec spec;
  std::vector<double> planted;
  std::string rule = "threshold";
  std::string syn_out;
  syn_cmd->add_option("--n", spec.n_samples, "Dev samples")->capture_default_str();
  syn_cmd->add_option("--test-n", spec.n_test_samples, "Test samples")
      ->capture_default_str();
  syn_cmd->add_option("--m", spec.m_inducers, "Inducers")->capture_default_str();
  syn_cmd->add_option("--videos", spec.n_videos, "Dev videos")->capture_default_str();
  syn_cmd->add_option("--test-videos", spec.n_test_videos,
                      "Test videos (0 = proportional)");
  syn_cmd->add_option("--planted", planted, "Planted weights")->delimiter(',');
  syn_cmd->add_option("--noise", spec.noise_sigma, "Noise sigma")
      ->capture_default_str();
  syn_cmd->add_option("--label-rule", rule,
                      "threshold|random_balanced|planted_regression")
      ->capture_default_str();
  syn_cmd->add_option("--seed", spec.seed, "Seed")->capture_default_str();
  syn_cmd->add_option("--out-of-range-stride", spec.out_of_range_stride,
                      "Every stride-th inducer draws from [-2,5] (0 = none)")
      ->capture_default_str();
  syn_cmd->add_option("--out", syn_out, "Output directory")->required();

  // evaluate
  auto *ev_cmd = app.add_subcommand("evaluate", "Score a split with saved weights");
  std::string ev_weights, ev_norm, ev_out;
  std::vector<std::string> ev_inducers, ev_truth;
  std::size_t ev_k = 10;
  ev_cmd->add_option("--weights", ev_weights, "weights.json")->required();
  ev_cmd->add_option("--normalization", ev_norm, "normalization.json")->required();
  ev_cmd->add_option("--inducers", ev_inducers, "Inducer files")
      ->expected(1, -1)
      ->required();
  ev_cmd->add_option("--truth", ev_truth, "Ground-truth file(s)")
      ->expected(1, -1)
      ->required();
  ev_cmd->add_option("--k", ev_k, "MAP cutoff")->capture_default_str();
  ev_cmd->add_option("--out", ev_out, "Write the EvalReport JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*run_cmd) {
      RunManifest manifest;
      if (!run_manifest.empty()) {
        manifest = read_manifest(run_manifest);
        if (!run_out.empty()) manifest.out = run_out;
        if (run_cmd->count("--threads")) manifest.threads = run_flags.threads;
      } else {
        if (run_out.empty()) throw UsageError("run: --out is required");
        manifest = run_flags.manifest(optim::parse_method(run_method), run_out);
      }
      print_run(run(manifest));
    } else if (*cmp_cmd) {
      std::vector<RunManifest> manifests;
      for (const auto &path : cmp_manifests) {
        manifests.push_back(read_manifest(path));
        if (cmp_cmd->count("--threads")) manifests.back().threads = cmp_flags.threads;
      }
      for (const auto &name : cmp_methods) {
        if (name == "all") {
          for (auto m : optim::kAllMethods)
            manifests.push_back(cmp_flags.manifest(m, {}));
        } else {
          manifests.push_back(cmp_flags.manifest(optim::parse_method(name), {}));
        }
      }
      const auto summary = compare(std::move(manifests), cmp_out);
      std::cout << summary_csv(summary);
    } else if (*syn_cmd) {
      spec.label_rule = synth::parse_rule(rule);
      if (!planted.empty()) spec.planted_weights = planted;
      try {
        spec.validate();
      } catch (const ContractError &e) {
        throw UsageError(e.what());
      }
      const auto data = synth::generate(spec);
      for (const auto &[rel, content] : synth::dataset_files(data, spec))
        write_text(fs::path(syn_out) / rel, content);
      std::cout << "wrote " << spec.m_inducers << " inducers x "
                << spec.n_samples << " dev";
      if (spec.n_test_samples) std::cout << " + " << spec.n_test_samples << " test";
      std::cout << " samples to " << syn_out << "\n";
    } else if (*ev_cmd) {
      std::ifstream wf(ev_weights);
      if (!wf) throw DataError("cannot open '" + ev_weights + "'");
      const auto named = weights_from_json(nlohmann::json::parse(wf));
      std::ifstream nf(ev_norm);
      if (!nf) throw DataError("cannot open '" + ev_norm + "'");
      const auto params = normalization_from_json(nlohmann::json::parse(nf),
                                                  named.inducers);
      std::vector<InducerTable> tables;
      for (const auto &p : ev_inducers) tables.push_back(read_inducer_file(p));
      std::vector<InducerTable> ordered;
      for (const auto &name : named.inducers) {
        bool found = false;
        for (auto &t : tables) {
          if (t.inducer_name != name) continue;
          ordered.push_back(std::move(t));
          found = true;
          break;
        }
        if (!found) throw DataError("no inducer file for '" + name + "'");
      }
      if (ordered.size() != tables.size())
        throw DataError("inducer files do not match the weight file");
      const auto truth_paths = to_paths(ev_truth);
      const auto matrix =
          apply_minmax(params, assemble(ordered, read_ground_truth(truth_paths)));
      const auto report = map_at_k(fuse(named.weights, matrix), matrix, ev_k);
      const auto doc = to_json(report).dump(2) + "\n";
      if (ev_out.empty()) {
        std::cout << doc;
      } else {
        write_text(ev_out, doc);
        std::cout << "map@" << ev_k << "=" << detail::format_double(report.map_at_k)
                  << "\n";
      }
    }
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OptimizationAbort &e) {
    std::cerr << "optimization aborted: " << e.what() << "\n";
    return kExitAbort;
  } catch (const DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ContractError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const fs::filesystem_error &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
