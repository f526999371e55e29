//
// latefusion - Copyright 2026 The latefusion Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef LATEFUSION_PIPELINE_HPP_
#define LATEFUSION_PIPELINE_HPP_

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "latefusion/error.hpp"
#include "latefusion/evaluation.hpp"
#include "latefusion/fusion.hpp"
#include "latefusion/ingestion.hpp"
#include "latefusion/optimizers.hpp"

namespace latefusion {

namespace fs = std::filesystem;

/// Everything needed to reproduce one experiment.
struct RunManifest {
  optim::Method method = optim::Method::equal;
  std::vector<fs::path> dev_paths;
  std::vector<fs::path> test_paths;
  std::vector<fs::path> truth_paths;
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool trace = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
  fs::path out;

  void validate() const {
    if (dev_paths.empty()) throw UsageError("no dev inducer files");
    if (test_paths.empty()) throw UsageError("no test inducer files");
    if (truth_paths.empty()) throw UsageError("no ground-truth files");
    if (k < 1) throw UsageError("k must be >= 1");
    if (out.empty()) throw UsageError("no output directory");
  }
};

inline nlohmann::ordered_json to_json(const RunManifest &manifest) {
  auto paths = [](const std::vector<fs::path> &ps) {
    std::vector<std::string> out;
    for (const auto &p : ps) out.push_back(p.string());
    return out;
  };
  nlohmann::ordered_json doc;
  doc["method"] = std::string(optim::method_name(manifest.method));
  doc["dev"] = paths(manifest.dev_paths);
  doc["test"] = paths(manifest.test_paths);
  doc["truth"] = paths(manifest.truth_paths);
  doc["k"] = manifest.k;
  doc["seed"] = manifest.seed;
  nlohmann::ordered_json overrides = nlohmann::ordered_json::object();
  for (const auto &[key, value] : manifest.overrides) overrides[key] = value;
  doc["overrides"] = std::move(overrides);
  doc["trace"] = manifest.trace;
  doc["threads"] = manifest.threads;
  doc["out"] = manifest.out.string();
  return doc;
}

inline RunManifest manifest_from_json(const nlohmann::json &doc) {
  RunManifest m;
  try {
    m.method = optim::parse_method(doc.at("method").get<std::string>());
    for (const auto &p : doc.at("dev")) m.dev_paths.emplace_back(p.get<std::string>());
    for (const auto &p : doc.at("test")) m.test_paths.emplace_back(p.get<std::string>());
    for (const auto &p : doc.at("truth"))
      m.truth_paths.emplace_back(p.get<std::string>());
    m.k = doc.value("k", std::size_t{10});
    m.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("overrides"))
      for (const auto &[key, value] : doc.at("overrides").items())
        m.overrides.emplace_back(key, value.get<std::string>());
    m.trace = doc.value("trace", false);
    m.threads = doc.value("threads", std::size_t{0});
    m.out = doc.value("out", std::string());
  } catch (const nlohmann::json::exception &e) {
    throw UsageError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

inline RunManifest read_manifest(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open manifest '" + path.string() + "'");
  try {
    return manifest_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error &e) {
    throw UsageError("manifest '" + path.string() + "': " + e.what());
  }
}

inline optim::OptimizerConfig config_for(const RunManifest &manifest,
                                         std::size_t dimension) {
  optim::OptimizerConfig cfg;
  cfg.dimension = dimension;
  cfg.seed = manifest.seed;
  cfg.threads = manifest.threads;
  for (const auto &[key, value] : manifest.overrides)
    optim::apply_override(cfg, key, value);
  try {
    cfg.validate();
  } catch (const ContractError &e) {
    throw UsageError(e.what());
  }
  return cfg;
}

struct RunResult {
  NormalizationParams params;
  ScoreMatrix dev;   // normalized
  ScoreMatrix test;  // normalized with dev ranges
  optim::OptimizerReport report;
  EvalReport eval;
  double wall_time = 0.0;  // seconds, optimize + evaluate
};

namespace detail {
  inline std::vector<InducerTable> read_tables(
      const std::vector<fs::path> &paths) {
    std::vector<InducerTable> tables;
    std::set<std::string> names;
    for (const auto &p : paths) {
      tables.push_back(read_inducer_file(p));
      if (!names.insert(tables.back().inducer_name).second)
        throw DataError("inducer '" + tables.back().inducer_name
                        + "' given twice");
    }
    return tables;
  }

  /// Reorders `test` to follow the inducer order of `dev`.
  inline std::vector<InducerTable> align_inducers(
      const std::vector<InducerTable> &dev, std::vector<InducerTable> test) {
    if (dev.size() != test.size())
      throw DataError("dev has " + std::to_string(dev.size())
                      + " inducers but test has "
                      + std::to_string(test.size()));
    std::map<std::string, InducerTable *> by_name;
    for (auto &t : test) by_name[t.inducer_name] = &t;
    std::vector<InducerTable> out;
    for (const auto &d : dev) {
      auto it = by_name.find(d.inducer_name);
      if (it == by_name.end())
        throw DataError("inducer '" + d.inducer_name
                        + "' missing from the test split");
      out.push_back(std::move(*it->second));
    }
    return out;
  }

  /// Writes files through temp-then-rename; on failure removes everything
  /// written so far.
  class ArtifactWriter {
   public:
    explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string &name, std::string content) {
      files_.emplace_back(name, std::move(content));
    }

    void commit() {
      std::vector<fs::path> written;
      try {
        fs::create_directories(dir_);
        for (const auto &[name, content] : files_) {
          const fs::path target = dir_ / name;
          const fs::path temp = dir_ / (name + ".tmp");
          {
            std::ofstream out(temp, std::ios::binary | std::ios::trunc);
            if (!out) throw DataError("cannot write '" + temp.string() + "'");
            out << content;
            if (!out.flush())
              throw DataError("write failed for '" + temp.string() + "'");
          }
          fs::rename(temp, target);
          written.push_back(target);
        }
      } catch (...) {
        std::error_code ec;
        for (const auto &p : written) fs::remove(p, ec);
        for (const auto &[name, content] : files_)
          fs::remove(dir_ / (name + ".tmp"), ec);
        throw;
      }
    }

   private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
  };

  inline std::string dump(const nlohmann::ordered_json &doc) {
    return doc.dump(2) + "\n";
  }

  inline std::vector<fs::path> absolute_all(const std::vector<fs::path> &ps) {
    std::vector<fs::path> out;
    for (const auto &p : ps) out.push_back(fs::absolute(p).lexically_normal());
    return out;
  }
}  // namespace detail

/// ingest -> normalize with dev ranges -> optimize dev MSE -> MAP@k on test.
/// Nothing is written.
inline RunResult execute(const RunManifest &manifest) {
  manifest.validate();
  const auto dev_tables = detail::read_tables(manifest.dev_paths);
  const auto test_tables = detail::align_inducers(
      dev_tables, detail::read_tables(manifest.test_paths));
  const auto truth = read_ground_truth(manifest.truth_paths);
  const auto dev_raw = assemble(dev_tables, truth);
  const auto test_raw = assemble(test_tables, truth);

  RunResult result;
  result.params = fit_minmax(dev_raw);
  result.dev = apply_minmax(result.params, dev_raw);
  result.test = apply_minmax(result.params, test_raw);

  const auto cfg = config_for(manifest, result.dev.cols());
  const optim::MseObjective objective(result.dev);
  const auto started = std::chrono::steady_clock::now();
  result.report = optim::optimize(manifest.method, objective, cfg);
  result.eval = map_at_k(fuse(result.report.weights(), result.test),
                         result.test, manifest.k);
  result.wall_time = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - started)
                         .count();
  return result;
}

inline void write_artifacts(const RunManifest &manifest,
                            const RunResult &result) {
  detail::ArtifactWriter writer(manifest.out);
  const auto &names = result.dev.inducer_names();
  writer.add("weights.json",
             detail::dump(weights_to_json(result.report.weights(), names)));
  writer.add("normalization.json", detail::dump(to_json(result.params)));
  writer.add("report.json", detail::dump(optim::to_json(result.report)));
  writer.add("eval.json", detail::dump(to_json(result.eval)));
  writer.add("eval.csv", eval_csv(result.eval));
  writer.add("dev_matrix.csv", format_matrix_csv(result.dev));
  if (manifest.trace) writer.add("trace.csv", optim::trace_csv(result.report));

  RunManifest echo = manifest;
  echo.dev_paths = detail::absolute_all(manifest.dev_paths);
  echo.test_paths = detail::absolute_all(manifest.test_paths);
  echo.truth_paths = detail::absolute_all(manifest.truth_paths);
  echo.out = fs::absolute(manifest.out).lexically_normal();
  writer.add("manifest.json", detail::dump(to_json(echo)));
  writer.commit();
}

inline RunResult run(const RunManifest &manifest) {
  auto result = execute(manifest);
  write_artifacts(manifest, result);
  return result;
}

// ---------------------------------------------------------------------------
// Compare

struct SummaryRow {
  std::string method;
  double dev_mse = 0.0;
  double test_map = 0.0;
  std::size_t evaluations = 0;
  double wall_time = 0.0;
  fs::path run_dir;
};

struct Summary {
  std::size_t k = 10;
  std::vector<SummaryRow> rows;
};

inline std::string summary_csv(const Summary &summary) {
  std::string out = "method,dev_mse,test_map_at_" + std::to_string(summary.k)
                    + ",evaluations,wall_time\n";
  for (const auto &r : summary.rows)
    out += r.method + ',' + detail::format_double(r.dev_mse) + ','
           + detail::format_double(r.test_map) + ','
           + std::to_string(r.evaluations) + ','
           + detail::format_double(r.wall_time) + '\n';
  return out;
}

inline nlohmann::ordered_json to_json(const Summary &summary) {
  auto rows = nlohmann::ordered_json::array();
  for (const auto &r : summary.rows)
    rows.push_back({{"method", r.method},
                    {"dev_mse", r.dev_mse},
                    {"test_map_at_" + std::to_string(summary.k), r.test_map},
                    {"evaluations", r.evaluations},
                    {"wall_time", r.wall_time},
                    {"run_dir", r.run_dir.filename().string()}});
  nlohmann::ordered_json doc;
  doc["k"] = summary.k;
  doc["rows"] = std::move(rows);
  return doc;
}

/// Runs every manifest into `out_dir/<NN>-<method>/` and writes
/// summary.csv and summary.json. All manifests must share the same data.
inline Summary compare(std::vector<RunManifest> manifests,
                       const fs::path &out_dir) {
  if (manifests.empty()) throw UsageError("compare: no manifests given");
  const auto &first = manifests.front();
  for (const auto &m : manifests) {
    if (detail::absolute_all(m.dev_paths)
            != detail::absolute_all(first.dev_paths)
        || detail::absolute_all(m.test_paths)
               != detail::absolute_all(first.test_paths)
        || detail::absolute_all(m.truth_paths)
               != detail::absolute_all(first.truth_paths)
        || m.k != first.k)
      throw UsageError("compare: manifests do not share the same data and k");
  }

  Summary summary;
  summary.k = first.k;
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    auto &m = manifests[i];
    char prefix[16];
    std::snprintf(prefix, sizeof(prefix), "%02zu-", i + 1);
    m.out = out_dir / (prefix + std::string(optim::method_name(m.method)));
    const auto result = run(m);
    summary.rows.push_back({std::string(optim::method_name(m.method)),
                            result.report.best_objective,
                            result.eval.map_at_k,
                            result.report.function_evaluations
                                + result.report.gradient_evaluations,
                            result.wall_time, m.out});
  }
  detail::ArtifactWriter writer(out_dir);
  writer.add("summary.csv", summary_csv(summary));
  writer.add("summary.json", detail::dump(to_json(summary)));
  writer.commit();
  return summary;
}

}  // namespace latefusion

#endif  // LATEFUSION_PIPELINE_HPP_
