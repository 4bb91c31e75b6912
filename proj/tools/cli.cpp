/*
 * Copyright (c) 2026, The kstarnn Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "kstar/baselines.hpp"
#include "kstar/dataset_io.hpp"
#include "kstar/harness.hpp"
#include "kstar/oracle.hpp"
#include "kstar/report.hpp"
#include "kstar/solver.hpp"

namespace kstar::cli {

namespace {

using Json = nlohmann::ordered_json;

/// Input problem the user can fix; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataOptions {
  std::string path;
  std::optional<std::size_t> label_column;
  bool header = false;
  std::string label_map;
  std::string metric = "euclidean";

  void attach(CLI::App& cmd, bool required) {
    auto* opt = cmd.add_option("--data", path, "CSV file: feature columns plus one label column");
    if (required) opt->required();
    cmd.add_option("--label-column", label_column, "Zero-based label column (default: last)");
    cmd.add_flag("--header", header, "First non-blank row is a header");
    cmd.add_option("--label-map", label_map, "Categorical labels, e.g. N=0,O=1");
    cmd.add_option("--metric", metric, "euclidean | manhattan | chebyshev");
  }

  LabeledDataset load() const {
    CsvOptions o;
    o.label_column = label_column;
    o.has_header = header;
    if (!label_map.empty()) o.label_map = parse_label_map(label_map);
    return load_csv(path, o);
  }

  MetricKind metric_kind() const {
    if (auto m = parse_metric(metric)) return *m;
    throw UsageError("unknown metric '" + metric + "'");
  }
};

struct NoiseOptions {
  std::optional<double> ratio;
  std::optional<double> lipschitz;
  std::optional<double> noise_bound;
  std::optional<double> delta;

  void attach(CLI::App& cmd) {
    auto* r = cmd.add_option("--ratio", ratio, "Lipschitz-to-noise ratio L/C");
    auto* l = cmd.add_option("--lipschitz", lipschitz, "Lipschitz constant L");
    auto* b = cmd.add_option("--noise-bound", noise_bound, "Label noise bound b (default 1)");
    auto* d = cmd.add_option("--delta", delta, "Failure probability delta (default 0.05)");
    r->excludes(l)->excludes(b)->excludes(d);
  }

  bool has_model() const { return ratio || lipschitz; }

  NoiseModel model() const {
    if (ratio) return NoiseModel::from_ratio(*ratio);
    if (lipschitz) {
      return NoiseModel::from_parameters(*lipschitz, noise_bound.value_or(kDefaultNoiseBound),
                                         delta.value_or(kDefaultDelta));
    }
    throw UsageError("either --ratio or --lipschitz is required");
  }

  /// With beta given directly only C matters, so any ratio will do.
  NoiseModel model_or_scale_only() const {
    if (has_model()) return model();
    return NoiseModel::from_ratio(1.0, noise_bound.value_or(kDefaultNoiseBound),
                                  delta.value_or(kDefaultDelta));
  }
};

Json solution_json(const KStarSolution& s) {
  return Json{
      {"kstar", s.kstar},
      {"lambda", s.lambda},
      {"bound", confidence_bound(s)},
      {"confidence_scale", s.confidence_scale},
      {"objective", s.objective},
  };
}

std::vector<double> scatter(std::span<const double> sorted, std::span<const std::size_t> order) {
  std::vector<double> out(sorted.size());
  for (std::size_t j = 0; j < sorted.size(); ++j) out[order[j]] = sorted[j];
  return out;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// --- solve -----------------------------------------------------------------

struct SolveCommand {
  std::optional<std::string> beta;
  std::optional<std::string> query;
  DataOptions data;
  NoiseOptions noise;
  bool oracle = false;
  std::size_t oracle_steps = 100000;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("solve", "Optimal weights, k* and confidence bound for one query");
    data.attach(*cmd, false);
    auto* q = cmd->add_option("--query", query, "Query point, comma-separated (with --data)");
    cmd->add_option("--beta", beta, "Scaled distances, comma-separated")
        ->excludes(cmd->get_option("--data"))
        ->excludes(q);
    noise.attach(*cmd);
    cmd->add_flag("--oracle", oracle, "Also run the enumeration and projected-gradient oracles");
    cmd->add_option("--oracle-steps", oracle_steps, "Projected-gradient step budget")
        ->check(CLI::PositiveNumber);
  }

  Json run() const {
    BetaVector beta_vec;
    std::optional<LabeledDataset> ds;
    const NoiseModel model = beta ? noise.model_or_scale_only() : noise.model();

    if (beta) {
      beta_vec = BetaVector::from_values(parse_real_list(*beta));
    } else {
      if (data.path.empty() || !query) throw UsageError("solve needs --beta, or --data with --query");
      ds = data.load();
      beta_vec = scale_distances(profile(*ds, parse_real_list(*query), data.metric_kind()), model);
    }
    const auto sol = solve(beta_vec, ds ? ds->labels() : std::span<const double>{}, model);

    Json out = solution_json(sol);
    if (ds) out["prediction"] = sol.prediction;
    out["weights"] = sol.weights;

    if (oracle) {
      const auto en = oracle::solve_by_enumeration(beta_vec.beta);
      const auto gd = oracle::solve_by_projected_gradient(beta_vec.beta, oracle_steps, 1e-12);
      const auto en_w = scatter(en.weights, beta_vec.order);
      const auto gd_w = scatter(gd.weights, beta_vec.order);
      const double dev = std::max(max_abs_diff(sol.weights, en_w), std::abs(sol.lambda - en.objective));
      out["oracle"] = Json{
          {"enumeration", Json{{"objective", en.objective}, {"kstar", en.support}, {"weights", en_w}}},
          {"gradient", Json{{"objective", gd.objective},
                            {"converged", gd.converged},
                            {"steps", gd.steps_taken},
                            {"weights", gd_w}}},
          {"max_deviation", dev},
          {"gradient_gap", gd.objective - sol.lambda},
      };
    }
    return out;
  }
};

// --- predict ---------------------------------------------------------------

struct PredictCommand {
  DataOptions data;
  std::optional<std::string> query;
  std::optional<std::string> queries;
  bool queries_header = false;
  std::string method = "kstar";
  std::optional<std::size_t> k;
  std::optional<double> sigma;
  std::string kernel = "gaussian";
  NoiseOptions noise;

  void attach(CLI::App& app) {
    auto* cmd = app.add_subcommand("predict", "Predict labels of query points");
    data.attach(*cmd, true);
    auto* q = cmd->add_option("--query", query, "Query point, comma-separated");
    auto* qs = cmd->add_option("--queries", queries, "CSV of query points (features only)");
    q->excludes(qs);
    cmd->add_flag("--queries-header", queries_header, "Query CSV has a header row");
    cmd->add_option("--method", method, "kstar | knn | nw");
    cmd->add_option("--k", k, "Neighbor count for knn");
    cmd->add_option("--sigma", sigma, "Kernel bandwidth for nw");
    cmd->add_option("--kernel", kernel, "gaussian | epanechnikov | triangular");
    noise.attach(*cmd);
  }

  Json predict_one(const LabeledDataset& ds, FeatureView q, MetricKind metric) const {
    Json out{{"method", method}};
    if (method == "kstar") {
      const auto sol = kstar::predict(ds, q, noise.model(), metric);
      out["prediction"] = sol.prediction;
      out["kstar"] = sol.kstar;
      out["lambda"] = sol.lambda;
      out["bound"] = confidence_bound(sol);
    } else if (method == "knn") {
      if (!k) throw UsageError("knn needs --k");
      out["prediction"] = knn_predict(ds, q, *k, metric);
      out["k"] = *k;
    } else if (method == "nw") {
      if (!sigma) throw UsageError("nw needs --sigma");
      const auto variant = parse_kernel(kernel);
      if (!variant) throw UsageError("unknown kernel '" + kernel + "'");
      out["prediction"] = nw_predict(ds, q, Kernel(*variant, *sigma), metric);
      out["kernel"] = kernel;
      out["sigma"] = *sigma;
    } else {
      throw UsageError("unknown method '" + method + "'");
    }
    return out;
  }

  Json run() const {
    const auto ds = data.load();
    const auto metric = data.metric_kind();
    if (query) return predict_one(ds, parse_real_list(*query), metric);
    if (!queries) throw UsageError("predict needs --query or --queries");
    Json list = Json::array();
    for (const auto& row : load_query_rows(*queries, queries_header)) {
      list.push_back(predict_one(ds, row, metric));
    }
    return Json{{"method", method}, {"predictions", std::move(list)}};
  }
};

// --- cv / benchmark ----------------------------------------------------------

struct ExperimentCommand {
  DataOptions data;
  std::uint64_t seed = 0;
  std::size_t folds = 5;
  std::optional<std::string> grid_k;
  std::optional<std::string> grid_sigma;
  std::optional<std::string> grid_ratio;
  std::string methods = "knn,nw,kstar";
  bool normalize = false;
  std::size_t resamples = 10000;
  std::size_t repeats = 20;
  std::optional<std::string> output;
  bool quiet = false;

  CLI::App* attach(CLI::App& app, const std::string& name, const std::string& help,
                   bool with_repeats) {
    auto* cmd = app.add_subcommand(name, help);
    data.attach(*cmd, true);
    cmd->add_option("--seed", seed, "Seed for the split, folds and permutation test");
    cmd->add_option("--folds", folds, "Cross-validation folds")->check(CLI::PositiveNumber);
    cmd->add_option("--grid-k", grid_k, "k values for knn (default 1..10)");
    cmd->add_option("--grid-sigma", grid_sigma, "Bandwidths for nw");
    cmd->add_option("--grid-ratio", grid_ratio, "L/C values for kstar");
    cmd->add_option("--methods", methods,
                    "Comma list of kstar, knn, nw, nw-gaussian, nw-epanechnikov, nw-triangular");
    cmd->add_flag("--normalize", normalize, "Min-max scale features (fitted on the validation half)");
    cmd->add_option("--resamples", resamples, "Permutation-test resamples")->check(CLI::PositiveNumber);
    if (with_repeats) {
      cmd->add_option("--repeats", repeats, "Number of seeds (seed, seed+1, ...)")
          ->check(CLI::PositiveNumber);
    }
    cmd->add_option("--output", output, "Write JSON here instead of stdout");
    cmd->add_flag("--quiet", quiet, "Do not print the text table to stderr");
    return cmd;
  }

  ExperimentSpec spec() const {
    ExperimentSpec s;
    s.metric = data.metric_kind();
    s.seed = seed;
    s.folds = folds;
    s.normalize = normalize;
    s.permutation_resamples = resamples;
    if (grid_k) {
      s.grid_k.clear();
      for (double v : parse_real_list(*grid_k)) {
        if (!(v >= 1.0 && v == std::floor(v))) throw UsageError("--grid-k values must be integers >= 1");
        s.grid_k.push_back(static_cast<std::size_t>(v));
      }
    }
    if (grid_sigma) s.grid_sigma = parse_real_list(*grid_sigma);
    if (grid_ratio) s.grid_ratio = parse_real_list(*grid_ratio);
    s.methods.clear();
    std::string_view rest = methods;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto name = rest.substr(0, comma);
      const auto m = Method::parse(name);
      if (!m) throw UsageError("unknown method '" + std::string(name) + "'");
      s.methods.push_back(*m);
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    }
    s.validate();
    return s;
  }

  std::string dataset_name() const { return std::filesystem::path(data.path).filename().string(); }

  void emit(const std::string& json, const std::string& table, std::ostream& out,
            std::ostream& err) const {
    if (output) {
      std::ofstream f(*output, std::ios::binary);
      if (!f) throw UsageError("cannot write '" + *output + "'");
      f << json << "\n";
    } else {
      out << json << "\n";
    }
    if (!quiet) err << table;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive nearest-neighbor estimation with per-query weights and confidence bounds",
               "kstar"};
  app.require_subcommand(1, 1);

  SolveCommand solve_cmd;
  PredictCommand predict_cmd;
  ExperimentCommand cv_cmd;
  ExperimentCommand bench_cmd;
  solve_cmd.attach(app);
  predict_cmd.attach(app);
  auto* cv = cv_cmd.attach(app, "cv", "One split: cross-validate every method, then score on the test half",
                           false);
  auto* bench = bench_cmd.attach(app, "benchmark", "Repeat the cv protocol over several seeds", true);

  std::vector<const char*> argv{"kstar"};
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (app.got_subcommand("solve")) {
      out << solve_cmd.run().dump(2) << "\n";
    } else if (app.got_subcommand("predict")) {
      out << predict_cmd.run().dump(2) << "\n";
    } else if (cv->parsed()) {
      const auto ds = cv_cmd.data.load();
      const auto report = run_experiment(ds, cv_cmd.spec(), cv_cmd.dataset_name());
      cv_cmd.emit(to_json(report), to_table(report), out, err);
    } else if (bench->parsed()) {
      const auto ds = bench_cmd.data.load();
      const auto report = run_benchmark(ds, bench_cmd.spec(), bench_cmd.repeats, bench_cmd.dataset_name());
      bench_cmd.emit(to_json(report), to_table(report), out, err);
    }
  } catch (const SolverInvariantError& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace kstar::cli
