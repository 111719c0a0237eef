// Copyright 2026 The dperm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// dperm: command-line front end.
//
//   dperm width <body.json> [--samples N] [--seed S] [--output FILE]
//   dperm solve <config.json> <data.csv|data.bin> [--seed S] [--output FILE] [--non-private]
//   dperm bench <experiment.json> [--output DIR] [--parallelism K] [--seed S] [--non-private]

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "dperm/harness.hpp"
#include "dperm/oracle.hpp"

namespace fs = std::filesystem;
using dperm::Json;

namespace {

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw dperm::InvalidArgument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw dperm::InvalidArgument(path + ": " + e.what());
  }
}

std::string dir_of(const std::string& path) { return fs::absolute(path).parent_path().string(); }

void emit(const Json& j, const std::string& output) {
  if (output.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  const fs::path parent = fs::path(output).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(output);
  if (!out) throw dperm::InvalidArgument("cannot write " + output);
  out << j.dump(2) << '\n';
}

int cmd_width(const std::string& body_path, long samples, std::optional<std::uint64_t> seed,
              const std::string& output) {
  const Json doc = load_json(body_path);
  const Json& b = doc.contains("body") ? doc.at("body") : doc;
  const dperm::Body C = dperm::body_from_json(b, 0, dir_of(body_path));
  const std::uint64_t s = seed.value_or(doc.value("seed", std::uint64_t(0)));
  const dperm::WidthEstimate w = dperm::gaussian_width_mc(C, samples, s);
  emit(Json{{"schema_version", dperm::kSchemaVersion},
            {"body", dperm::body_to_json(C)},
            {"gaussian_width", w.mean},
            {"std_error", w.std_error},
            {"samples", w.samples},
            {"seed", w.seed}},
       output);
  return 0;
}

int cmd_solve(const std::string& config_path, const std::string& data_path,
              std::optional<std::uint64_t> seed, const std::string& output, bool non_private) {
  const Json doc = load_json(config_path);
  const bool lasso = doc.value("lasso_profile", false);
  const dperm::Data D = dperm::read_dataset(data_path, lasso);
  dperm::SolverConfig<double> cfg = dperm::config_from_json(doc, int(D.p()), dir_of(config_path));
  if (seed) cfg.seed = *seed;
  if (non_private) cfg.budget = cfg.budget.without_noise();
  dperm::SolverReport<double> rep = dperm::solve(cfg, D);
  const dperm::OracleSolution<double> sol = dperm::solve_exact(cfg.body, cfg.loss, D);
  rep.excess_risk = dperm::excess_risk(rep.theta, sol, cfg.loss, D, cfg.body);
  Json j = dperm::report_to_json(rep);
  j["n"] = D.n();
  j["p"] = D.p();
  j["optimum"] = sol.optimum_value;
  j["oracle"] = {{"method", sol.method},
                 {"gap_certificate", sol.gap_certificate},
                 {"tolerance", sol.tolerance},
                 {"iterations", sol.iterations}};
  if (sol.cross_check_delta) j["oracle"]["cross_check_delta"] = *sol.cross_check_delta;
  emit(j, output);
  return 0;
}

int cmd_bench(const std::string& exp_path, std::string output, std::optional<int> parallelism,
              std::optional<std::uint64_t> seed, bool non_private) {
  const Json doc = load_json(exp_path);
  dperm::ExperimentSpec spec = dperm::experiment_from_json(doc, dir_of(exp_path));
  if (parallelism) {
    if (*parallelism < 1) throw dperm::InvalidArgument("--parallelism must be >= 1");
    spec.parallelism = *parallelism;
  }
  if (seed)  // shift the seed list to start at --seed
    for (std::size_t i = 0; i < spec.seeds.size(); ++i) spec.seeds[i] = *seed + i;
  if (non_private) spec.non_private = true;
  if (output.empty()) output = spec.output;
  if (output.empty()) output = "bench_out";
  fs::create_directories(output);

  const dperm::SweepResult res = dperm::run_sweep(spec);
  const dperm::Summary sum = dperm::summarize(res.records);
  const fs::path dir(output);
  dperm::write_records_csv((dir / "records.csv").string(), res.records);
  dperm::write_records_jsonl((dir / "records.jsonl").string(), res.records);
  dperm::write_failures_csv((dir / "failures.csv").string(), res.failures);
  emit(dperm::summary_to_json(sum, res.failures.size()), (dir / "summary.json").string());

  std::printf("%-28s %10s %14s %12s %6s\n", "solver", "n", "mean_risk", "std_error", "count");
  for (const dperm::CellSummary& c : sum.cells)
    std::printf("%-28s %10ld %14.6g %12.4g %6ld\n", c.solver.c_str(), c.n, c.mean, c.std_error, c.count);
  for (const auto& [solver, f] : sum.fits)
    std::printf("%-28s slope %.4f (stderr %.4f, %ld points)\n", solver.c_str(), f.slope,
                f.slope_stderr, f.points);
  for (const dperm::CellFailure& f : res.failures)
    std::fprintf(stderr, "dperm: cell (%s, n=%ld, seed=%llu) failed: %s\n", f.solver.c_str(), f.n,
                 static_cast<unsigned long long>(f.seed), f.message.c_str());
  std::printf("wrote %zu records to %s\n", res.records.size(), output.c_str());
  return res.records.empty() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dperm: differentially private empirical risk minimization"};
  app.require_subcommand(1);

  std::string body_path, config_path, data_path, exp_path, output;
  long samples = 100000;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  bool non_private = false;

  CLI::App* width = app.add_subcommand("width", "Monte Carlo Gaussian width of a body");
  width->add_option("body", body_path, "Body JSON document")->required()->check(CLI::ExistingFile);
  width->add_option("--samples", samples, "Number of Gaussian samples")->check(CLI::PositiveNumber);
  width->add_option("--seed", seed, "Sampling seed");
  width->add_option("--output", output, "Write JSON here instead of stdout");

  CLI::App* solve = app.add_subcommand("solve", "Run one solver and report its excess risk");
  solve->add_option("config", config_path, "Solver JSON document")->required()->check(CLI::ExistingFile);
  solve->add_option("data", data_path, "Dataset (.csv or .bin)")->required()->check(CLI::ExistingFile);
  solve->add_option("--seed", seed, "Noise seed (overrides the config)");
  solve->add_option("--output", output, "Write JSON here instead of stdout");
  solve->add_flag("--non-private", non_private, "Disable all noise");

  CLI::App* bench = app.add_subcommand("bench", "Run an experiment sweep");
  bench->add_option("experiment", exp_path, "Experiment JSON document")->required()->check(CLI::ExistingFile);
  bench->add_option("--output", output, "Output directory");
  bench->add_option("--parallelism", parallelism, "Worker threads");
  bench->add_option("--seed", seed, "First seed of the sweep's seed list");
  bench->add_flag("--non-private", non_private, "Disable all noise");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*width) return cmd_width(body_path, samples, seed, output);
    if (*solve) return cmd_solve(config_path, data_path, seed, output, non_private);
    if (*bench) return cmd_bench(exp_path, output, parallelism, seed, non_private);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dperm: error: %s\n", e.what());
    return 1;
  }
  return 0;
}
