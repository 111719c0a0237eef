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

// Experiment plumbing: JSON documents, dataset IO, synthetic LASSO data,
// parallel sweeps and result emission. Compiled into dperm_harness.

#ifndef DPERM_HARNESS_HPP_
#define DPERM_HARNESS_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dperm/core.hpp"
#include "dperm/geometry.hpp"
#include "dperm/losses.hpp"
#include "dperm/potentials.hpp"
#include "dperm/privacy.hpp"
#include "dperm/solvers.hpp"
#include "json.hpp"

namespace dperm {

using Json = nlohmann::json;
using Data = Dataset<double>;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Configuration documents.

// {"kind": "l1_ball", "dim": 32, "radius": 1} and friends; "dim" falls back
// to `default_dim`. Polytopes take "vertices" (one vertex per row) or
// "vertices_csv" resolved against `base_dir`.
Body body_from_json(const Json& j, int default_dim = 0, const std::string& base_dir = "");
Json body_to_json(const Body& C);

Potential<double> potential_from_json(const Json& j, const Body& C);
LossSpec<double> loss_from_json(const Json& j);
PrivacyBudget budget_from_json(const Json& j);
Algorithm algorithm_from_string(const std::string& s);

// Solver document: {"algorithm", "body", "loss", "budget", "potential",
// "T", "T_cap", "md_step", "step_constant", "fw_step", "gaussian_width",
// "seed", ...}. `dim` fills in a missing body dimension.
SolverConfig<double> config_from_json(const Json& j, int dim, const std::string& base_dir = "");

// ---------------------------------------------------------------------------
// Datasets.

// Vertex list, one vertex per row, comma separated.
MatrixXd read_vertex_csv(const std::string& path);

// Columns x_1..x_p, y; an optional non-numeric header row is skipped.
Data read_dataset_csv(const std::string& path, bool lasso_profile);
void write_dataset_csv(const std::string& path, const Data& D);

// Binary rows: "DPRM", u32 version, u64 n, u64 p, then n rows of p + 1
// little-endian doubles (x then y).
Data read_dataset_binary(const std::string& path, bool lasso_profile);
void write_dataset_binary(const std::string& path, const Data& D);

// Dispatches on the ".bin" extension.
Data read_dataset(const std::string& path, bool lasso_profile);

enum class FeatureDist { kUniform, kRademacher };
enum class TargetSet { kL1Ball, kSimplex };

struct LassoGenerator {
  long n = 1000;
  int p = 10;
  int sparsity = 4;
  double noise = 0.1;
  std::uint64_t seed = 0;
  FeatureDist features = FeatureDist::kUniform;
  TargetSet target = TargetSet::kL1Ball;
  // ||theta*||_1; at most 1.
  double scale = 1.0;
};

struct GeneratedLasso {
  Data data;
  VectorXd theta_star;
};

// Features uniform on [-1, 1]^p (or random signs); theta* supported on the
// first `sparsity` coordinates; y = <x, theta*> + N(0, noise^2). Records with
// |y| > 1 are redrawn (up to 100 attempts each), never clipped.
GeneratedLasso generate_lasso(const LassoGenerator& g);

LassoGenerator generator_from_json(const Json& j);

// ---------------------------------------------------------------------------
// Sweeps.

struct RiskRecord {
  std::string solver;
  long n = 0;
  std::uint64_t seed = 0;
  double excess_risk = 0;
  double optimum = 0;
  long T = 0;
  double sigma = 0;
  double laplace_scale = 0;
  double wall_ms = 0;
  // Not part of the CSV.
  double zeta = 0;
  std::string trace;

  bool operator==(const RiskRecord& o) const {
    return solver == o.solver && n == o.n && seed == o.seed && excess_risk == o.excess_risk &&
           optimum == o.optimum && T == o.T && sigma == o.sigma &&
           laplace_scale == o.laplace_scale && wall_ms == o.wall_ms;
  }
};

struct CellFailure {
  std::string solver;
  long n = 0;
  std::uint64_t seed = 0;
  std::string message;
};

struct SolverEntry {
  std::string id;
  Json config;  // solver document, see config_from_json
};

struct ExperimentSpec {
  std::vector<SolverEntry> solvers;
  std::vector<long> n_sweep;
  std::vector<std::uint64_t> seeds;
  // Exactly one of generator / dataset_path.
  std::optional<LassoGenerator> generator;
  std::string dataset_path;
  bool lasso_profile = true;
  std::string output;
  int parallelism = 1;
  bool non_private = false;
  std::string base_dir;
};

// Parses and validates an experiment document (referenced files must exist).
ExperimentSpec experiment_from_json(const Json& j, const std::string& base_dir = "");

// Dataset of size n for a sweep: generated with seed stream_seed(seed, n), or
// the first n records of the dataset file.
Data sweep_dataset(const ExperimentSpec& spec, long n);

struct SweepResult {
  std::vector<RiskRecord> records;  // (solver, n, seed) order
  std::vector<CellFailure> failures;
};

// Runs every (solver, n, seed) cell on `parallelism` workers. A failing cell
// is recorded and the sweep continues. The record order and content do not
// depend on the worker count (wall_ms aside). `on_record` is called from a
// single emitter at a time.
SweepResult run_sweep(const ExperimentSpec& spec,
                      const std::function<void(const RiskRecord&)>& on_record = {});

struct CellSummary {
  std::string solver;
  long n = 0;
  double mean = 0;
  double std_error = 0;
  long count = 0;
};

// Ordinary least squares of log(mean risk) on log(n).
struct LogLogFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;  // NaN with fewer than three points
  long points = 0;
};

LogLogFit fit_loglog(const std::vector<double>& n, const std::vector<double>& risk);

struct Summary {
  std::vector<CellSummary> cells;
  std::vector<std::pair<std::string, LogLogFit>> fits;
};

Summary summarize(const std::vector<RiskRecord>& records);

// ---------------------------------------------------------------------------
// Emission.

inline constexpr const char* kRecordsHeader =
    "solver,n,seed,excess_risk,optimum,T,sigma,laplace_scale,wall_ms";

void write_records_csv(const std::string& path, const std::vector<RiskRecord>& records);
std::vector<RiskRecord> read_records_csv(const std::string& path);
void write_records_jsonl(const std::string& path, const std::vector<RiskRecord>& records);
void write_failures_csv(const std::string& path, const std::vector<CellFailure>& failures);
Json summary_to_json(const Summary& s, std::size_t failures = 0);
Json report_to_json(const SolverReport<double>& rep);

}  // namespace dperm

#endif  // DPERM_HARNESS_HPP_
