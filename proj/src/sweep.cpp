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

#include <atomic>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "dperm/harness.hpp"
#include "dperm/oracle.hpp"

namespace dperm {
namespace {

namespace fs = std::filesystem;

bool needs_width(const SolverConfig<double>& cfg) {
  return cfg.algorithm == Algorithm::kNoisyMD || cfg.algorithm == Algorithm::kStronglyConvexMD ||
         cfg.algorithm == Algorithm::kFWGeneral;
}

}  // namespace

ExperimentSpec experiment_from_json(const Json& j, const std::string& base_dir) {
  require(j.is_object(), "experiment must be a JSON object");
  if (j.contains("schema_version"))
    require(j.at("schema_version").get<int>() == kSchemaVersion, "unsupported experiment schema_version");
  ExperimentSpec spec;
  spec.base_dir = base_dir;
  const Json default_budget = j.value("budget", Json::object());
  std::set<std::string> ids;
  for (const Json& s : j.at("solvers")) {
    SolverEntry e;
    e.config = s;
    if (!e.config.contains("budget")) e.config["budget"] = default_budget;
    e.id = s.value("id", s.at("algorithm").get<std::string>());
    require(e.id.find(',') == std::string::npos, "solver id must not contain commas");
    require(ids.insert(e.id).second, "duplicate solver id '" + e.id + "'");
    algorithm_from_string(s.at("algorithm").get<std::string>());
    spec.solvers.push_back(std::move(e));
  }
  for (const Json& n : j.at("n_sweep")) spec.n_sweep.push_back(n.get<long>());
  const Json& seeds = j.at("seeds");
  if (seeds.is_array()) {
    for (const Json& s : seeds) spec.seeds.push_back(s.get<std::uint64_t>());
  } else {
    const std::uint64_t start = seeds.value("start", std::uint64_t(0));
    const long count = seeds.at("count").get<long>();
    for (long i = 0; i < count; ++i) spec.seeds.push_back(start + std::uint64_t(i));
  }
  require(!spec.solvers.empty(), "experiment: no solvers");
  require(!spec.n_sweep.empty(), "experiment: empty n_sweep");
  require(!spec.seeds.empty(), "experiment: no seeds");
  for (long n : spec.n_sweep) require(n >= 1, "experiment: n values must be positive");
  const Json& ds = j.at("dataset");
  spec.lasso_profile = ds.value("lasso_profile", true);
  if (ds.contains("generator")) {
    spec.generator = generator_from_json(ds.at("generator"));
  } else {
    spec.dataset_path = ds.at("path").get<std::string>();
    if (!base_dir.empty() && fs::path(spec.dataset_path).is_relative())
      spec.dataset_path = (fs::path(base_dir) / spec.dataset_path).string();
    require(fs::exists(spec.dataset_path), "experiment: dataset " + spec.dataset_path + " does not exist");
  }
  for (const SolverEntry& e : spec.solvers) {
    const Json& b = e.config.at("body");
    if (b.contains("vertices_csv")) {
      fs::path v = b.at("vertices_csv").get<std::string>();
      if (!base_dir.empty() && v.is_relative()) v = fs::path(base_dir) / v;
      require(fs::exists(v), "experiment: vertex file " + v.string() + " does not exist");
    }
  }
  spec.output = j.value("output", std::string());
  spec.parallelism = j.value("parallelism", 1);
  spec.non_private = j.value("non_private", false);
  require(spec.parallelism >= 1, "experiment: parallelism must be >= 1");
  return spec;
}

Data sweep_dataset(const ExperimentSpec& spec, long n) {
  if (spec.generator) {
    LassoGenerator g = *spec.generator;
    g.n = n;
    g.seed = stream_seed(spec.generator->seed, std::uint64_t(n));
    return generate_lasso(g).data;
  }
  const Data full = read_dataset(spec.dataset_path, spec.lasso_profile);
  require(n <= full.n(), "sweep: n = " + std::to_string(n) + " exceeds the " +
                             std::to_string(full.n()) + " records of " + spec.dataset_path);
  return Data(full.X().topRows(n), full.y().head(n), spec.lasso_profile);
}

SweepResult run_sweep(const ExperimentSpec& spec,
                      const std::function<void(const RiskRecord&)>& on_record) {
  // Datasets, one per n, built up front and shared read-only.
  std::vector<Data> data;
  if (spec.generator) {
    for (long n : spec.n_sweep) data.push_back(sweep_dataset(spec, n));
  } else {
    const Data full = read_dataset(spec.dataset_path, spec.lasso_profile);
    for (long n : spec.n_sweep) {
      require(n <= full.n(), "sweep: n = " + std::to_string(n) + " exceeds the dataset size");
      data.emplace_back(full.X().topRows(n), full.y().head(n), spec.lasso_profile);
    }
  }
  const int p = int(data.front().p());

  // Solver configs, with Gaussian widths estimated once per solver.
  std::vector<std::optional<SolverConfig<double>>> configs;
  std::vector<std::string> config_errors;
  for (const SolverEntry& e : spec.solvers) {
    try {
      SolverConfig<double> cfg = config_from_json(e.config, p, spec.base_dir);
      if (spec.non_private) cfg.budget = cfg.budget.without_noise();
      if (needs_width(cfg) && !cfg.gaussian_width) {
        const Body B = cfg.algorithm == Algorithm::kNoisyMD
                           ? (cfg.aux_body ? *cfg.aux_body : symmetric_hull(cfg.body))
                           : cfg.body;
        cfg.gaussian_width = gaussian_width_mc(B, cfg.width_samples, cfg.width_seed).mean;
      }
      configs.emplace_back(std::move(cfg));
      config_errors.emplace_back();
    } catch (const std::exception& ex) {
      configs.emplace_back(std::nullopt);
      config_errors.emplace_back(ex.what());
    }
  }

  const std::size_t ns = spec.n_sweep.size(), nk = spec.seeds.size();
  const std::size_t cells = spec.solvers.size() * ns * nk;
  std::vector<std::optional<RiskRecord>> done(cells);
  std::vector<std::optional<CellFailure>> failed(cells);
  OracleCache oracles;
  std::mutex emit_mu;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= cells) return;
      const std::size_t si = c / (ns * nk), ni = (c / nk) % ns, ki = c % nk;
      const SolverEntry& entry = spec.solvers[si];
      const long n = spec.n_sweep[ni];
      const std::uint64_t seed = spec.seeds[ki];
      try {
        if (!configs[si]) throw InvalidArgument(config_errors[si]);
        SolverConfig<double> cfg = *configs[si];
        cfg.seed = seed;
        const Data& D = data[ni];
        const auto sol = oracles.get(cfg.body, cfg.loss, D);
        const SolverReport<double> rep = solve(cfg, D);
        RiskRecord r;
        r.solver = entry.id;
        r.n = n;
        r.seed = seed;
        r.excess_risk = excess_risk(rep.theta, *sol, cfg.loss, D, cfg.body);
        r.optimum = sol->optimum_value;
        r.T = rep.resolved.T;
        r.sigma = rep.noise_plan.sigma;
        r.laplace_scale = rep.noise_plan.laplace_scale;
        r.zeta = rep.noise_plan.zeta;
        r.wall_ms = rep.wall_ms;
        r.trace = rep.noise_plan.trace;
        if (!std::isfinite(r.excess_risk)) throw ConvergenceError("non-finite excess risk");
        {
          std::lock_guard<std::mutex> lock(emit_mu);
          if (on_record) on_record(r);
        }
        done[c] = std::move(r);
      } catch (const std::exception& ex) {
        failed[c] = CellFailure{entry.id, n, seed, ex.what()};
      }
    }
  };

  const int workers = std::max(1, std::min<int>(spec.parallelism, int(cells)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  SweepResult out;
  for (std::size_t c = 0; c < cells; ++c) {
    if (done[c]) out.records.push_back(std::move(*done[c]));
    if (failed[c]) out.failures.push_back(std::move(*failed[c]));
  }
  return out;
}

LogLogFit fit_loglog(const std::vector<double>& n, const std::vector<double>& risk) {
  require(n.size() == risk.size(), "fit_loglog: size mismatch");
  LogLogFit f;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] > 0 && risk[i] > 0 && std::isfinite(risk[i])) {
      x.push_back(std::log(n[i]));
      y.push_back(std::log(risk[i]));
    }
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  f.points = long(x.size());
  f.slope = f.intercept = f.slope_stderr = nan;
  if (x.size() < 2) return f;
  const double m = double(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (x.size() >= 3) {
    double sse = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double e = y[i] - f.intercept - f.slope * x[i];
      sse += e * e;
    }
    f.slope_stderr = std::sqrt(sse / (m - 2) / sxx);
  }
  return f;
}

Summary summarize(const std::vector<RiskRecord>& records) {
  Summary s;
  std::vector<std::string> order;
  std::map<std::string, std::map<long, std::vector<double>>> groups;
  for (const RiskRecord& r : records) {
    if (!groups.count(r.solver)) order.push_back(r.solver);
    groups[r.solver][r.n].push_back(r.excess_risk);
  }
  for (const std::string& solver : order) {
    std::vector<double> ns, means;
    for (const auto& [n, v] : groups[solver]) {
      CellSummary c;
      c.solver = solver;
      c.n = n;
      c.count = long(v.size());
      double sum = 0;
      for (double x : v) sum += x;
      c.mean = sum / double(v.size());
      if (v.size() >= 2) {
        double ss = 0;
        for (double x : v) ss += (x - c.mean) * (x - c.mean);
        c.std_error = std::sqrt(ss / double(v.size() - 1) / double(v.size()));
      } else {
        c.std_error = std::numeric_limits<double>::quiet_NaN();
      }
      ns.push_back(double(n));
      means.push_back(c.mean);
      s.cells.push_back(c);
    }
    s.fits.emplace_back(solver, fit_loglog(ns, means));
  }
  return s;
}

}  // namespace dperm
