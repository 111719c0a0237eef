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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "dperm/harness.hpp"

namespace dperm {
namespace {

namespace fs = std::filesystem;

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).string();
}

VectorXd vector_from_json(const Json& j, const char* what) {
  require(j.is_array(), std::string(what) + " must be an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(Eigen::Index(i)) = j[i].get<double>();
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* b = s.c_str();
  while (*b == ' ' || *b == '\t') ++b;
  if (*b == '\0') return false;
  char* end = nullptr;
  v = std::strtod(b, &end);
  while (end && (*end == ' ' || *end == '\t')) ++end;
  return end && *end == '\0';
}

// Numeric rows of a CSV file; a leading non-numeric row is treated as a
// header and skipped.
std::vector<std::vector<double>> read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const std::vector<std::string> fields = split_csv_line(line);
    std::vector<double> row(fields.size());
    bool ok = true;
    for (std::size_t i = 0; i < fields.size() && ok; ++i) ok = parse_double(fields[i], row[i]);
    if (!ok) {
      if (rows.empty() && lineno == 1) continue;  // header
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": non-numeric field");
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidArgument(path + ":" + std::to_string(lineno) + ": expected " +
                            std::to_string(rows.front().size()) + " fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

// ---------------------------------------------------------------------------
// Configuration documents.

Body body_from_json(const Json& j, int default_dim, const std::string& base_dir) {
  require(j.is_object(), "body must be a JSON object");
  const std::string kind = j.at("kind").get<std::string>();
  const int p = j.value("dim", default_dim);
  const double r = j.value("radius", 1.0);
  if (kind == "polytope") {
    MatrixXd V;
    if (j.contains("vertices")) {
      const Json& rows = j.at("vertices");
      require(rows.is_array() && !rows.empty(), "polytope: vertices must be a nonempty array");
      const std::size_t dim = rows[0].size();
      V.resize(Eigen::Index(dim), Eigen::Index(rows.size()));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        require(rows[k].size() == dim, "polytope: vertices disagree on dimension");
        V.col(Eigen::Index(k)) = vector_from_json(rows[k], "vertex");
      }
    } else {
      V = read_vertex_csv(resolve(j.at("vertices_csv").get<std::string>(), base_dir));
    }
    return Body::polytope(V);
  }
  if (kind == "box") return Body::box(vector_from_json(j.at("lo"), "box lo"), vector_from_json(j.at("hi"), "box hi"));
  require(p >= 1, "body: missing dimension for " + kind);
  if (kind == "l2_ball") return Body::l2_ball(p, r);
  if (kind == "l1_ball") return Body::l1_ball(p, r);
  if (kind == "simplex") return Body::simplex(p);
  if (kind == "grouped_l1_ball") return Body::grouped_l1_ball(p, r, j.at("group_size").get<int>());
  throw InvalidArgument("unknown body kind '" + kind + "'");
}

Json body_to_json(const Body& C) {
  Json j{{"kind", to_string(C.kind())}, {"dim", C.dim()}};
  switch (C.kind()) {
    case BodyKind::kL2Ball:
    case BodyKind::kL1Ball:
      j["radius"] = C.radius();
      break;
    case BodyKind::kGroupedL1Ball:
      j["radius"] = C.radius();
      j["group_size"] = C.group_size();
      break;
    case BodyKind::kBox:
      j["lo"] = std::vector<double>(C.lo().data(), C.lo().data() + C.dim());
      j["hi"] = std::vector<double>(C.hi().data(), C.hi().data() + C.dim());
      break;
    case BodyKind::kPolytope: {
      Json rows = Json::array();
      const MatrixXd& V = C.vertex_matrix();
      for (Eigen::Index k = 0; k < V.cols(); ++k)
        rows.push_back(std::vector<double>(V.col(k).data(), V.col(k).data() + V.rows()));
      j["vertices"] = rows;
      break;
    }
    case BodyKind::kSimplex:
      break;
  }
  return j;
}

Potential<double> potential_from_json(const Json& j, const Body& C) {
  const std::string kind = j.is_string() ? j.get<std::string>() : j.at("kind").get<std::string>();
  const Json opts = j.is_object() ? j : Json::object();
  if (kind == "squared_l2") {
    const VectorXd c = opts.contains("center") ? vector_from_json(opts.at("center"), "center")
                                               : canonical_point(C);
    return Potential<double>::squared_l2(c);
  }
  if (kind == "negative_entropy") return Potential<double>::negative_entropy(C.dim(), opts.value("shifted", true));
  if (kind == "polytope_qnorm") return Potential<double>::polytope_qnorm(vertices(C), opts.value("q", 0.0));
  if (kind == "grouped_l1") return Potential<double>::grouped_l1(C.dim(), opts.value("group_size", int(C.group_size())));
  throw InvalidArgument("unknown potential kind '" + kind + "'");
}

LossSpec<double> loss_from_json(const Json& j) {
  const std::string kind = j.value("kind", std::string("squared_error"));
  const double ridge = j.value("ridge", 0.0);
  LossSpec<double> s;
  if (kind == "squared_error") {
    s = LossSpec<double>::squared_error(ridge);
  } else if (kind == "huber") {
    s = LossSpec<double>::huber(j.at("delta").get<double>(), ridge);
  } else {
    throw InvalidArgument("unknown loss kind '" + kind + "' (custom losses are library-only)");
  }
  if (j.contains("constants")) {
    const Json& c = j.at("constants");
    auto opt = [&](const char* key, std::optional<double>& dst) {
      if (c.contains(key)) {
        const double v = c.at(key).get<double>();
        require(v >= 0, std::string("loss constant ") + key + " must be nonnegative");
        dst = v;
      }
    };
    opt("l1_lipschitz", s.constants.l1_lipschitz);
    opt("l2_lipschitz", s.constants.l2_lipschitz);
    opt("curvature", s.constants.curvature);
    opt("lambda_min", s.constants.lambda_min);
    opt("lambda_max", s.constants.lambda_max);
    opt("strong_convexity", s.constants.strong_convexity);
  }
  return s;
}

PrivacyBudget budget_from_json(const Json& j) {
  if (j.value("non_private", false)) return PrivacyBudget::make(j.value("epsilon", 1.0), j.value("delta", 1e-6)).without_noise();
  return PrivacyBudget::make(j.value("epsilon", 1.0), j.value("delta", 1e-6));
}

Algorithm algorithm_from_string(const std::string& s) {
  for (Algorithm a : {Algorithm::kNoisyMD, Algorithm::kStronglyConvexMD, Algorithm::kObjPert,
                      Algorithm::kFWPolytope, Algorithm::kFWGeneral})
    if (s == to_string(a)) return a;
  throw InvalidArgument("unknown algorithm '" + s +
                        "' (noisy_md, strongly_convex_md, objective_perturbation, "
                        "private_fw_polytope, private_fw_general)");
}

SolverConfig<double> config_from_json(const Json& j, int dim, const std::string& base_dir) {
  require(j.is_object(), "solver config must be a JSON object");
  const Body C = body_from_json(j.at("body"), dim, base_dir);
  SolverConfig<double> cfg(algorithm_from_string(j.at("algorithm").get<std::string>()), C,
                           loss_from_json(j.value("loss", Json::object())),
                           budget_from_json(j.value("budget", Json::object())));
  if (j.contains("aux_body")) cfg.aux_body = body_from_json(j.at("aux_body"), dim, base_dir);
  if (j.contains("potential")) cfg.potential = potential_from_json(j.at("potential"), C);
  cfg.T = j.value("T", 0L);
  cfg.T_cap = j.value("T_cap", kDefaultStepCap);
  cfg.floor_T = j.value("floor_T", true);
  const std::string md = j.value("md_step", std::string("proof"));
  if (md == "proof") cfg.md_step = MdStepRule::kProof;
  else if (md == "theorem") cfg.md_step = MdStepRule::kTheorem;
  else if (md == "constant") cfg.md_step = MdStepRule::kConstant;
  else throw InvalidArgument("md_step must be proof, theorem or constant");
  cfg.step_constant = j.value("step_constant", 0.0);
  if (cfg.md_step == MdStepRule::kConstant)
    require(cfg.step_constant > 0, "md_step constant needs a positive step_constant");
  const std::string fw = j.value("fw_step", std::string("standard"));
  if (fw == "standard") cfg.fw_step = FwStepRule::kStandard;
  else if (fw == "constant") cfg.fw_step = FwStepRule::kConstant;
  else throw InvalidArgument("fw_step must be standard or constant");
  cfg.seed = j.value("seed", std::uint64_t(0));
  if (j.contains("gaussian_width")) cfg.gaussian_width = j.at("gaussian_width").get<double>();
  cfg.width_samples = j.value("width_samples", cfg.width_samples);
  cfg.width_seed = j.value("width_seed", cfg.width_seed);
  if (j.contains("theta0")) cfg.theta0 = vector_from_json(j.at("theta0"), "theta0");
  cfg.inner_tol = j.value("inner_tol", cfg.inner_tol);
  cfg.inner_max_iter = j.value("inner_max_iter", cfg.inner_max_iter);
  return cfg;
}

// ---------------------------------------------------------------------------
// Datasets.

MatrixXd read_vertex_csv(const std::string& path) {
  const auto rows = read_numeric_csv(path);
  require(!rows.empty(), "vertex file " + path + " is empty");
  MatrixXd V(Eigen::Index(rows.front().size()), Eigen::Index(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (std::size_t i = 0; i < rows[k].size(); ++i) V(Eigen::Index(i), Eigen::Index(k)) = rows[k][i];
  return V;
}

Data read_dataset_csv(const std::string& path, bool lasso_profile) {
  const auto rows = read_numeric_csv(path);
  require(!rows.empty(), "dataset " + path + " has no records");
  const std::size_t cols = rows.front().size();
  require(cols >= 2, "dataset " + path + " needs at least one feature column and y");
  MatrixXd X(Eigen::Index(rows.size()), Eigen::Index(cols - 1));
  VectorXd y(Eigen::Index(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c + 1 < cols; ++c) X(Eigen::Index(i), Eigen::Index(c)) = rows[i][c];
    y(Eigen::Index(i)) = rows[i][cols - 1];
  }
  return Data(std::move(X), std::move(y), lasso_profile);
}

void write_dataset_csv(const std::string& path, const Data& D) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  for (Eigen::Index c = 0; c < D.p(); ++c) out << "x_" << (c + 1) << ',';
  out << "y\n";
  for (Eigen::Index i = 0; i < D.n(); ++i) {
    for (Eigen::Index c = 0; c < D.p(); ++c) out << fmt17(D.X()(i, c)) << ',';
    out << fmt17(D.y()(i)) << '\n';
  }
}

namespace {

constexpr char kMagic[4] = {'D', 'P', 'R', 'M'};
constexpr std::uint32_t kBinaryVersion = 1;

}  // namespace

Data read_dataset_binary(const std::string& path, bool lasso_profile) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0;
  std::uint64_t n = 0, p = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  in.read(reinterpret_cast<char*>(&p), sizeof p);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw InvalidArgument(path + ": not a dperm binary dataset");
  if (version != kBinaryVersion) throw InvalidArgument(path + ": unsupported version " + std::to_string(version));
  require(p >= 1 && p < (1u << 24) && n < (1ull << 40), path + ": implausible header");
  MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
  VectorXd y(static_cast<Eigen::Index>(n));
  std::vector<double> row(p + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    in.read(reinterpret_cast<char*>(row.data()), std::streamsize(row.size() * sizeof(double)));
    if (!in) throw InvalidArgument(path + ": truncated at record " + std::to_string(i));
    for (std::uint64_t c = 0; c < p; ++c) X(Eigen::Index(i), Eigen::Index(c)) = row[c];
    y(Eigen::Index(i)) = row[p];
  }
  return Data(std::move(X), std::move(y), lasso_profile);
}

void write_dataset_binary(const std::string& path, const Data& D) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path);
  const std::uint64_t n = std::uint64_t(D.n()), p = std::uint64_t(D.p());
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kBinaryVersion), sizeof kBinaryVersion);
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(reinterpret_cast<const char*>(&p), sizeof p);
  std::vector<double> row(p + 1);
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t c = 0; c < p; ++c) row[c] = D.X()(Eigen::Index(i), Eigen::Index(c));
    row[p] = D.y()(Eigen::Index(i));
    out.write(reinterpret_cast<const char*>(row.data()), std::streamsize(row.size() * sizeof(double)));
  }
}

Data read_dataset(const std::string& path, bool lasso_profile) {
  if (fs::path(path).extension() == ".bin") return read_dataset_binary(path, lasso_profile);
  return read_dataset_csv(path, lasso_profile);
}

// ---------------------------------------------------------------------------
// Emission.

void write_records_csv(const std::string& path, const std::vector<RiskRecord>& records) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << kRecordsHeader << '\n';
  for (const RiskRecord& r : records) {
    require(r.solver.find(',') == std::string::npos, "solver id must not contain commas");
    out << r.solver << ',' << r.n << ',' << r.seed << ',' << fmt17(r.excess_risk) << ','
        << fmt17(r.optimum) << ',' << r.T << ',' << fmt17(r.sigma) << ','
        << fmt17(r.laplace_scale) << ',' << fmt17(r.wall_ms) << '\n';
  }
}

std::vector<RiskRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != kRecordsHeader)
    throw InvalidArgument(path + ": unexpected header");
  std::vector<RiskRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 9) throw InvalidArgument(path + ": expected 9 fields in '" + line + "'");
    RiskRecord r;
    r.solver = f[0];
    r.n = std::stol(f[1]);
    r.seed = std::stoull(f[2]);
    r.excess_risk = std::strtod(f[3].c_str(), nullptr);
    r.optimum = std::strtod(f[4].c_str(), nullptr);
    r.T = std::stol(f[5]);
    r.sigma = std::strtod(f[6].c_str(), nullptr);
    r.laplace_scale = std::strtod(f[7].c_str(), nullptr);
    r.wall_ms = std::strtod(f[8].c_str(), nullptr);
    out.push_back(std::move(r));
  }
  return out;
}

void write_records_jsonl(const std::string& path, const std::vector<RiskRecord>& records) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  for (const RiskRecord& r : records) {
    const Json j{{"schema_version", kSchemaVersion},
                 {"solver", r.solver},
                 {"n", r.n},
                 {"seed", r.seed},
                 {"excess_risk", r.excess_risk},
                 {"optimum", r.optimum},
                 {"T", r.T},
                 {"sigma", r.sigma},
                 {"laplace_scale", r.laplace_scale},
                 {"zeta", r.zeta},
                 {"wall_ms", r.wall_ms},
                 {"noise_trace", r.trace}};
    out << j.dump() << '\n';
  }
}

void write_failures_csv(const std::string& path, const std::vector<CellFailure>& failures) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  out << "solver,n,seed,message\n";
  for (const CellFailure& f : failures) {
    std::string msg = f.message;
    for (char& c : msg)
      if (c == ',' || c == '\n') c = ';';
    out << f.solver << ',' << f.n << ',' << f.seed << ',' << msg << '\n';
  }
}

Json summary_to_json(const Summary& s, std::size_t failures) {
  Json cells = Json::array();
  for (const CellSummary& c : s.cells)
    cells.push_back({{"solver", c.solver},
                     {"n", c.n},
                     {"mean_excess_risk", c.mean},
                     {"std_error", finite_or_null(c.std_error)},
                     {"count", c.count}});
  Json fits = Json::array();
  for (const auto& [solver, f] : s.fits)
    fits.push_back({{"solver", solver},
                    {"slope", finite_or_null(f.slope)},
                    {"slope_stderr", finite_or_null(f.slope_stderr)},
                    {"intercept", finite_or_null(f.intercept)},
                    {"points", f.points}});
  return Json{{"schema_version", kSchemaVersion}, {"cells", cells}, {"fits", fits}, {"failures", failures}};
}

Json report_to_json(const SolverReport<double>& rep) {
  const ResolvedConfig<double>& r = rep.resolved;
  Json j{{"schema_version", kSchemaVersion},
         {"solver", rep.algorithm},
         {"seed", rep.seed},
         {"theta", std::vector<double>(rep.theta.data(), rep.theta.data() + rep.theta.size())},
         {"excess_risk", finite_or_null(rep.excess_risk)},
         {"T", r.T},
         {"iterations", rep.iterations},
         {"wall_ms", rep.wall_ms},
         {"inner_converged", rep.inner_converged}};
  j["noise_plan"] = {{"mechanism", to_string(rep.noise_plan.mechanism)},
                     {"sigma", rep.noise_plan.sigma},
                     {"laplace_scale", rep.noise_plan.laplace_scale},
                     {"zeta", rep.noise_plan.zeta},
                     {"steps", rep.noise_plan.steps},
                     {"trace", rep.noise_plan.trace}};
  j["resolved"] = {{"T_raw", finite_or_null(r.T_raw)},
                   {"lipschitz", r.lipschitz},
                   {"eta", r.eta},
                   {"strong_convexity", r.strong_convexity},
                   {"gaussian_width", r.gaussian_width},
                   {"q_diameter", r.q_diameter},
                   {"max_potential", r.max_potential},
                   {"modulus", r.modulus},
                   {"curvature", r.curvature},
                   {"l1_radius", r.l1_radius}};
  if (rep.ledger.vertex_weights.size() > 0 || rep.ledger.support > 0)
    j["fw_ledger"] = {{"initial_weight", rep.ledger.initial_weight}, {"support", rep.ledger.support}};
  return j;
}

}  // namespace dperm
