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

// Private solvers: noisy mirror descent (plain and strongly convex),
// objective perturbation, and private Frank-Wolfe over polytopes and general
// bodies, plus the noise-free classical loops they reduce to.

#ifndef DPERM_SOLVERS_HPP_
#define DPERM_SOLVERS_HPP_

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dperm/core.hpp"
#include "dperm/geometry.hpp"
#include "dperm/losses.hpp"
#include "dperm/oracle.hpp"
#include "dperm/potentials.hpp"
#include "dperm/privacy.hpp"

namespace dperm {

enum class Algorithm { kNoisyMD, kStronglyConvexMD, kObjPert, kFWPolytope, kFWGeneral };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kNoisyMD: return "noisy_md";
    case Algorithm::kStronglyConvexMD: return "strongly_convex_md";
    case Algorithm::kObjPert: return "objective_perturbation";
    case Algorithm::kFWPolytope: return "private_fw_polytope";
    case Algorithm::kFWGeneral: return "private_fw_general";
  }
  return "unknown";
}

// Mirror-descent step size for NoisyMD:
//   kProof    eta = sqrt(max Psi * modulus) / (L ||Q||_2 sqrt(T))
//   kTheorem  eta = 1 / (L ||Q||_2 sqrt(T))
//   kConstant eta = step_constant
enum class MdStepRule { kProof, kTheorem, kConstant };

// Frank-Wolfe mixing weight at step t (1-based):
//   kStandard mu_t = 2 / (t + 2)
//   kConstant mu_t = 1 / (T + 2)
enum class FwStepRule { kStandard, kConstant };

inline constexpr long kDefaultStepCap = 1000000;

template <typename Scalar>
struct SolverConfig {
  Algorithm algorithm;
  ConvexBody<Scalar> body;
  LossSpec<Scalar> loss;
  PrivacyBudget budget;
  // Symmetric body Q of the mirror-descent analysis; symmetric hull of
  // `body` when unset.
  std::optional<ConvexBody<Scalar>> aux_body;
  // Mirror map (MD variants); a body-appropriate default when unset.
  std::optional<Potential<Scalar>> potential;
  long T = 0;  // 0 selects the analytic default
  long T_cap = kDefaultStepCap;
  // Raise a default T below 1 to 1 instead of failing.
  bool floor_T = true;
  MdStepRule md_step = MdStepRule::kProof;
  Scalar step_constant = 0;
  FwStepRule fw_step = FwStepRule::kStandard;
  std::uint64_t seed = 0;
  // Gaussian width used by default step counts; estimated when unset.
  std::optional<Scalar> gaussian_width;
  long width_samples = 10000;
  std::uint64_t width_seed = 0x5eedULL;
  // Objective-perturbation center; canonical point when unset.
  std::optional<Vector<Scalar>> theta0;
  // NoisyMD only: replace the calibrated Gaussian by N(0, covariance).
  std::optional<Matrix<Scalar>> noise_covariance;
  Scalar inner_tol = Scalar(1e-8);
  long inner_max_iter = 100000;
  bool keep_trace = false;

  SolverConfig(Algorithm a, ConvexBody<Scalar> C, LossSpec<Scalar> l, PrivacyBudget b)
      : algorithm(a), body(std::move(C)), loss(std::move(l)), budget(b) {}
};

// Every value substituted into a run, with the derivation trace.
template <typename Scalar>
struct ResolvedConfig {
  long T = 0;
  double T_raw = 0;
  double lipschitz = 0;     // L used by the algorithm (l1 for polytope FW)
  double eta = 0;           // constant MD step, or eta_1 for the SC schedule
  double strong_convexity = 0;
  double gaussian_width = 0;
  double q_diameter = 0;    // ||Q||_2
  double max_potential = 0;
  double modulus = 1;
  double curvature = 0;
  double l1_radius = 0;
  NoisePlan plan;
  std::optional<Potential<Scalar>> potential;
  std::optional<ConvexBody<Scalar>> aux_body;
};

// Convex-combination record of a Frank-Wolfe output.
template <typename Scalar>
struct FwLedger {
  Scalar initial_weight = 1;
  Vector<Scalar> vertex_weights;  // polytope runs: weight per vertex
  long support = 0;               // vertices with positive weight
};

template <typename Scalar>
struct SolverReport {
  std::string algorithm;
  Vector<Scalar> theta;
  Scalar excess_risk = std::numeric_limits<Scalar>::quiet_NaN();
  long iterations = 0;
  NoisePlan noise_plan;
  double wall_ms = 0;
  std::uint64_t seed = 0;
  ResolvedConfig<Scalar> resolved;
  FwLedger<Scalar> ledger;
  bool inner_converged = true;
  // Populated when keep_trace is set.
  std::vector<Vector<Scalar>> iterates;
  std::vector<Scalar> fw_gaps;
};

// ---------------------------------------------------------------------------
// Defaults.

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline long resolve_steps(double raw, long cap, bool floor_T, NoisePlan& plan,
                          const std::string& formula) {
  long T;
  if (!std::isfinite(raw)) {
    T = cap;
    plan.note(formula + " is not finite; T = cap = " + std::to_string(cap));
    return T;
  }
  if (raw < 1) {
    if (!floor_T)
      throw InvalidArgument("default T = " + fmt(raw) + " < 1 (" + formula +
                            "); increase n or epsilon, or supply T explicitly");
    plan.note(formula + " = " + fmt(raw) + " < 1; floored to T = 1");
    return 1;
  }
  const double fl = std::floor(raw);
  T = fl >= double(cap) ? cap : long(fl);
  plan.note(formula + " = " + fmt(raw) + " -> T = " + std::to_string(T) +
            (T == cap ? " (capped)" : ""));
  return T;
}

template <typename Scalar>
Potential<Scalar> default_potential(const ConvexBody<Scalar>& C) {
  switch (C.kind()) {
    case BodyKind::kSimplex:
      return Potential<Scalar>::negative_entropy(C.dim(), true);
    case BodyKind::kPolytope:
      return Potential<Scalar>::polytope_qnorm(C.vertex_matrix());
    case BodyKind::kGroupedL1Ball:
      return Potential<Scalar>::grouped_l1(C.dim(), C.group_size());
    default:
      return Potential<Scalar>::squared_l2(canonical_point(C));
  }
}

template <typename Scalar>
void check_potential(const Potential<Scalar>& P, const ConvexBody<Scalar>& C) {
  switch (P.kind()) {
    case PotentialKind::kSquaredL2:
      require(P.dim() == C.dim(), "potential/body dimension mismatch");
      require(C.kind() != BodyKind::kPolytope,
              "squared_l2 mirror steps need a projectable body (not a polytope)");
      return;
    case PotentialKind::kNegativeEntropy:
      require(C.kind() == BodyKind::kSimplex && P.dim() == C.dim(),
              "negative_entropy potential requires a simplex body of the same dimension");
      return;
    case PotentialKind::kPolytopeQNorm:
      require(C.vertex_enumerable(), "polytope_qnorm potential needs a vertex-enumerable body");
      require(P.vertex_matrix().rows() == C.dim() &&
                  P.vertex_matrix().cols() == vertices(C).cols(),
              "polytope_qnorm potential vertices do not match the body");
      return;
    case PotentialKind::kGroupedL1:
      require(C.kind() == BodyKind::kGroupedL1Ball && C.group_size() == P.group_size() &&
                  C.dim() == P.dim(),
              "grouped_l1 potential requires a matching grouped l1 ball");
      return;
  }
}

template <typename Scalar>
double width_of(const SolverConfig<Scalar>& cfg, const ConvexBody<Scalar>& B, NoisePlan& plan,
                const char* name) {
  if (cfg.gaussian_width) {
    plan.note(std::string(name) + " = " + fmt(double(*cfg.gaussian_width)) + " (supplied)");
    return double(*cfg.gaussian_width);
  }
  const WidthEstimate w = gaussian_width_mc(B, cfg.width_samples, cfg.width_seed);
  plan.note(std::string(name) + " = " + fmt(w.mean) + " (Monte Carlo, " +
            std::to_string(w.samples) + " samples, se " + fmt(w.std_error) + ")");
  return w.mean;
}

}  // namespace detail

// Fills T, step sizes and noise scales, recording each substitution.
template <typename Scalar>
ResolvedConfig<Scalar> resolve_defaults(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  require_dim(cfg.body.dim(), D.p(), "solver config body");
  require(D.n() > 0, "solver: empty dataset");
  require(cfg.T >= 0, "solver: T must be >= 0");
  require(cfg.T_cap >= 1, "solver: T_cap must be >= 1");
  ResolvedConfig<Scalar> r;
  NoisePlan& plan = r.plan;
  const PrivacyBudget& bud = cfg.budget;
  const double n = double(D.n());
  const double eps = bud.epsilon, delta = bud.delta;
  plan.note("algorithm " + std::string(to_string(cfg.algorithm)) + ", n = " +
            std::to_string(D.n()) + ", epsilon = " + detail::fmt(eps) + ", delta = " +
            detail::fmt(delta) + (bud.noise_enabled ? "" : ", noise disabled"));
  const LipschitzPair<Scalar> lip = lipschitz_constants(cfg.loss, cfg.body, D);

  auto pick_T = [&](double raw, const std::string& formula) {
    r.T_raw = raw;
    if (cfg.T > 0) {
      plan.note("T = " + std::to_string(cfg.T) + " (supplied; default " + formula + " = " +
                detail::fmt(raw) + ")");
      return cfg.T;
    }
    return detail::resolve_steps(raw, cfg.T_cap, cfg.floor_T, plan, formula);
  };

  switch (cfg.algorithm) {
    case Algorithm::kNoisyMD:
    case Algorithm::kStronglyConvexMD: {
      const Potential<Scalar> P = cfg.potential ? *cfg.potential : detail::default_potential(cfg.body);
      detail::check_potential(P, cfg.body);
      r.potential = P;
      r.lipschitz = double(lip.l2);
      r.max_potential = double(max_over_domain(
          P, P.coefficient_space() ? ConvexBody<Scalar>::simplex(P.dim()) : cfg.body));
      r.modulus = double(strong_convexity_modulus(P));
      plan.note("potential " + P.describe() + ", max Psi = " + detail::fmt(r.max_potential) +
                ", modulus = " + detail::fmt(r.modulus));
      plan.note("L (l2 Lipschitz) = " + detail::fmt(r.lipschitz));
      const double L = r.lipschitz;
      if (cfg.algorithm == Algorithm::kNoisyMD) {
        const ConvexBody<Scalar> Q = cfg.aux_body ? *cfg.aux_body : symmetric_hull(cfg.body);
        require(Q.dim() == cfg.body.dim(), "aux body dimension mismatch");
        r.aux_body = Q;
        r.q_diameter = double(l2_diameter(Q));
        r.gaussian_width = detail::width_of(cfg, Q, plan, "G_Q");
        plan.note("Q = " + Q.describe() + ", ||Q||_2 = " + detail::fmt(r.q_diameter));
        const double ln = std::log(n / delta);
        const double raw = r.q_diameter * r.q_diameter * eps * eps * n * n /
                           (L * L * ln * ln * r.gaussian_width * r.gaussian_width);
        r.T = pick_T(raw, "||Q||^2 eps^2 n^2 / (L^2 ln^2(n/delta) G_Q^2)");
        const double denom = L * r.q_diameter * std::sqrt(double(r.T));
        switch (cfg.md_step) {
          case MdStepRule::kProof:
            r.eta = std::sqrt(r.max_potential * r.modulus) / denom;
            plan.note("eta = sqrt(max Psi * modulus) / (L ||Q||_2 sqrt(T)) = " + detail::fmt(r.eta));
            break;
          case MdStepRule::kTheorem:
            r.eta = 1.0 / denom;
            plan.note("eta = 1 / (L ||Q||_2 sqrt(T)) = " + detail::fmt(r.eta));
            break;
          case MdStepRule::kConstant:
            r.eta = double(cfg.step_constant);
            plan.note("eta = " + detail::fmt(r.eta) + " (supplied)");
            break;
        }
        if (!(std::isfinite(r.eta) && r.eta > 0)) {
          r.eta = 1.0;
          plan.note("step formula degenerate (L or ||Q|| is zero); eta = 1");
        }
      } else {
        r.strong_convexity = double(strong_convexity(cfg.loss));
        require(r.strong_convexity > 0,
                "strongly_convex_md: the loss declares no strong convexity (Delta = 0)");
        r.q_diameter = double(l2_diameter(cfg.body));
        r.gaussian_width = detail::width_of(cfg, cfg.body, plan, "G_C");
        const double raw = std::pow(r.q_diameter * n * eps, 2) /
                           (r.gaussian_width * r.gaussian_width);
        r.T = pick_T(raw, "(||C||_2 n eps)^2 / G_C^2");
        r.eta = 2.0 / r.strong_convexity;
        plan.note("eta_t = 2 / (Delta t), Delta = " + detail::fmt(r.strong_convexity));
      }
      if (cfg.noise_covariance && cfg.algorithm == Algorithm::kNoisyMD) {
        plan.mechanism = Mechanism::kSubGaussian;
        plan.note("gradient noise N(0, Sigma) (supplied covariance; no privacy calibration)");
      } else {
        plan.mechanism = bud.is_private() ? Mechanism::kGaussianPerStep : Mechanism::kNone;
        plan.sigma = md_sigma(L, r.T, bud, D.n());
        plan.note("sigma = sqrt(32 L^2 T) ln(T/delta) / (eps n) = " + detail::fmt(plan.sigma));
      }
      break;
    }
    case Algorithm::kObjPert: {
      const EigenBounds<Scalar> eb = hessian_eig_bounds(cfg.loss, cfg.body, D);
      r.lipschitz = double(lip.l2);
      const ObjPertPlan op = objpert_plan(r.lipschitz, double(eb.lambda_max),
                                          double(eb.lambda_min), bud, D.n());
      plan.mechanism = bud.is_private() ? Mechanism::kObjPert : Mechanism::kNone;
      plan.sigma = op.sigma;
      plan.zeta = op.zeta;
      r.T = cfg.inner_max_iter;
      plan.note("L (l2) = " + detail::fmt(r.lipschitz) + ", lambda_max = " +
                detail::fmt(double(eb.lambda_max)) + ", lambda_min = " +
                detail::fmt(double(eb.lambda_min)));
      plan.note("sigma = L sqrt(2 ln(1/delta)) / (n eps) = " + detail::fmt(op.sigma));
      plan.note("zeta = max(2 lambda_max / (n eps) - lambda_min, 0) = " + detail::fmt(op.zeta));
      break;
    }
    case Algorithm::kFWPolytope: {
      require(cfg.body.vertex_enumerable(),
              "private_fw_polytope requires a vertex-enumerable body");
      r.lipschitz = double(lip.l1);
      r.l1_radius = double(l1_radius(cfg.body));
      r.curvature = double(curvature_bound(cfg.loss, cfg.body, D));
      plan.note("L1 = " + detail::fmt(r.lipschitz) + ", ||C||_1 = " + detail::fmt(r.l1_radius) +
                ", Gamma = " + detail::fmt(r.curvature));
      const double raw = std::pow(r.curvature, 2.0 / 3.0) * std::pow(n * eps, 2.0 / 3.0) /
                         std::pow(r.lipschitz * r.l1_radius, 2.0 / 3.0);
      r.T = pick_T(raw, "Gamma^(2/3) (n eps)^(2/3) / (L1 ||C||_1)^(2/3)");
      plan.mechanism = bud.is_private() ? Mechanism::kLaplacePerScore : Mechanism::kNone;
      plan.laplace_scale = fw_laplace_scale(r.lipschitz, r.l1_radius, r.T, bud, D.n());
      plan.note("b = L1 ||C||_1 sqrt(8 T ln(1/delta)) / (n eps) = " +
                detail::fmt(plan.laplace_scale) + " (scores use the 1/n-normalized gradient)");
      break;
    }
    case Algorithm::kFWGeneral: {
      r.lipschitz = double(lip.l2);
      r.curvature = double(curvature_bound(cfg.loss, cfg.body, D));
      r.gaussian_width = detail::width_of(cfg, cfg.body, plan, "G_C");
      plan.note("L2 = " + detail::fmt(r.lipschitz) + ", Gamma = " + detail::fmt(r.curvature));
      const double raw = std::pow(r.curvature, 2.0 / 3.0) * std::pow(n * eps, 2.0 / 3.0) /
                         std::pow(r.lipschitz * r.gaussian_width, 2.0 / 3.0);
      r.T = pick_T(raw, "Gamma^(2/3) (n eps)^(2/3) / (L2 G_C)^(2/3)");
      plan.mechanism = bud.is_private() ? Mechanism::kGaussianPerStep : Mechanism::kNone;
      plan.sigma = fw_general_sigma(r.lipschitz, r.T, bud, D.n());
      plan.note("sigma = sqrt(32 L2^2 T) ln(n/delta) / (n eps) = " + detail::fmt(plan.sigma));
      break;
    }
  }
  plan.steps = r.T;
  return r;
}

// ---------------------------------------------------------------------------
// Classical (noise-free) loops.

template <typename Scalar>
Scalar fw_mu(FwStepRule rule, long t, long T) {
  return rule == FwStepRule::kStandard ? Scalar(2) / Scalar(t + 2) : Scalar(1) / Scalar(T + 2);
}

// Frank-Wolfe from theta_1: T - 1 exact LMO steps, returns theta_T.
template <typename Scalar>
Vector<Scalar> frank_wolfe(const ConvexBody<Scalar>& C, const LossSpec<Scalar>& spec,
                           const Dataset<Scalar>& D, long T, FwStepRule rule,
                           const Vector<Scalar>& theta1,
                           std::vector<Vector<Scalar>>* iterates = nullptr) {
  Vector<Scalar> theta = theta1;
  if (iterates) iterates->push_back(theta);
  for (long t = 1; t < T; ++t) {
    const Vector<Scalar> g = grad(spec, theta, D);
    const Vector<Scalar> s = lmo(C, g);
    const Scalar mu = fw_mu<Scalar>(rule, t, T);
    theta = (1 - mu) * theta + mu * s;
    if (iterates) iterates->push_back(theta);
  }
  return theta;
}

// Mirror descent from x_1 over `domain`; iterates are mapped to R^p through
// `V` when the potential lives in coefficient space. Returns the average of
// x_1..x_T mapped to R^p.
template <typename Scalar, typename StepFn>
Vector<Scalar> mirror_descent(const Potential<Scalar>& P, const ConvexBody<Scalar>& domain,
                              const LossSpec<Scalar>& spec, const Dataset<Scalar>& D, long T,
                              StepFn eta_at, const Vector<Scalar>& x1,
                              std::vector<Vector<Scalar>>* iterates = nullptr) {
  const bool coeff = P.coefficient_space();
  const Matrix<Scalar>* V = coeff ? &P.vertex_matrix() : nullptr;
  Vector<Scalar> x = x1;
  Vector<Scalar> sum = x;
  if (iterates) iterates->push_back(coeff ? Vector<Scalar>(*V * x) : x);
  for (long t = 1; t < T; ++t) {
    const Vector<Scalar> theta = coeff ? Vector<Scalar>(*V * x) : x;
    const Vector<Scalar> g = grad(spec, theta, D);
    const Vector<Scalar> gx = coeff ? Vector<Scalar>(V->transpose() * g) : g;
    x = mirror_step(P, domain, x, gx, Scalar(eta_at(t))).point;
    sum += x;
    if (iterates) iterates->push_back(coeff ? Vector<Scalar>(*V * x) : x);
  }
  const Vector<Scalar> avg = sum / Scalar(T);
  return coeff ? Vector<Scalar>(*V * avg) : avg;
}

// ---------------------------------------------------------------------------
// Private solvers.

namespace detail {

template <typename Scalar>
double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

template <typename Scalar>
SolverReport<Scalar> run_md(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D,
                            ResolvedConfig<Scalar> r) {
  const auto t0 = std::chrono::steady_clock::now();
  SolverReport<Scalar> rep;
  rep.algorithm = to_string(cfg.algorithm);
  rep.seed = cfg.seed;
  const Potential<Scalar>& P = *r.potential;
  const bool coeff = P.coefficient_space();
  const ConvexBody<Scalar> domain = coeff ? ConvexBody<Scalar>::simplex(P.dim()) : cfg.body;
  const Matrix<Scalar>* V = coeff ? &P.vertex_matrix() : nullptr;
  const bool sc = cfg.algorithm == Algorithm::kStronglyConvexMD;
  const Scalar delta_sc = Scalar(r.strong_convexity);
  const Scalar eta_const = Scalar(r.eta);
  Rng rng = make_rng(cfg.seed, 0);
  const double sigma = r.plan.sigma;
  const bool gaussian = sigma > 0;
  std::optional<Matrix<Scalar>> factor;
  if (r.plan.mechanism == Mechanism::kSubGaussian) factor = covariance_factor<Scalar>(*cfg.noise_covariance);
  Vector<Scalar> x = canonical_point(domain);
  Vector<Scalar> sum = x;
  if (cfg.keep_trace) rep.iterates.push_back(coeff ? Vector<Scalar>(*V * x) : x);
  const long T = r.T;
  for (long t = 1; t < T; ++t) {
    const Vector<Scalar> theta = coeff ? Vector<Scalar>(*V * x) : x;
    Vector<Scalar> g = grad(cfg.loss, theta, D);
    if (gaussian) g += sample_gaussian_vec<Scalar>(g.size(), sigma, rng);
    if (factor) g += sample_with_factor<Scalar>(*factor, rng);
    const Vector<Scalar> gx = coeff ? Vector<Scalar>(V->transpose() * g) : g;
    const Scalar eta = sc ? Scalar(2) / (delta_sc * Scalar(t)) : eta_const;
    const MirrorStep<Scalar> ms = mirror_step(P, domain, x, gx, eta);
    rep.inner_converged = rep.inner_converged && ms.converged;
    x = ms.point;
    sum += x;
    if (cfg.keep_trace) rep.iterates.push_back(coeff ? Vector<Scalar>(*V * x) : x);
  }
  const Vector<Scalar> avg = sum / Scalar(T);
  rep.theta = coeff ? Vector<Scalar>(*V * avg) : avg;
  rep.iterations = T;
  rep.noise_plan = r.plan;
  rep.resolved = std::move(r);
  rep.wall_ms = elapsed_ms<Scalar>(t0);
  return rep;
}

}  // namespace detail

template <typename Scalar>
SolverReport<Scalar> noisy_mirror_descent(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  require(cfg.algorithm == Algorithm::kNoisyMD, "noisy_mirror_descent: wrong algorithm tag");
  return detail::run_md(cfg, D, resolve_defaults(cfg, D));
}

template <typename Scalar>
SolverReport<Scalar> strongly_convex_md(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  require(cfg.algorithm == Algorithm::kStronglyConvexMD, "strongly_convex_md: wrong algorithm tag");
  return detail::run_md(cfg, D, resolve_defaults(cfg, D));
}

template <typename Scalar>
SolverReport<Scalar> objective_perturbation(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  require(cfg.algorithm == Algorithm::kObjPert, "objective_perturbation: wrong algorithm tag");
  const auto t0 = std::chrono::steady_clock::now();
  ResolvedConfig<Scalar> r = resolve_defaults(cfg, D);
  SolverReport<Scalar> rep;
  rep.algorithm = to_string(cfg.algorithm);
  rep.seed = cfg.seed;
  Rng rng = make_rng(cfg.seed, 0);
  SmoothObjective<Scalar> f = make_objective(cfg.loss, D);
  if (cfg.budget.is_private()) {
    const Vector<Scalar> center = cfg.theta0 ? *cfg.theta0 : canonical_point(cfg.body);
    require_dim(center.size(), D.p(), "objective perturbation theta0");
    const Vector<Scalar> b = sample_gaussian_vec<Scalar>(D.p(), r.plan.sigma, rng);
    f = perturb_objective(std::move(f), Scalar(r.plan.zeta), center, b);
  }
  const MinimizeResult<Scalar> m = minimize_over_body(f, cfg.body, cfg.inner_tol, cfg.inner_max_iter);
  rep.inner_converged = m.converged;
  if (!m.converged)
    r.plan.note("inner solver stopped at the iteration cap with gap " + detail::fmt(double(m.gap)) +
                " (best iterate returned)");
  rep.theta = m.x;
  rep.iterations = m.iterations;
  r.T = m.iterations;
  r.plan.steps = m.iterations;
  rep.noise_plan = r.plan;
  rep.resolved = std::move(r);
  rep.wall_ms = detail::elapsed_ms<Scalar>(t0);
  return rep;
}

template <typename Scalar>
SolverReport<Scalar> private_fw_polytope(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  require(cfg.algorithm == Algorithm::kFWPolytope, "private_fw_polytope: wrong algorithm tag");
  const auto t0 = std::chrono::steady_clock::now();
  ResolvedConfig<Scalar> r = resolve_defaults(cfg, D);
  SolverReport<Scalar> rep;
  rep.algorithm = to_string(cfg.algorithm);
  rep.seed = cfg.seed;
  const Matrix<Scalar> V = vertices(cfg.body);
  const Eigen::Index k = V.cols();
  Rng rng = make_rng(cfg.seed, 0);
  const double scale = r.plan.laplace_scale;
  Vector<Scalar> theta = canonical_point(cfg.body);
  FwLedger<Scalar>& led = rep.ledger;
  led.initial_weight = 1;
  led.vertex_weights = Vector<Scalar>::Zero(k);
  if (cfg.keep_trace) rep.iterates.push_back(theta);
  const long T = r.T;
  for (long t = 1; t < T; ++t) {
    const Vector<Scalar> g = grad(cfg.loss, theta, D);
    const Vector<Scalar> scores = V.transpose() * g;
    const Eigen::Index i = report_noisy_min(scores, scale, rng);
    if (cfg.keep_trace) rep.fw_gaps.push_back(g.dot(theta) - scores.minCoeff());
    const Scalar mu = fw_mu<Scalar>(cfg.fw_step, t, T);
    theta = (1 - mu) * theta + mu * V.col(i);
    led.initial_weight *= (1 - mu);
    led.vertex_weights *= (1 - mu);
    led.vertex_weights(i) += mu;
    if (cfg.keep_trace) rep.iterates.push_back(theta);
  }
  led.support = long((led.vertex_weights.array() > 0).count());
  rep.theta = theta;
  rep.iterations = T;
  rep.noise_plan = r.plan;
  rep.resolved = std::move(r);
  rep.wall_ms = detail::elapsed_ms<Scalar>(t0);
  return rep;
}

template <typename Scalar>
SolverReport<Scalar> private_fw_general(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  require(cfg.algorithm == Algorithm::kFWGeneral, "private_fw_general: wrong algorithm tag");
  const auto t0 = std::chrono::steady_clock::now();
  ResolvedConfig<Scalar> r = resolve_defaults(cfg, D);
  SolverReport<Scalar> rep;
  rep.algorithm = to_string(cfg.algorithm);
  rep.seed = cfg.seed;
  Rng rng = make_rng(cfg.seed, 0);
  const double sigma = r.plan.sigma;
  Vector<Scalar> theta = canonical_point(cfg.body);
  rep.ledger.initial_weight = 1;
  if (cfg.keep_trace) rep.iterates.push_back(theta);
  const long T = r.T;
  for (long t = 1; t < T; ++t) {
    const Vector<Scalar> g = grad(cfg.loss, theta, D);
    Vector<Scalar> noisy = g;
    if (sigma > 0) noisy += sample_gaussian_vec<Scalar>(g.size(), sigma, rng);
    const Vector<Scalar> s = lmo(cfg.body, noisy);
    if (cfg.keep_trace) rep.fw_gaps.push_back(detail::fw_gap(cfg.body, theta, g));
    const Scalar mu = fw_mu<Scalar>(cfg.fw_step, t, T);
    theta = (1 - mu) * theta + mu * s;
    rep.ledger.initial_weight *= (1 - mu);
    if (cfg.keep_trace) rep.iterates.push_back(theta);
  }
  rep.ledger.support = T - 1;
  rep.theta = theta;
  rep.iterations = T;
  rep.noise_plan = r.plan;
  rep.resolved = std::move(r);
  rep.wall_ms = detail::elapsed_ms<Scalar>(t0);
  return rep;
}

// Dispatch on cfg.algorithm.
template <typename Scalar>
SolverReport<Scalar> solve(const SolverConfig<Scalar>& cfg, const Dataset<Scalar>& D) {
  switch (cfg.algorithm) {
    case Algorithm::kNoisyMD: return noisy_mirror_descent(cfg, D);
    case Algorithm::kStronglyConvexMD: return strongly_convex_md(cfg, D);
    case Algorithm::kObjPert: return objective_perturbation(cfg, D);
    case Algorithm::kFWPolytope: return private_fw_polytope(cfg, D);
    case Algorithm::kFWGeneral: return private_fw_general(cfg, D);
  }
  throw InvalidArgument("solve: unknown algorithm");
}

}  // namespace dperm

#endif  // DPERM_SOLVERS_HPP_
