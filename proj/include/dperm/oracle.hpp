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

// Non-private reference solutions and excess-risk measurement. The same
// constrained minimizer serves as the inner solver of objective perturbation.

#ifndef DPERM_ORACLE_HPP_
#define DPERM_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "dperm/core.hpp"
#include "dperm/geometry.hpp"
#include "dperm/losses.hpp"

namespace dperm {

// Smooth convex objective. When `hessian` is set the objective is the
// quadratic 0.5 x'Hx + <linear, x> + constant up to the callbacks, which
// enables exact line searches.
template <typename Scalar>
struct SmoothObjective {
  std::function<Scalar(const Vector<Scalar>&)> value;
  std::function<Vector<Scalar>(const Vector<Scalar>&)> grad;
  std::optional<Matrix<Scalar>> hessian;
  // Lipschitz constant of the gradient in l2; 0 selects backtracking.
  Scalar smoothness = 0;
};

template <typename Scalar>
struct MinimizeResult {
  Vector<Scalar> x;
  Scalar value = 0;
  Scalar gap = 0;  // Frank-Wolfe duality gap at x
  long iterations = 0;
  bool converged = false;
  std::string method;
};

// Objective L(theta; D) for a loss spec, with the quadratic structure of the
// squared error exposed.
template <typename Scalar>
SmoothObjective<Scalar> make_objective(const LossSpec<Scalar>& spec, const Dataset<Scalar>& D) {
  SmoothObjective<Scalar> f;
  const Eigen::Index p = D.p();
  if (spec.kind == LossKind::kSquaredError) {
    Matrix<Scalar> H = D.gram();
    H.diagonal().array() += spec.ridge;
    const Vector<Scalar> b = D.xty();
    const Scalar yy = D.n() > 0 ? D.y().squaredNorm() / Scalar(D.n()) : Scalar(0);
    f.value = [H, b, yy](const Vector<Scalar>& x) {
      return Scalar(0.5) * x.dot(H * x) - b.dot(x) + Scalar(0.5) * yy;
    };
    f.grad = [H, b](const Vector<Scalar>& x) { return Vector<Scalar>(H * x - b); };
    f.smoothness = detail::max_eigenvalue<Scalar>(H);
    f.hessian = std::move(H);
    return f;
  }
  f.value = [&spec, &D](const Vector<Scalar>& x) { return loss(spec, x, D); };
  f.grad = [&spec, &D](const Vector<Scalar>& x) { return grad(spec, x, D); };
  if (spec.kind == LossKind::kHuber)
    f.smoothness = detail::max_eigenvalue<Scalar>(D.gram()) + spec.ridge;
  (void)p;
  return f;
}

// f(x) + (zeta/2)||x - center||^2 + <b, x>.
template <typename Scalar>
SmoothObjective<Scalar> perturb_objective(SmoothObjective<Scalar> f, Scalar zeta,
                                          const Vector<Scalar>& center,
                                          const Vector<Scalar>& b) {
  SmoothObjective<Scalar> g;
  auto fv = f.value;
  auto fg = f.grad;
  g.value = [fv, zeta, center, b](const Vector<Scalar>& x) {
    return fv(x) + Scalar(0.5) * zeta * (x - center).squaredNorm() + b.dot(x);
  };
  g.grad = [fg, zeta, center, b](const Vector<Scalar>& x) {
    return Vector<Scalar>(fg(x) + zeta * (x - center) + b);
  };
  if (f.hessian) {
    Matrix<Scalar> H = *f.hessian;
    H.diagonal().array() += zeta;
    g.hessian = std::move(H);
  }
  g.smoothness = f.smoothness > 0 ? f.smoothness + zeta : Scalar(0);
  return g;
}

namespace detail {

template <typename Scalar>
Scalar fw_gap(const ConvexBody<Scalar>& C, const Vector<Scalar>& x, const Vector<Scalar>& g) {
  return g.dot(x - lmo(C, g));
}

// Accelerated projected gradient with function-value restarts.
template <typename Scalar>
MinimizeResult<Scalar> fista(const SmoothObjective<Scalar>& f, const ConvexBody<Scalar>& C,
                             Vector<Scalar> x, Scalar tol, long max_iter) {
  MinimizeResult<Scalar> out;
  out.method = "fista";
  x = euclidean_project(C, x);
  Scalar Lk = f.smoothness > 0 ? f.smoothness : Scalar(1);
  const bool backtrack = !(f.smoothness > 0);
  Vector<Scalar> y = x, x_prev = x;
  Scalar t = 1;
  Scalar fx = f.value(x);
  Vector<Scalar> best = x;
  Scalar best_f = fx;
  for (long it = 1; it <= max_iter; ++it) {
    const Vector<Scalar> gy = f.grad(y);
    Vector<Scalar> xn;
    Scalar fn;
    for (;;) {
      xn = euclidean_project(C, Vector<Scalar>(y - gy / Lk));
      fn = f.value(xn);
      if (!backtrack) break;
      const Vector<Scalar> d = xn - y;
      if (fn <= f.value(y) + gy.dot(d) + Scalar(0.5) * Lk * d.squaredNorm() + Scalar(1e-15) * std::abs(fn)) break;
      Lk *= 2;
    }
    if (fn > fx && t > 1) {
      // Restart momentum from the last accepted point.
      y = x;
      t = 1;
      continue;
    }
    const Scalar tn = (1 + std::sqrt(1 + 4 * t * t)) / 2;
    y = xn + ((t - 1) / tn) * (xn - x);
    x_prev = x;
    x = xn;
    fx = fn;
    t = tn;
    if (fx < best_f) {
      best_f = fx;
      best = x;
    }
    if (it % 5 == 0 || it == max_iter) {
      const Scalar gap = fw_gap(C, x, Vector<Scalar>(f.grad(x)));
      if (gap <= tol) {
        out.x = x;
        out.value = fx;
        out.gap = std::max(gap, Scalar(0));
        out.iterations = it;
        out.converged = true;
        return out;
      }
    }
  }
  out.x = best;
  out.value = best_f;
  out.gap = std::max(fw_gap(C, best, Vector<Scalar>(f.grad(best))), Scalar(0));
  out.iterations = max_iter;
  out.converged = out.gap <= tol;
  return out;
}

// Pairwise Frank-Wolfe over an explicit vertex list with exact (quadratic)
// or golden-section line search.
template <typename Scalar>
MinimizeResult<Scalar> pairwise_fw(const SmoothObjective<Scalar>& f, const Matrix<Scalar>& V,
                                   Scalar tol, long max_iter) {
  MinimizeResult<Scalar> out;
  out.method = "pairwise_fw";
  const Eigen::Index k = V.cols();
  Vector<Scalar> w = Vector<Scalar>::Zero(k);
  w(0) = 1;
  Vector<Scalar> x = V.col(0);
  Scalar gap = 0;
  for (long it = 1; it <= max_iter; ++it) {
    const Vector<Scalar> g = f.grad(x);
    const Vector<Scalar> s = V.transpose() * g;
    Eigen::Index fw_i = 0;
    s.minCoeff(&fw_i);
    gap = g.dot(x) - s(fw_i);
    if (gap <= tol) {
      out.x = x;
      out.value = f.value(x);
      out.gap = std::max(gap, Scalar(0));
      out.iterations = it;
      out.converged = true;
      return out;
    }
    Eigen::Index away = -1;
    Scalar worst = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index j = 0; j < k; ++j)
      if (w(j) > 0 && s(j) > worst) {
        worst = s(j);
        away = j;
      }
    const Vector<Scalar> d = V.col(fw_i) - V.col(away);
    const Scalar gmax = w(away);
    const Scalar slope = g.dot(d);
    if (!(slope < 0)) break;  // no descent along the pair: stationary
    Scalar gamma;
    if (f.hessian) {
      const Scalar curv = d.dot(*f.hessian * d);
      gamma = curv > 0 ? std::min(gmax, -slope / curv) : gmax;
    } else {
      Scalar a = 0, b = gmax;
      const Scalar r = (std::sqrt(Scalar(5)) - 1) / 2;
      for (int ls = 0; ls < 80; ++ls) {
        const Scalar m1 = b - r * (b - a), m2 = a + r * (b - a);
        if (f.value(Vector<Scalar>(x + m1 * d)) <= f.value(Vector<Scalar>(x + m2 * d))) b = m2; else a = m1;
      }
      gamma = (a + b) / 2;
    }
    w(fw_i) += gamma;
    w(away) -= gamma;
    if (gamma == gmax) w(away) = 0;
    x = V * w;
    out.iterations = it;
  }
  out.x = x;
  out.value = f.value(x);
  const Vector<Scalar> g = f.grad(x);
  out.gap = std::max(g.dot(x) - (V.transpose() * g).minCoeff(), Scalar(0));
  out.converged = out.gap <= tol;
  return out;
}

}  // namespace detail

// Minimizes f over C to Frank-Wolfe gap <= tol. Projectable bodies use
// accelerated projected gradient; polytopes use pairwise Frank-Wolfe.
// On budget exhaustion the best iterate is returned with converged = false.
template <typename Scalar>
MinimizeResult<Scalar> minimize_over_body(const SmoothObjective<Scalar>& f,
                                          const ConvexBody<Scalar>& C, Scalar tol,
                                          long max_iter,
                                          std::optional<Vector<Scalar>> start = std::nullopt) {
  require(tol > 0, "minimize_over_body: tol must be positive");
  if (C.kind() == BodyKind::kPolytope)
    return detail::pairwise_fw<Scalar>(f, C.vertex_matrix(), tol, max_iter);
  return detail::fista<Scalar>(f, C, start.value_or(canonical_point(C)), tol, max_iter);
}

// ---------------------------------------------------------------------------
// LASSO by coordinate descent on the penalized path.

template <typename Scalar>
struct LassoPathResult {
  Vector<Scalar> theta;
  Scalar lambda = 0;
  long sweeps = 0;
};

namespace detail {

template <typename Scalar>
long lasso_cd_penalized(const Matrix<Scalar>& G, const Vector<Scalar>& b, Scalar lam,
                        Vector<Scalar>& x, long max_sweeps) {
  const Eigen::Index p = b.size();
  Vector<Scalar> Gx = G * x;
  long sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    Scalar delta = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const Scalar gjj = G(j, j);
      if (gjj <= 0) continue;
      const Scalar rho = b(j) - (Gx(j) - gjj * x(j));
      Scalar nx = 0;
      if (rho > lam) nx = (rho - lam) / gjj;
      else if (rho < -lam) nx = (rho + lam) / gjj;
      const Scalar dx = nx - x(j);
      if (dx != 0) {
        Gx += dx * G.col(j);
        x(j) = nx;
        delta = std::max(delta, std::abs(dx));
      }
    }
    if (delta <= Scalar(1e-15)) break;
  }
  return sweep + 1;
}

}  // namespace detail

// argmin_{||theta||_1 <= R} (1/2n)||X theta - y||^2 via penalized coordinate
// descent with bisection on the penalty so that ||theta||_1 = R when the
// constraint binds.
template <typename Scalar>
LassoPathResult<Scalar> lasso_coordinate_descent(const Dataset<Scalar>& D, Scalar R,
                                                 long max_sweeps = 100000) {
  require(R > 0, "lasso_coordinate_descent: radius must be positive");
  const Matrix<Scalar>& G = D.gram();
  const Vector<Scalar>& b = D.xty();
  LassoPathResult<Scalar> out;
  Vector<Scalar> x = Vector<Scalar>::Zero(D.p());
  out.sweeps += detail::lasso_cd_penalized<Scalar>(G, b, Scalar(0), x, max_sweeps);
  if (x.template lpNorm<1>() <= R) {
    out.theta = x;
    return out;
  }
  Scalar lo = 0, hi = b.cwiseAbs().maxCoeff();
  Vector<Scalar> x_hi = Vector<Scalar>::Zero(D.p());
  for (int it = 0; it < 200; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    Vector<Scalar> xm = x_hi;
    out.sweeps += detail::lasso_cd_penalized<Scalar>(G, b, mid, xm, max_sweeps);
    const Scalar nm = xm.template lpNorm<1>();
    if (nm > R) {
      lo = mid;
    } else {
      hi = mid;
      x_hi = xm;
      if (R - nm <= Scalar(1e-14) * R) break;
    }
  }
  out.lambda = hi;
  out.theta = x_hi;
  return out;
}

// ---------------------------------------------------------------------------
// Exact solutions and excess risk.

template <typename Scalar>
struct OracleSolution {
  Vector<Scalar> theta_star;
  Scalar optimum_value = 0;
  Scalar gap_certificate = 0;
  Scalar tolerance = 0;
  std::string method;
  long iterations = 0;
  // |value(first method) - value(second method)| when cross-checked.
  std::optional<Scalar> cross_check_delta;
};

// Default oracle tolerance 1e-9 (1 + |L|) evaluated at the body's canonical
// point scale; refined once the optimum is known.
inline constexpr double kOracleRelTol = 1e-9;
inline constexpr long kOracleMaxIter = 10000000;

template <typename Scalar>
OracleSolution<Scalar> solve_exact(const ConvexBody<Scalar>& C, const LossSpec<Scalar>& spec,
                                   const Dataset<Scalar>& D, Scalar tol = Scalar(0)) {
  require_dim(C.dim(), D.p(), "solve_exact");
  require(D.n() > 0, "solve_exact: empty dataset");
  const SmoothObjective<Scalar> f = make_objective(spec, D);
  const bool relative = !(tol > 0);
  Scalar eff_tol = relative ? Scalar(kOracleRelTol) * (1 + std::abs(f.value(canonical_point(C)))) : tol;
  MinimizeResult<Scalar> r = minimize_over_body<Scalar>(f, C, eff_tol, kOracleMaxIter);
  if (relative) {
    const Scalar refined = Scalar(kOracleRelTol) * (1 + std::abs(r.value));
    if (refined < eff_tol) {
      eff_tol = refined;
      r = minimize_over_body<Scalar>(f, C, eff_tol, kOracleMaxIter, r.x);
    }
  }
  if (!r.converged)
    throw ConvergenceError("solve_exact: no convergence within 10^7 iterations (gap " +
                           std::to_string(double(r.gap)) + ")");
  OracleSolution<Scalar> sol;
  sol.theta_star = r.x;
  sol.optimum_value = loss(spec, r.x, D);
  sol.gap_certificate = r.gap;
  sol.tolerance = eff_tol;
  sol.method = r.method;
  sol.iterations = r.iterations;
  if (C.kind() == BodyKind::kL1Ball && spec.kind == LossKind::kSquaredError && spec.ridge == 0) {
    const LassoPathResult<Scalar> cd = lasso_coordinate_descent(D, C.radius());
    const Scalar cd_value = loss(spec, cd.theta, D);
    sol.cross_check_delta = std::abs(cd_value - sol.optimum_value);
    sol.method += "+coordinate_descent";
    if (cd_value < sol.optimum_value && contains(C, cd.theta)) {
      const Scalar cd_gap = std::max(detail::fw_gap(C, cd.theta, grad(spec, cd.theta, D)), Scalar(0));
      if (cd_gap <= eff_tol) {
        sol.theta_star = cd.theta;
        sol.optimum_value = cd_value;
        sol.gap_certificate = cd_gap;
      }
    }
  }
  return sol;
}

// L(theta) - L(theta*). Values below -gap_certificate are clamped there
// with a warning; infeasible theta is an error.
template <typename Scalar, typename Derived>
Scalar excess_risk(const Eigen::MatrixBase<Derived>& theta, const OracleSolution<Scalar>& sol,
                   const LossSpec<Scalar>& spec, const Dataset<Scalar>& D,
                   const ConvexBody<Scalar>& C) {
  const Vector<Scalar> t = theta;
  if (!contains(C, t)) throw InvalidArgument("excess_risk: theta is not feasible");
  const Scalar r = loss(spec, t, D) - sol.optimum_value;
  if (r < -sol.gap_certificate) {
    std::clog << "dperm: warning: excess risk " << double(r) << " below -gap certificate "
              << double(sol.gap_certificate) << "; clamped\n";
    return -sol.gap_certificate;
  }
  return r;
}

// Thread-safe memo of oracle solutions keyed by (dataset, body, loss).
// Concurrent requests for the same key share one solve.
class OracleCache {
 public:
  using Ptr = std::shared_ptr<const OracleSolution<double>>;

  Ptr get(const ConvexBody<double>& C, const LossSpec<double>& spec, const Dataset<double>& D) {
    const std::string key =
        std::to_string(D.fingerprint()) + "|" + C.describe() + "|" + spec.describe();
    std::promise<Ptr> promise;
    std::shared_future<Ptr> fut;
    bool owner = false;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = map_.find(key);
      if (it != map_.end()) {
        fut = it->second;
      } else {
        fut = promise.get_future().share();
        map_.emplace(key, fut);
        owner = true;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const OracleSolution<double>>(solve_exact(C, spec, D)));
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return fut.get();
  }

  std::size_t size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return map_.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_future<Ptr>> map_;
};

}  // namespace dperm

#endif  // DPERM_ORACLE_HPP_
