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

// Mirror maps: value, gradient, Bregman divergence, and the constrained
// mirror step argmin_{x in C} <eta g, x> + B(x, x_t).

#ifndef DPERM_POTENTIALS_HPP_
#define DPERM_POTENTIALS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dperm/core.hpp"
#include "dperm/detail/simplex_lp.hpp"
#include "dperm/geometry.hpp"

namespace dperm {

enum class PotentialKind { kSquaredL2, kNegativeEntropy, kPolytopeQNorm, kGroupedL1 };

inline const char* to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::kSquaredL2: return "squared_l2";
    case PotentialKind::kNegativeEntropy: return "negative_entropy";
    case PotentialKind::kPolytopeQNorm: return "polytope_qnorm";
    case PotentialKind::kGroupedL1: return "grouped_l1";
  }
  return "unknown";
}

// Norm with respect to which a potential's strong-convexity modulus holds.
enum class ReferenceNorm { kL2, kL1, kCoefficientL1, kGroupedL1 };

// Coordinates below this value are clamped before taking logarithms.
inline constexpr double kEntropyFloor = 1e-12;

template <typename Scalar>
class Potential {
 public:
  using VectorT = Vector<Scalar>;
  using MatrixT = Matrix<Scalar>;

  // 0.5 ||x - center||_2^2.
  static Potential squared_l2(VectorT center) {
    require(center.size() >= 1, "squared_l2: empty center");
    require_finite(center, "squared_l2 center");
    Potential P(PotentialKind::kSquaredL2, center.size());
    P.center_ = std::move(center);
    return P;
  }

  // sum_i x_i ln x_i, plus ln p when `shifted` so the range on the simplex
  // is [0, ln p].
  static Potential negative_entropy(Eigen::Index p, bool shifted = true) {
    Potential P(PotentialKind::kNegativeEntropy, p);
    P.shifted_ = shifted;
    return P;
  }

  // ||a||_q^2 / (4(q - 1)) on coefficient vectors a in R^k with x = V a.
  // q <= 0 selects the default ln k / (ln k - 1), or 2 when k < 8.
  static Potential polytope_qnorm(MatrixT vertices, Scalar q = Scalar(0)) {
    const Eigen::Index k = vertices.cols();
    require(k >= 1, "polytope_qnorm: need at least one vertex");
    if (q <= 0) q = default_q(k);
    require(q > 1 && q <= 2, "polytope_qnorm: q must lie in (1, 2]");
    Potential P(PotentialKind::kPolytopeQNorm, k);
    P.V_ = std::move(vertices);
    P.q_ = q;
    return P;
  }

  // (1/(M xi)) sum_j ||x_(j)||_2^M over consecutive blocks of size g, with
  // (M, xi) chosen from the block count m = ceil(p / g):
  //   m = 1: (2, 1);  m = 2: (2, 1/2);  m >= 3: (1 + 1/ln m, 1/(e ln m)).
  static Potential grouped_l1(Eigen::Index p, Eigen::Index group_size) {
    require(group_size >= 1 && group_size <= p,
            "grouped_l1: group size must lie in [1, p]");
    Potential P(PotentialKind::kGroupedL1, p);
    P.group_ = group_size;
    const Eigen::Index m = (p + group_size - 1) / group_size;
    if (m == 1) {
      P.M_ = 2;
      P.xi_ = 1;
    } else if (m == 2) {
      P.M_ = 2;
      P.xi_ = Scalar(0.5);
    } else {
      const Scalar lm = std::log(Scalar(m));
      P.M_ = 1 + 1 / lm;
      P.xi_ = 1 / (std::exp(Scalar(1)) * lm);
    }
    return P;
  }

  static Scalar default_q(Eigen::Index k) {
    if (k < 8) return Scalar(2);
    const Scalar lk = std::log(Scalar(k));
    return lk / (lk - 1);
  }

  PotentialKind kind() const { return kind_; }
  // Dimension of the potential's argument (k for the coefficient-space
  // q-norm potential, p otherwise).
  Eigen::Index dim() const { return dim_; }
  const VectorT& center() const { return center_; }
  bool shifted() const { return shifted_; }
  const MatrixT& vertex_matrix() const { return V_; }
  Scalar q() const { return q_; }
  Scalar M() const { return M_; }
  Scalar xi() const { return xi_; }
  Eigen::Index group_size() const { return group_; }
  Eigen::Index num_groups() const { return (dim_ + group_ - 1) / group_; }
  std::pair<Eigen::Index, Eigen::Index> group_range(Eigen::Index j) const {
    const Eigen::Index first = j * group_;
    return {first, std::min(group_, dim_ - first)};
  }

  // True when iterates live in coefficient space rather than R^p.
  bool coefficient_space() const { return kind_ == PotentialKind::kPolytopeQNorm; }

  ReferenceNorm reference_norm() const {
    switch (kind_) {
      case PotentialKind::kSquaredL2: return ReferenceNorm::kL2;
      case PotentialKind::kNegativeEntropy: return ReferenceNorm::kL1;
      case PotentialKind::kPolytopeQNorm: return ReferenceNorm::kCoefficientL1;
      case PotentialKind::kGroupedL1: return ReferenceNorm::kGroupedL1;
    }
    return ReferenceNorm::kL2;
  }

  std::string describe() const {
    std::string s = std::string(to_string(kind_)) + "(dim=" + std::to_string(dim_);
    if (kind_ == PotentialKind::kNegativeEntropy) s += shifted_ ? ",shifted" : ",unshifted";
    if (kind_ == PotentialKind::kPolytopeQNorm) s += ",q=" + std::to_string(double(q_));
    if (kind_ == PotentialKind::kGroupedL1)
      s += ",g=" + std::to_string(group_) + ",M=" + std::to_string(double(M_)) +
           ",xi=" + std::to_string(double(xi_));
    return s + ")";
  }

 private:
  Potential(PotentialKind kind, Eigen::Index dim) : kind_(kind), dim_(dim) {
    require(dim >= 1, "potential: dimension must be >= 1");
  }

  PotentialKind kind_;
  Eigen::Index dim_;
  VectorT center_;
  bool shifted_ = true;
  MatrixT V_;
  Scalar q_ = 2;
  Scalar M_ = 2;
  Scalar xi_ = 1;
  Eigen::Index group_ = 1;
};

namespace detail {

template <typename Scalar>
Scalar log_sum_exp(const Vector<Scalar>& v) {
  const Scalar m = v.maxCoeff();
  if (!std::isfinite(double(m))) return m;
  return m + std::log((v.array() - m).exp().sum());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Value and gradient.

template <typename Scalar, typename Derived>
Scalar value(const Potential<Scalar>& P, const Eigen::MatrixBase<Derived>& x_in) {
  require_dim(x_in.size(), P.dim(), "potential value");
  const Vector<Scalar> x = x_in;
  require_finite(x, "potential value");
  switch (P.kind()) {
    case PotentialKind::kSquaredL2:
      return Scalar(0.5) * (x - P.center()).squaredNorm();
    case PotentialKind::kNegativeEntropy: {
      require(x.minCoeff() >= -kFeasTol, "negative_entropy: negative coordinate");
      Scalar s = 0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const Scalar xi = std::max(x(i), Scalar(kEntropyFloor));
        s += xi * std::log(xi);
      }
      return P.shifted() ? s + std::log(Scalar(P.dim())) : s;
    }
    case PotentialKind::kPolytopeQNorm: {
      const Scalar n = x.cwiseAbs().array().pow(P.q()).sum();
      return std::pow(n, Scalar(2) / P.q()) / (4 * (P.q() - 1));
    }
    case PotentialKind::kGroupedL1: {
      Scalar s = 0;
      for (Eigen::Index j = 0; j < P.num_groups(); ++j) {
        auto [f, n] = P.group_range(j);
        s += std::pow(x.segment(f, n).norm(), P.M());
      }
      return s / (P.M() * P.xi());
    }
  }
  return Scalar(0);
}

template <typename Scalar, typename Derived>
Vector<Scalar> grad(const Potential<Scalar>& P, const Eigen::MatrixBase<Derived>& x_in) {
  require_dim(x_in.size(), P.dim(), "potential grad");
  const Vector<Scalar> x = x_in;
  require_finite(x, "potential grad");
  switch (P.kind()) {
    case PotentialKind::kSquaredL2:
      return x - P.center();
    case PotentialKind::kNegativeEntropy:
      return (x.array().max(Scalar(kEntropyFloor)).log() + Scalar(1)).matrix();
    case PotentialKind::kPolytopeQNorm: {
      const Scalar q = P.q();
      const Scalar nq = std::pow(x.cwiseAbs().array().pow(q).sum(), 1 / q);
      if (nq == Scalar(0)) return Vector<Scalar>::Zero(x.size());
      const Scalar c = std::pow(nq, 2 - q) / (2 * (q - 1));
      return x.unaryExpr([&](Scalar v) {
        const Scalar a = std::pow(std::abs(v), q - 1);
        return v < 0 ? -c * a : c * a;
      });
    }
    case PotentialKind::kGroupedL1: {
      Vector<Scalar> g = Vector<Scalar>::Zero(x.size());
      for (Eigen::Index j = 0; j < P.num_groups(); ++j) {
        auto [f, n] = P.group_range(j);
        const Scalar r = x.segment(f, n).norm();
        if (r > 0) g.segment(f, n) = x.segment(f, n) * (std::pow(r, P.M() - 2) / P.xi());
      }
      return g;
    }
  }
  return x;
}

template <typename Scalar, typename DA, typename DB>
Scalar bregman(const Potential<Scalar>& P, const Eigen::MatrixBase<DA>& a,
               const Eigen::MatrixBase<DB>& b) {
  const Vector<Scalar> av = a, bv = b;
  return value(P, av) - value(P, bv) - grad(P, bv).dot(av - bv);
}

// Minimum-l1 representation a of a point x = V a for the q-norm potential,
// as an LP over signed coefficients. Throws if x is outside span(V).
template <typename Scalar, typename Derived>
Vector<Scalar> min_l1_coefficients(const Matrix<Scalar>& V,
                                   const Eigen::MatrixBase<Derived>& x_in) {
  const Vector<Scalar> x = x_in;
  require_dim(x.size(), V.rows(), "min_l1_coefficients");
  const Eigen::Index k = V.cols();
  Matrix<Scalar> A(V.rows(), 2 * k);
  A << V, -V;
  auto res = detail::solve_standard_lp<Scalar>(A, x, Vector<Scalar>::Ones(2 * k));
  if (res.status != detail::LpStatus::kOptimal)
    throw InvalidArgument("min_l1_coefficients: point outside the vertex span");
  return res.x.head(k) - res.x.tail(k);
}

// Potential value at a point of R^p. For the q-norm potential this evaluates
// the coefficient potential at the minimum-l1 representation of x.
template <typename Scalar, typename Derived>
Scalar value_at_point(const Potential<Scalar>& P, const Eigen::MatrixBase<Derived>& x) {
  if (!P.coefficient_space()) return value(P, x);
  return value(P, min_l1_coefficients(P.vertex_matrix(), x));
}

// ---------------------------------------------------------------------------
// Constants.

// Upper bound on the potential over its domain body.
template <typename Scalar>
Scalar max_over_domain(const Potential<Scalar>& P, const ConvexBody<Scalar>& C) {
  switch (P.kind()) {
    case PotentialKind::kSquaredL2: {
      require(C.dim() == P.dim(), "max_over_domain: dimension mismatch");
      const Scalar d = l2_diameter(C);
      return Scalar(0.5) * d * d;
    }
    case PotentialKind::kNegativeEntropy:
      require(C.kind() == BodyKind::kSimplex && C.dim() == P.dim(),
              "max_over_domain: negative entropy needs its simplex");
      return P.shifted() ? std::log(Scalar(P.dim())) : Scalar(0);
    case PotentialKind::kPolytopeQNorm:
      // Coefficient space is the simplex; the max sits at a unit vector.
      return Scalar(1) / (4 * (P.q() - 1));
    case PotentialKind::kGroupedL1:
      require(C.kind() == BodyKind::kGroupedL1Ball && C.dim() == P.dim(),
              "max_over_domain: grouped potential needs a grouped l1 ball");
      return std::pow(C.radius(), P.M()) / (P.M() * P.xi());
  }
  throw InvalidArgument("max_over_domain: unsupported pair");
}

// Strong-convexity modulus with respect to `reference_norm()`.
//  squared_l2: 1 (l2).  negative_entropy: 1 (l1, Pinsker).
//  polytope_qnorm: 0.5 k^{-2(1-1/q)} w.r.t. the l1 norm of coefficients,
//    i.e. 0.5 (modulus w.r.t. ||.||_q) times the l1-to-lq comparison.
//  grouped_l1: 1 w.r.t. the grouped norm on its unit ball.
template <typename Scalar>
Scalar strong_convexity_modulus(const Potential<Scalar>& P) {
  switch (P.kind()) {
    case PotentialKind::kSquaredL2:
    case PotentialKind::kNegativeEntropy:
    case PotentialKind::kGroupedL1:
      return Scalar(1);
    case PotentialKind::kPolytopeQNorm:
      return Scalar(0.5) * std::pow(Scalar(P.dim()), -2 * (1 - 1 / P.q()));
  }
  return Scalar(1);
}

// Reference norm of a vector for the potential.
template <typename Scalar, typename Derived>
Scalar reference_norm_value(const Potential<Scalar>& P, const Eigen::MatrixBase<Derived>& v) {
  switch (P.reference_norm()) {
    case ReferenceNorm::kL2: return v.norm();
    case ReferenceNorm::kL1:
    case ReferenceNorm::kCoefficientL1: return v.template lpNorm<1>();
    case ReferenceNorm::kGroupedL1: {
      Scalar s = 0;
      for (Eigen::Index j = 0; j < P.num_groups(); ++j) {
        auto [f, n] = P.group_range(j);
        s += v.segment(f, n).norm();
      }
      return s;
    }
  }
  return v.norm();
}

// ---------------------------------------------------------------------------
// Mirror step.

template <typename Scalar>
struct MirrorStep {
  Vector<Scalar> point;
  int iterations = 0;     // inner iterations (0 for closed forms)
  Scalar residual = 0;    // inner optimality residual
  bool converged = true;
};

namespace detail {

inline constexpr int kInnerMaxIter = 10000;

// argmin_{a in simplex} <c, a> + ||a||_q^2 / (4(q-1)). KKT gives
// a_i = u_i / sum(u) with u_i = (2(q-1)(lam - c_i)_+)^{1/(q-1)} and lam the
// root of phi(lam) = ln sum(u) - (2 - q) ln ||u||_q, which increases from
// -inf (lam -> min c) to +inf.
template <typename Scalar>
MirrorStep<Scalar> qnorm_simplex_step(const Vector<Scalar>& c, Scalar q) {
  const Eigen::Index k = c.size();
  const Scalar kappa = 1 / (q - 1);
  const Scalar lc = std::log(2 * (q - 1));
  const Scalar cmin = c.minCoeff();
  Vector<Scalar> logu(k);
  auto eval = [&](Scalar lam) {
    for (Eigen::Index i = 0; i < k; ++i) {
      const Scalar a = lam - c(i);
      logu(i) = a > 0 ? kappa * (lc + std::log(a)) : -std::numeric_limits<Scalar>::infinity();
    }
    const Scalar lsum = log_sum_exp(logu);
    const Vector<Scalar> qlogu = q * logu;
    const Scalar lnorm = log_sum_exp(qlogu) / q;
    return lsum - (2 - q) * lnorm;
  };
  MirrorStep<Scalar> out;
  Scalar span = std::max(Scalar(1), c.cwiseAbs().maxCoeff());
  Scalar lo = cmin, hi = cmin + span;
  while (eval(hi) < 0) {
    lo = hi;
    span *= 2;
    hi = cmin + span;
    require(std::isfinite(double(hi)), "qnorm mirror step: bracket overflow");
  }
  int it = 0;
  Scalar phi = 0;
  for (; it < 300; ++it) {
    const Scalar mid = lo + (hi - lo) / 2;
    if (mid <= lo || mid >= hi) break;
    phi = eval(mid);
    if (phi < 0) lo = mid; else hi = mid;
  }
  phi = eval(hi);
  const Scalar lsum = log_sum_exp(logu);
  out.point = (logu.array() - lsum).exp().matrix();
  out.iterations = it;
  out.residual = std::abs(phi);
  out.converged = true;
  return out;
}

// argmin_{sum_j ||x_j|| <= r} <c, x> + (1/(M xi)) sum_j ||x_j||^M.
template <typename Scalar>
MirrorStep<Scalar> grouped_step(const Potential<Scalar>& P, Scalar r,
                                const Vector<Scalar>& c) {
  const Eigen::Index m = P.num_groups();
  Vector<Scalar> cn(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    auto [f, n] = P.group_range(j);
    cn(j) = c.segment(f, n).norm();
  }
  const Scalar e = 1 / (P.M() - 1);
  auto radii = [&](Scalar lam) {
    Vector<Scalar> rho(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const Scalar a = cn(j) - lam;
      rho(j) = a > 0 ? std::exp(e * std::log(P.xi() * a)) : Scalar(0);
    }
    return rho;
  };
  MirrorStep<Scalar> out;
  Vector<Scalar> rho = radii(0);
  int it = 0;
  if (rho.sum() > r) {
    Scalar lo = 0, hi = cn.maxCoeff();
    for (; it < 300; ++it) {
      const Scalar mid = lo + (hi - lo) / 2;
      if (mid <= lo || mid >= hi) break;
      if (radii(mid).sum() > r) lo = mid; else hi = mid;
    }
    rho = radii(hi);
    out.residual = std::abs(rho.sum() - r);
  }
  out.point = Vector<Scalar>::Zero(c.size());
  for (Eigen::Index j = 0; j < m; ++j) {
    auto [f, n] = P.group_range(j);
    if (cn(j) > 0 && rho(j) > 0) out.point.segment(f, n) = -rho(j) * c.segment(f, n) / cn(j);
  }
  out.iterations = it;
  return out;
}

}  // namespace detail

// argmin_{x in C} <eta g, x> + B(x, x_t). For the q-norm potential C is the
// coefficient simplex and x_t, g are coefficient-space vectors.
template <typename Scalar, typename DX, typename DG>
MirrorStep<Scalar> mirror_step(const Potential<Scalar>& P, const ConvexBody<Scalar>& C,
                               const Eigen::MatrixBase<DX>& x_t,
                               const Eigen::MatrixBase<DG>& g, Scalar eta) {
  require(eta > 0, "mirror_step: eta must be positive");
  require_dim(x_t.size(), P.dim(), "mirror_step point");
  require_dim(g.size(), P.dim(), "mirror_step gradient");
  require_dim(C.dim(), P.dim(), "mirror_step body");
  require_finite(g, "mirror_step gradient");
  const Vector<Scalar> xt = x_t;
  MirrorStep<Scalar> out;
  switch (P.kind()) {
    case PotentialKind::kSquaredL2:
      out.point = euclidean_project(C, xt - eta * g);
      return out;
    case PotentialKind::kNegativeEntropy: {
      require(C.kind() == BodyKind::kSimplex,
              "mirror_step: negative entropy is defined on the simplex");
      const Vector<Scalar> lw =
          xt.array().max(Scalar(kEntropyFloor)).log().matrix() - eta * g;
      const Scalar z = detail::log_sum_exp(lw);
      Vector<Scalar> x = (lw.array() - z).exp().max(Scalar(kEntropyFloor)).matrix();
      out.point = x / x.sum();
      return out;
    }
    case PotentialKind::kPolytopeQNorm: {
      require(C.kind() == BodyKind::kSimplex,
              "mirror_step: q-norm potential steps over the coefficient simplex");
      const Vector<Scalar> c = eta * g - grad(P, xt);
      return detail::qnorm_simplex_step<Scalar>(c, P.q());
    }
    case PotentialKind::kGroupedL1: {
      require(C.kind() == BodyKind::kGroupedL1Ball && C.group_size() == P.group_size(),
              "mirror_step: grouped potential needs a matching grouped l1 ball");
      const Vector<Scalar> c = eta * g - grad(P, xt);
      return detail::grouped_step<Scalar>(P, C.radius(), c);
    }
  }
  return out;
}

}  // namespace dperm

#endif  // DPERM_POTENTIALS_HPP_
