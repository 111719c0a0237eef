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

// Convex constraint sets and the geometric primitives the solvers consume:
// membership, linear minimization, gauge and dual norms, diameters,
// Euclidean projection, and a Monte Carlo Gaussian-width estimator.

#ifndef DPERM_GEOMETRY_HPP_
#define DPERM_GEOMETRY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "dperm/core.hpp"
#include "dperm/detail/simplex_lp.hpp"

namespace dperm {

enum class BodyKind { kL2Ball, kL1Ball, kSimplex, kPolytope, kGroupedL1Ball, kBox };

inline const char* to_string(BodyKind k) {
  switch (k) {
    case BodyKind::kL2Ball: return "l2_ball";
    case BodyKind::kL1Ball: return "l1_ball";
    case BodyKind::kSimplex: return "simplex";
    case BodyKind::kPolytope: return "polytope";
    case BodyKind::kGroupedL1Ball: return "grouped_l1_ball";
    case BodyKind::kBox: return "box";
  }
  return "unknown";
}

// Largest vertex list accepted for a V-polytope.
inline constexpr Eigen::Index kMaxPolytopeVertices = 10000;
// Largest dimension for which a box's 2^p corners are enumerated.
inline constexpr Eigen::Index kMaxBoxEnumerationDim = 16;

template <typename Scalar>
class ConvexBody {
 public:
  using VectorT = Vector<Scalar>;
  using MatrixT = Matrix<Scalar>;

  static ConvexBody l2_ball(Eigen::Index p, Scalar radius) {
    ConvexBody b(BodyKind::kL2Ball, p);
    require(radius > 0, "l2_ball: radius must be positive");
    b.radius_ = radius;
    return b;
  }

  static ConvexBody l1_ball(Eigen::Index p, Scalar radius) {
    ConvexBody b(BodyKind::kL1Ball, p);
    require(radius > 0, "l1_ball: radius must be positive");
    b.radius_ = radius;
    return b;
  }

  static ConvexBody simplex(Eigen::Index p) {
    return ConvexBody(BodyKind::kSimplex, p);
  }

  // Convex hull of the columns of `vertices` (p x k).
  static ConvexBody polytope(MatrixT vertices) {
    require(vertices.cols() >= 1, "polytope: need at least one vertex");
    require(vertices.cols() <= kMaxPolytopeVertices,
            "polytope: more than 10^4 vertices");
    require_finite(vertices, "polytope vertices");
    ConvexBody b(BodyKind::kPolytope, vertices.rows());
    b.V_ = std::move(vertices);
    b.symmetric_ = b.detect_polytope_symmetry();
    return b;
  }

  // {x : sum_g ||x_g||_2 <= radius}, groups are consecutive blocks of size g
  // (the last block may be shorter).
  static ConvexBody grouped_l1_ball(Eigen::Index p, Scalar radius,
                                    Eigen::Index group_size) {
    ConvexBody b(BodyKind::kGroupedL1Ball, p);
    require(radius > 0, "grouped_l1_ball: radius must be positive");
    require(group_size >= 1 && group_size <= p,
            "grouped_l1_ball: group size must lie in [1, p]");
    b.radius_ = radius;
    b.group_ = group_size;
    return b;
  }

  static ConvexBody box(VectorT lo, VectorT hi) {
    require(lo.size() == hi.size(), "box: lo/hi dimension mismatch");
    require_finite(lo, "box lo");
    require_finite(hi, "box hi");
    require((hi.array() >= lo.array()).all(), "box: lo must not exceed hi");
    ConvexBody b(BodyKind::kBox, lo.size());
    b.symmetric_ = ((lo + hi).array().abs() <= Scalar(0)).all();
    b.lo_ = std::move(lo);
    b.hi_ = std::move(hi);
    return b;
  }

  BodyKind kind() const { return kind_; }
  Eigen::Index dim() const { return p_; }
  Scalar radius() const { return radius_; }
  Eigen::Index group_size() const { return group_; }
  Eigen::Index num_groups() const { return (p_ + group_ - 1) / group_; }
  const MatrixT& vertex_matrix() const { return V_; }
  const VectorT& lo() const { return lo_; }
  const VectorT& hi() const { return hi_; }
  bool centrally_symmetric() const { return symmetric_; }

  // Half-open coordinate range [first, first + size) of group `j`.
  std::pair<Eigen::Index, Eigen::Index> group_range(Eigen::Index j) const {
    const Eigen::Index first = j * group_;
    return {first, std::min(group_, p_ - first)};
  }

  // True when the body is the convex hull of a finite list that
  // `vertices()` can produce.
  bool vertex_enumerable() const {
    switch (kind_) {
      case BodyKind::kL1Ball:
      case BodyKind::kSimplex:
      case BodyKind::kPolytope:
        return true;
      case BodyKind::kBox:
        return p_ <= kMaxBoxEnumerationDim;
      default:
        return false;
    }
  }

  // Short human-readable description; also used as a cache key component.
  std::string describe() const {
    std::string s = std::string(to_string(kind_)) + "(p=" + std::to_string(p_);
    switch (kind_) {
      case BodyKind::kL2Ball:
      case BodyKind::kL1Ball:
        s += ",r=" + format(radius_);
        break;
      case BodyKind::kGroupedL1Ball:
        s += ",r=" + format(radius_) + ",g=" + std::to_string(group_);
        break;
      case BodyKind::kPolytope:
        s += ",k=" + std::to_string(V_.cols()) + ",h=" + std::to_string(hash(V_));
        break;
      case BodyKind::kBox:
        s += ",h=" + std::to_string(hash(lo_) ^ (hash(hi_) << 1));
        break;
      case BodyKind::kSimplex:
        break;
    }
    return s + ")";
  }

 private:
  ConvexBody(BodyKind kind, Eigen::Index p) : kind_(kind), p_(p) {
    require(p >= 1, "convex body: dimension must be >= 1");
    symmetric_ = kind == BodyKind::kL2Ball || kind == BodyKind::kL1Ball ||
                 kind == BodyKind::kGroupedL1Ball;
  }

  static std::string format(Scalar v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", static_cast<double>(v));
    return buf;
  }

  template <typename Derived>
  static std::uint64_t hash(const Eigen::MatrixBase<Derived>& m) {
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        const double d = static_cast<double>(m(i, j));
        std::uint64_t bits;
        std::memcpy(&bits, &d, sizeof(bits));
        for (int b = 0; b < 8; ++b) {
          h ^= (bits >> (8 * b)) & 0xffU;
          h *= 1099511628211ULL;
        }
      }
    }
    return h;
  }

  bool detect_polytope_symmetry() const;

  BodyKind kind_;
  Eigen::Index p_;
  Scalar radius_ = Scalar(1);
  Eigen::Index group_ = 1;
  MatrixT V_;
  VectorT lo_, hi_;
  bool symmetric_ = false;
};

using Body = ConvexBody<double>;

struct WidthEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

// Polytope membership as an LP feasibility problem over convex weights.
template <typename Scalar>
bool polytope_contains(const Matrix<Scalar>& V, const Vector<Scalar>& x) {
  const Eigen::Index p = V.rows(), k = V.cols();
  // Cheap exits: a listed vertex, or a single-vertex body.
  for (Eigen::Index j = 0; j < k; ++j)
    if ((V.col(j) - x).cwiseAbs().maxCoeff() <= Scalar(kFeasTol)) return true;
  if (k == 1) return false;
  Matrix<Scalar> A(p + 1, k);
  A.topRows(p) = V;
  A.row(p).setOnes();
  Vector<Scalar> b(p + 1);
  b << x, Scalar(1);
  Vector<Scalar> c = Vector<Scalar>::Zero(k);
  // Phase I alone decides feasibility.
  auto res = solve_standard_lp<Scalar>(A, b, c, Scalar(1e-12), Scalar(kFeasTol));
  return res.status == LpStatus::kOptimal;
}

}  // namespace detail

template <typename Scalar>
bool ConvexBody<Scalar>::detect_polytope_symmetry() const {
  // Match each vertex's negation on a 1e-9 grid first; fall back to an LP
  // membership test for the leftovers (vertex lists may hold interior points).
  const double q = 1e9;
  auto key = [&](const VectorT& v) {
    std::vector<long long> k(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
      k[static_cast<std::size_t>(i)] =
          std::llround(static_cast<double>(v(i)) * q);
    return k;
  };
  std::map<std::vector<long long>, int> seen;
  for (Eigen::Index j = 0; j < V_.cols(); ++j) seen[key(V_.col(j))] = 1;
  for (Eigen::Index j = 0; j < V_.cols(); ++j) {
    const VectorT neg = -V_.col(j);
    if (seen.count(key(neg))) continue;
    if (!detail::polytope_contains<Scalar>(V_, neg)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Membership.

template <typename Scalar, typename Derived>
bool contains(const ConvexBody<Scalar>& C, const Eigen::MatrixBase<Derived>& x_in) {
  require_dim(x_in.size(), C.dim(), "contains");
  const Vector<Scalar> x = x_in;
  if (!x.allFinite()) return false;
  const Scalar tol = Scalar(kFeasTol);
  switch (C.kind()) {
    case BodyKind::kL2Ball:
      return x.norm() <= C.radius() + tol;
    case BodyKind::kL1Ball:
      return x.template lpNorm<1>() <= C.radius() + tol;
    case BodyKind::kSimplex:
      return x.minCoeff() >= -tol && std::abs(x.sum() - Scalar(1)) <= tol;
    case BodyKind::kPolytope:
      return detail::polytope_contains<Scalar>(C.vertex_matrix(), x);
    case BodyKind::kGroupedL1Ball: {
      Scalar s = 0;
      for (Eigen::Index j = 0; j < C.num_groups(); ++j) {
        auto [f, n] = C.group_range(j);
        s += x.segment(f, n).norm();
      }
      return s <= C.radius() + tol;
    }
    case BodyKind::kBox:
      return ((x - C.lo()).array() >= -tol).all() &&
             ((C.hi() - x).array() >= -tol).all();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Vertex lists.

// Generating list of a vertex-enumerable body as columns, in the order that
// defines LMO tie-breaking: L1Ball -> +r e1, -r e1, +r e2, ...; Simplex -> e_i;
// Box -> corner with bit i selecting hi_i, indexed by sum_i bit_i 2^i.
template <typename Scalar>
Matrix<Scalar> vertices(const ConvexBody<Scalar>& C) {
  const Eigen::Index p = C.dim();
  switch (C.kind()) {
    case BodyKind::kL1Ball: {
      Matrix<Scalar> V = Matrix<Scalar>::Zero(p, 2 * p);
      for (Eigen::Index i = 0; i < p; ++i) {
        V(i, 2 * i) = C.radius();
        V(i, 2 * i + 1) = -C.radius();
      }
      return V;
    }
    case BodyKind::kSimplex:
      return Matrix<Scalar>::Identity(p, p);
    case BodyKind::kPolytope:
      return C.vertex_matrix();
    case BodyKind::kBox: {
      require(p <= kMaxBoxEnumerationDim, "vertices: box dimension too large");
      const Eigen::Index k = Eigen::Index(1) << p;
      Matrix<Scalar> V(p, k);
      for (Eigen::Index j = 0; j < k; ++j)
        for (Eigen::Index i = 0; i < p; ++i)
          V(i, j) = ((j >> i) & 1) ? C.hi()(i) : C.lo()(i);
      return V;
    }
    default:
      throw InvalidArgument(std::string("vertices: ") + to_string(C.kind()) +
                            " is not vertex-enumerable");
  }
}

// ---------------------------------------------------------------------------
// Linear minimization oracle.

template <typename Scalar, typename Derived>
Vector<Scalar> lmo(const ConvexBody<Scalar>& C, const Eigen::MatrixBase<Derived>& d_in) {
  require_dim(d_in.size(), C.dim(), "lmo");
  const Vector<Scalar> d = d_in;
  require_finite(d, "lmo direction");
  const Eigen::Index p = C.dim();
  Vector<Scalar> out = Vector<Scalar>::Zero(p);
  Eigen::Index i = 0;
  switch (C.kind()) {
    case BodyKind::kL2Ball: {
      const Scalar nd = d.norm();
      if (nd == Scalar(0)) {
        out(0) = C.radius();
      } else {
        out = -C.radius() * d / nd;
      }
      return out;
    }
    case BodyKind::kL1Ball:
      d.cwiseAbs().maxCoeff(&i);
      out(i) = d(i) > 0 ? -C.radius() : C.radius();
      return out;
    case BodyKind::kSimplex:
      d.minCoeff(&i);
      out(i) = Scalar(1);
      return out;
    case BodyKind::kPolytope: {
      const Vector<Scalar> s = C.vertex_matrix().transpose() * d;
      s.minCoeff(&i);
      return C.vertex_matrix().col(i);
    }
    case BodyKind::kGroupedL1Ball: {
      Scalar best = -1;
      Eigen::Index arg = 0;
      for (Eigen::Index j = 0; j < C.num_groups(); ++j) {
        auto [f, n] = C.group_range(j);
        const Scalar v = d.segment(f, n).norm();
        if (v > best) {
          best = v;
          arg = j;
        }
      }
      if (best == Scalar(0)) {
        out(0) = C.radius();
        return out;
      }
      auto [f, n] = C.group_range(arg);
      out.segment(f, n) = -C.radius() * d.segment(f, n) / best;
      return out;
    }
    case BodyKind::kBox:
      for (Eigen::Index k = 0; k < p; ++k)
        out(k) = d(k) >= 0 ? C.lo()(k) : C.hi()(k);
      return out;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Norms.

template <typename Scalar, typename Derived>
Scalar dual_norm(const ConvexBody<Scalar>& C, const Eigen::MatrixBase<Derived>& v_in) {
  require_dim(v_in.size(), C.dim(), "dual_norm");
  const Vector<Scalar> v = v_in;
  switch (C.kind()) {
    case BodyKind::kL2Ball:
      return C.radius() * v.norm();
    case BodyKind::kL1Ball:
      return C.radius() * v.cwiseAbs().maxCoeff();
    case BodyKind::kSimplex:
      return v.cwiseAbs().maxCoeff();
    case BodyKind::kPolytope:
      return (C.vertex_matrix().transpose() * v).cwiseAbs().maxCoeff();
    case BodyKind::kGroupedL1Ball: {
      Scalar best = 0;
      for (Eigen::Index j = 0; j < C.num_groups(); ++j) {
        auto [f, n] = C.group_range(j);
        best = std::max(best, v.segment(f, n).norm());
      }
      return C.radius() * best;
    }
    case BodyKind::kBox: {
      const auto a = C.lo().cwiseProduct(v).array();
      const auto b = C.hi().cwiseProduct(v).array();
      const Scalar hi = a.max(b).sum();
      const Scalar lo = a.min(b).sum();
      return std::max(std::abs(hi), std::abs(lo));
    }
  }
  return Scalar(0);
}

template <typename Scalar>
bool is_centrally_symmetric(const ConvexBody<Scalar>& C) {
  return C.centrally_symmetric();
}

// Gauge min{r >= 0 : v in rC}; defined for centrally symmetric bodies only.
template <typename Scalar, typename Derived>
Scalar minkowski_norm(const ConvexBody<Scalar>& C, const Eigen::MatrixBase<Derived>& v_in) {
  require_dim(v_in.size(), C.dim(), "minkowski_norm");
  const Vector<Scalar> v = v_in;
  require_finite(v, "minkowski_norm");
  if (!C.centrally_symmetric())
    throw InvalidArgument(std::string("minkowski_norm: ") + to_string(C.kind()) +
                          " body is not centrally symmetric");
  switch (C.kind()) {
    case BodyKind::kL2Ball:
      return v.norm() / C.radius();
    case BodyKind::kL1Ball:
      return v.template lpNorm<1>() / C.radius();
    case BodyKind::kGroupedL1Ball: {
      Scalar s = 0;
      for (Eigen::Index j = 0; j < C.num_groups(); ++j) {
        auto [f, n] = C.group_range(j);
        s += v.segment(f, n).norm();
      }
      return s / C.radius();
    }
    case BodyKind::kBox: {
      Scalar r = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (C.hi()(i) > 0) {
          r = std::max(r, std::abs(v(i)) / C.hi()(i));
        } else if (v(i) != Scalar(0)) {
          throw InvalidArgument("minkowski_norm: vector outside the box span");
        }
      }
      return r;
    }
    case BodyKind::kPolytope: {
      if (v.cwiseAbs().maxCoeff() == Scalar(0)) return Scalar(0);
      // min sum(a+ + a-) s.t. V (a+ - a-) = v, a+/- >= 0.
      const auto& V = C.vertex_matrix();
      const Eigen::Index k = V.cols();
      Matrix<Scalar> A(V.rows(), 2 * k);
      A.leftCols(k) = V;
      A.rightCols(k) = -V;
      Vector<Scalar> c = Vector<Scalar>::Ones(2 * k);
      auto res = detail::solve_standard_lp<Scalar>(A, v, c);
      if (res.status == detail::LpStatus::kInfeasible)
        throw InvalidArgument("minkowski_norm: vector outside the polytope span");
      if (res.status != detail::LpStatus::kOptimal)
        throw ConvergenceError("minkowski_norm: LP did not reach optimality");
      return res.objective;
    }
    default:
      break;
  }
  throw InvalidArgument("minkowski_norm: unsupported body");
}

// ---------------------------------------------------------------------------
// Size functionals.

template <typename Scalar>
Scalar l2_diameter(const ConvexBody<Scalar>& C) {
  switch (C.kind()) {
    case BodyKind::kL2Ball:
    case BodyKind::kL1Ball:
    case BodyKind::kGroupedL1Ball:
      return 2 * C.radius();
    case BodyKind::kSimplex:
      return C.dim() > 1 ? std::sqrt(Scalar(2)) : Scalar(0);
    case BodyKind::kBox:
      return (C.hi() - C.lo()).norm();
    case BodyKind::kPolytope: {
      const auto& V = C.vertex_matrix();
      // ||a - b||^2 = |a|^2 + |b|^2 - 2 a.b, evaluated blockwise.
      const Vector<Scalar> sq = V.colwise().squaredNorm().transpose();
      Scalar best = 0;
      const Eigen::Index k = V.cols(), blk = 256;
      for (Eigen::Index j0 = 0; j0 < k; j0 += blk) {
        const Eigen::Index nj = std::min(blk, k - j0);
        const Matrix<Scalar> G = V.transpose() * V.middleCols(j0, nj);
        for (Eigen::Index j = 0; j < nj; ++j)
          for (Eigen::Index i = 0; i < k; ++i)
            best = std::max(best, sq(i) + sq(j0 + j) - 2 * G(i, j));
      }
      return std::sqrt(std::max(best, Scalar(0)));
    }
  }
  return Scalar(0);
}

template <typename Scalar>
Scalar l1_radius(const ConvexBody<Scalar>& C) {
  switch (C.kind()) {
    case BodyKind::kL2Ball:
      return C.radius() * std::sqrt(Scalar(C.dim()));
    case BodyKind::kL1Ball:
      return C.radius();
    case BodyKind::kSimplex:
      return Scalar(1);
    case BodyKind::kPolytope:
      return C.vertex_matrix().cwiseAbs().colwise().sum().maxCoeff();
    case BodyKind::kGroupedL1Ball:
      return C.radius() * std::sqrt(Scalar(std::min(C.group_size(), C.dim())));
    case BodyKind::kBox:
      return C.lo().cwiseAbs().cwiseMax(C.hi().cwiseAbs()).sum();
  }
  return Scalar(0);
}

// Largest Euclidean norm over the body.
template <typename Scalar>
Scalar l2_radius(const ConvexBody<Scalar>& C) {
  switch (C.kind()) {
    case BodyKind::kL2Ball:
    case BodyKind::kL1Ball:
    case BodyKind::kGroupedL1Ball:
      return C.radius();
    case BodyKind::kSimplex:
      return Scalar(1);
    case BodyKind::kPolytope:
      return C.vertex_matrix().colwise().norm().maxCoeff();
    case BodyKind::kBox:
      return C.lo().cwiseAbs().cwiseMax(C.hi().cwiseAbs()).norm();
  }
  return Scalar(0);
}

// Center for balls and boxes, barycenter for the simplex and polytopes.
template <typename Scalar>
Vector<Scalar> canonical_point(const ConvexBody<Scalar>& C) {
  const Eigen::Index p = C.dim();
  switch (C.kind()) {
    case BodyKind::kSimplex:
      return Vector<Scalar>::Constant(p, Scalar(1) / Scalar(p));
    case BodyKind::kPolytope:
      return C.vertex_matrix().rowwise().mean();
    case BodyKind::kBox:
      return (C.lo() + C.hi()) / Scalar(2);
    default:
      return Vector<Scalar>::Zero(p);
  }
}

// Centrally symmetric body Q containing C: conv(C, -C) for the simplex
// (the unit l1 ball) and polytopes, the smallest enclosing symmetric box for
// an asymmetric box, and C itself when C is already symmetric.
template <typename Scalar>
ConvexBody<Scalar> symmetric_hull(const ConvexBody<Scalar>& C) {
  if (C.centrally_symmetric()) return C;
  switch (C.kind()) {
    case BodyKind::kSimplex:
      return ConvexBody<Scalar>::l1_ball(C.dim(), Scalar(1));
    case BodyKind::kPolytope: {
      const auto& V = C.vertex_matrix();
      require(2 * V.cols() <= kMaxPolytopeVertices,
              "symmetric_hull: doubled vertex list exceeds 10^4");
      Matrix<Scalar> W(V.rows(), 2 * V.cols());
      W << V, -V;
      return ConvexBody<Scalar>::polytope(std::move(W));
    }
    case BodyKind::kBox: {
      const Vector<Scalar> m = C.lo().cwiseAbs().cwiseMax(C.hi().cwiseAbs());
      return ConvexBody<Scalar>::box(-m, m);
    }
    default:
      return C;
  }
}

// ---------------------------------------------------------------------------
// Euclidean projection.

namespace detail {

// Projection of a nonnegative vector onto {u >= 0, sum u = s}.
template <typename Scalar>
Vector<Scalar> project_capped_simplex(const Vector<Scalar>& x, Scalar s) {
  std::vector<Scalar> u(x.data(), x.data() + x.size());
  std::sort(u.begin(), u.end(), std::greater<Scalar>());
  Scalar cum = 0, tau = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cum += u[j];
    const Scalar t = (cum - s) / Scalar(j + 1);
    if (u[j] - t > 0) tau = t;
  }
  return (x.array() - tau).cwiseMax(Scalar(0)).matrix();
}

}  // namespace detail

template <typename Scalar, typename Derived>
Vector<Scalar> euclidean_project(const ConvexBody<Scalar>& C,
                                 const Eigen::MatrixBase<Derived>& x_in) {
  require_dim(x_in.size(), C.dim(), "euclidean_project");
  const Vector<Scalar> x = x_in;
  require_finite(x, "euclidean_project");
  switch (C.kind()) {
    case BodyKind::kL2Ball: {
      const Scalar nx = x.norm();
      return nx <= C.radius() ? x : Vector<Scalar>(x * (C.radius() / nx));
    }
    case BodyKind::kSimplex:
      return detail::project_capped_simplex<Scalar>(x, Scalar(1));
    case BodyKind::kL1Ball: {
      if (x.template lpNorm<1>() <= C.radius()) return x;
      const Vector<Scalar> a =
          detail::project_capped_simplex<Scalar>(x.cwiseAbs(), C.radius());
      return a.cwiseProduct(x.unaryExpr([](Scalar v) {
        return v < 0 ? Scalar(-1) : Scalar(1);
      }));
    }
    case BodyKind::kBox:
      return x.cwiseMax(C.lo()).cwiseMin(C.hi());
    case BodyKind::kGroupedL1Ball: {
      const Eigen::Index m = C.num_groups();
      Vector<Scalar> norms(m);
      for (Eigen::Index j = 0; j < m; ++j) {
        auto [f, n] = C.group_range(j);
        norms(j) = x.segment(f, n).norm();
      }
      if (norms.sum() <= C.radius()) return x;
      const Vector<Scalar> target =
          detail::project_capped_simplex<Scalar>(norms, C.radius());
      Vector<Scalar> out = Vector<Scalar>::Zero(x.size());
      for (Eigen::Index j = 0; j < m; ++j) {
        auto [f, n] = C.group_range(j);
        if (norms(j) > 0) out.segment(f, n) = x.segment(f, n) * (target(j) / norms(j));
      }
      return out;
    }
    case BodyKind::kPolytope:
      break;
  }
  throw InvalidArgument("euclidean_project: unsupported for polytope bodies");
}

// ---------------------------------------------------------------------------
// Gaussian width, E sup_{w in C} |<g, w>| with g ~ N(0, I).

template <typename Scalar>
WidthEstimate gaussian_width_mc(const ConvexBody<Scalar>& C, long samples,
                                std::uint64_t seed) {
  require(samples >= 1, "gaussian_width_mc: samples must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> g(C.dim());
  // Welford accumulation keeps the variance stable for large sample counts.
  double mean = 0.0, m2 = 0.0;
  for (long s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = Scalar(normal(gen));
    const double v = static_cast<double>(dual_norm(C, g));
    const double delta = v - mean;
    mean += delta / double(s + 1);
    m2 += delta * (v - mean);
  }
  WidthEstimate w;
  w.mean = mean;
  w.std_error = samples > 1 ? std::sqrt(m2 / double(samples - 1)) / std::sqrt(double(samples)) : 0.0;
  w.samples = samples;
  w.seed = seed;
  return w;
}

}  // namespace dperm

#endif  // DPERM_GEOMETRY_HPP_
