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

// Datasets and 1/n-normalized convex losses, together with the constants the
// private solvers calibrate against: Lipschitz constants in l1/l2 geometry,
// the Frank-Wolfe curvature constant, and Hessian eigenvalue bounds.

#ifndef DPERM_LOSSES_HPP_
#define DPERM_LOSSES_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "dperm/core.hpp"
#include "dperm/geometry.hpp"

namespace dperm {

// Records (x_i, y_i) stored as the rows of X and entries of y. When the LASSO
// profile is declared every record must satisfy ||x||_inf <= 1, |y| <= 1;
// out-of-range records are rejected, never clipped.
template <typename Scalar>
class Dataset {
 public:
  using VectorT = Vector<Scalar>;
  using MatrixT = Matrix<Scalar>;

  Dataset(MatrixT X, VectorT y, bool lasso_profile = false)
      : X_(std::move(X)), y_(std::move(y)), lasso_(lasso_profile) {
    require(X_.rows() == y_.size(), "dataset: X and y disagree on n");
    require(X_.cols() >= 1, "dataset: need at least one feature");
    require_finite(X_, "dataset X");
    require_finite(y_, "dataset y");
    if (lasso_) {
      for (Eigen::Index i = 0; i < X_.rows(); ++i) {
        if (X_.row(i).cwiseAbs().maxCoeff() > Scalar(1) || std::abs(y_(i)) > Scalar(1))
          throw InvalidArgument("dataset: record " + std::to_string(i) +
                                " violates the LASSO domain (|x|_inf <= 1, |y| <= 1)");
      }
    }
    if (n() > 0) {
      gram_ = (X_.transpose() * X_) / Scalar(n());
      xty_ = (X_.transpose() * y_) / Scalar(n());
    } else {
      gram_ = MatrixT::Zero(p(), p());
      xty_ = VectorT::Zero(p());
    }
  }

  Eigen::Index n() const { return X_.rows(); }
  Eigen::Index p() const { return X_.cols(); }
  const MatrixT& X() const { return X_; }
  const VectorT& y() const { return y_; }
  bool lasso_profile() const { return lasso_; }
  // X'X / n and X'y / n.
  const MatrixT& gram() const { return gram_; }
  const VectorT& xty() const { return xty_; }

  // FNV-1a over the raw bytes of (n, p, X, y, profile).
  std::uint64_t fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const void* data, std::size_t len) {
      const auto* b = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= b[i];
        h *= 1099511628211ULL;
      }
    };
    const std::int64_t dims[2] = {std::int64_t(n()), std::int64_t(p())};
    mix(dims, sizeof(dims));
    mix(X_.data(), sizeof(Scalar) * std::size_t(X_.size()));
    mix(y_.data(), sizeof(Scalar) * std::size_t(y_.size()));
    const unsigned char flag = lasso_ ? 1 : 0;
    mix(&flag, 1);
    return h;
  }

 private:
  MatrixT X_;
  VectorT y_;
  bool lasso_;
  MatrixT gram_;
  VectorT xty_;
};

enum class LossKind { kSquaredError, kHuber, kCustom };

inline const char* to_string(LossKind k) {
  switch (k) {
    case LossKind::kSquaredError: return "squared_error";
    case LossKind::kHuber: return "huber";
    case LossKind::kCustom: return "custom";
  }
  return "unknown";
}

// Constants consumed by the solvers. Any field left empty is derived from
// the loss, body and data; custom losses must supply the ones they use.
template <typename Scalar>
struct LossConstants {
  std::optional<Scalar> l1_lipschitz;
  std::optional<Scalar> l2_lipschitz;
  std::optional<Scalar> curvature;
  std::optional<Scalar> lambda_min;
  std::optional<Scalar> lambda_max;
  std::optional<Scalar> strong_convexity;
};

template <typename Scalar>
struct LossSpec {
  using VectorT = Vector<Scalar>;
  using RecordLoss = std::function<Scalar(const VectorT& theta, const VectorT& x, Scalar y)>;
  using RecordGrad = std::function<VectorT(const VectorT& theta, const VectorT& x, Scalar y)>;

  LossKind kind = LossKind::kSquaredError;
  // Adds (ridge / 2) ||theta||_2^2 to every record's loss.
  Scalar ridge = 0;
  Scalar huber_delta = 1;
  RecordLoss record_loss;
  RecordGrad record_grad;
  LossConstants<Scalar> constants;

  static LossSpec squared_error(Scalar ridge = 0) {
    require(ridge >= 0, "squared_error: ridge must be nonnegative");
    LossSpec s;
    s.ridge = ridge;
    return s;
  }

  static LossSpec huber(Scalar delta, Scalar ridge = 0) {
    require(delta > 0, "huber: delta must be positive");
    require(ridge >= 0, "huber: ridge must be nonnegative");
    LossSpec s;
    s.kind = LossKind::kHuber;
    s.huber_delta = delta;
    s.ridge = ridge;
    return s;
  }

  static LossSpec custom(RecordLoss f, RecordGrad g, LossConstants<Scalar> c) {
    require(bool(f) && bool(g), "custom loss: both hooks are required");
    LossSpec s;
    s.kind = LossKind::kCustom;
    s.record_loss = std::move(f);
    s.record_grad = std::move(g);
    s.constants = c;
    return s;
  }

  std::string describe() const {
    std::string s = to_string(kind);
    if (kind == LossKind::kHuber) s += "(delta=" + std::to_string(double(huber_delta)) + ")";
    if (ridge > 0) s += "+ridge(" + std::to_string(double(ridge)) + ")";
    return s;
  }
};

// ---------------------------------------------------------------------------
// Values and gradients.

namespace detail {

template <typename Scalar>
Scalar huber_value(Scalar r, Scalar d) {
  const Scalar a = std::abs(r);
  return a <= d ? Scalar(0.5) * r * r : d * (a - Scalar(0.5) * d);
}

template <typename Scalar>
Scalar huber_slope(Scalar r, Scalar d) {
  return std::clamp(r, -d, d);
}

}  // namespace detail

template <typename Scalar, typename DT, typename DX>
Vector<Scalar> grad_single(const LossSpec<Scalar>& spec, const Eigen::MatrixBase<DT>& theta,
                           const Eigen::MatrixBase<DX>& x, Scalar y) {
  require_dim(x.size(), theta.size(), "grad_single");
  const Vector<Scalar> t = theta, xv = x;
  switch (spec.kind) {
    case LossKind::kSquaredError:
      return (xv.dot(t) - y) * xv + spec.ridge * t;
    case LossKind::kHuber:
      return detail::huber_slope(xv.dot(t) - y, spec.huber_delta) * xv + spec.ridge * t;
    case LossKind::kCustom:
      return spec.record_grad(t, xv, y) + spec.ridge * t;
  }
  return t;
}

template <typename Scalar, typename DT>
Scalar loss(const LossSpec<Scalar>& spec, const Eigen::MatrixBase<DT>& theta,
            const Dataset<Scalar>& D) {
  require(D.n() > 0, "loss: empty dataset");
  require_dim(theta.size(), D.p(), "loss");
  const Vector<Scalar> t = theta;
  const Scalar reg = Scalar(0.5) * spec.ridge * t.squaredNorm();
  switch (spec.kind) {
    case LossKind::kSquaredError: {
      const Vector<Scalar> r = D.X() * t - D.y();
      return Scalar(0.5) * r.squaredNorm() / Scalar(D.n()) + reg;
    }
    case LossKind::kHuber: {
      const Vector<Scalar> r = D.X() * t - D.y();
      Scalar s = 0;
      for (Eigen::Index i = 0; i < r.size(); ++i) s += detail::huber_value(r(i), spec.huber_delta);
      return s / Scalar(D.n()) + reg;
    }
    case LossKind::kCustom: {
      Scalar s = 0;
      for (Eigen::Index i = 0; i < D.n(); ++i)
        s += spec.record_loss(t, D.X().row(i).transpose(), D.y()(i));
      return s / Scalar(D.n()) + reg;
    }
  }
  return Scalar(0);
}

// Full empirical gradient. The squared error uses the cached moments
// (X'X/n) theta - X'y/n, which equals the record average up to rounding.
template <typename Scalar, typename DT>
Vector<Scalar> grad(const LossSpec<Scalar>& spec, const Eigen::MatrixBase<DT>& theta,
                    const Dataset<Scalar>& D) {
  require(D.n() > 0, "grad: empty dataset");
  require_dim(theta.size(), D.p(), "grad");
  const Vector<Scalar> t = theta;
  switch (spec.kind) {
    case LossKind::kSquaredError:
      return D.gram() * t - D.xty() + spec.ridge * t;
    case LossKind::kHuber: {
      Vector<Scalar> r = D.X() * t - D.y();
      for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = detail::huber_slope(r(i), spec.huber_delta);
      return D.X().transpose() * r / Scalar(D.n()) + spec.ridge * t;
    }
    case LossKind::kCustom: {
      Vector<Scalar> g = Vector<Scalar>::Zero(D.p());
      for (Eigen::Index i = 0; i < D.n(); ++i)
        g += spec.record_grad(t, D.X().row(i).transpose(), D.y()(i));
      return g / Scalar(D.n()) + spec.ridge * t;
    }
  }
  return t;
}

// Record-by-record average of grad_single, summed left to right.
template <typename Scalar, typename DT>
Vector<Scalar> grad_by_records(const LossSpec<Scalar>& spec, const Eigen::MatrixBase<DT>& theta,
                               const Dataset<Scalar>& D) {
  require(D.n() > 0, "grad_by_records: empty dataset");
  const Vector<Scalar> t = theta;
  Vector<Scalar> g = Vector<Scalar>::Zero(D.p());
  for (Eigen::Index i = 0; i < D.n(); ++i)
    g += grad_single(spec, t, D.X().row(i).transpose(), D.y()(i));
  return g / Scalar(D.n());
}

// ---------------------------------------------------------------------------
// Constants.

template <typename Scalar>
struct LipschitzPair {
  Scalar l1 = 0;  // bound on ||grad_single||_inf (Lipschitz w.r.t. l1)
  Scalar l2 = 0;  // bound on ||grad_single||_2
};

template <typename Scalar>
LipschitzPair<Scalar> lipschitz_constants(const LossSpec<Scalar>& spec,
                                          const ConvexBody<Scalar>& C,
                                          const Dataset<Scalar>& D) {
  require_dim(C.dim(), D.p(), "lipschitz_constants");
  LipschitzPair<Scalar> out;
  const auto& k = spec.constants;
  if (spec.kind == LossKind::kCustom) {
    if (!k.l1_lipschitz && !k.l2_lipschitz)
      throw InvalidArgument("lipschitz_constants: custom loss must supply its constants");
    out.l1 = k.l1_lipschitz.value_or(std::numeric_limits<Scalar>::quiet_NaN());
    out.l2 = k.l2_lipschitz.value_or(std::numeric_limits<Scalar>::quiet_NaN());
    return out;
  }
  const Scalar reg = spec.ridge * l2_radius(C);
  auto slope_cap = [&](Scalar residual_bound) {
    return spec.kind == LossKind::kHuber ? std::min(residual_bound, spec.huber_delta)
                                         : residual_bound;
  };
  if (D.lasso_profile()) {
    // Domain-wide: |<x, theta> - y| <= ||theta||_1 + 1 and ||x||_2 <= sqrt(p).
    const Scalar s = slope_cap(l1_radius(C) + Scalar(1));
    out.l1 = s + reg;
    out.l2 = s * std::sqrt(Scalar(D.p())) + reg;
  } else {
    Scalar b1 = 0, b2 = 0;
    for (Eigen::Index i = 0; i < D.n(); ++i) {
      const Vector<Scalar> x = D.X().row(i).transpose();
      const Scalar s = slope_cap(dual_norm(C, x) + std::abs(D.y()(i)));
      b1 = std::max(b1, s * x.cwiseAbs().maxCoeff());
      b2 = std::max(b2, s * x.norm());
    }
    out.l1 = b1 + reg;
    out.l2 = b2 + reg;
  }
  if (k.l1_lipschitz) out.l1 = *k.l1_lipschitz;
  if (k.l2_lipschitz) out.l2 = *k.l2_lipschitz;
  return out;
}

namespace detail {

// max over pairs of columns (a - b)' G (a - b), evaluated blockwise.
template <typename Scalar>
Scalar max_pairwise_quadratic(const Matrix<Scalar>& V, const Matrix<Scalar>& G) {
  const Matrix<Scalar> GV = G * V;
  const Vector<Scalar> diag = (V.cwiseProduct(GV)).colwise().sum().transpose();
  const Eigen::Index k = V.cols(), blk = 256;
  Scalar best = 0;
  for (Eigen::Index j0 = 0; j0 < k; j0 += blk) {
    const Eigen::Index nj = std::min(blk, k - j0);
    const Matrix<Scalar> W = V.transpose() * GV.middleCols(j0, nj);
    for (Eigen::Index j = 0; j < nj; ++j)
      for (Eigen::Index i = 0; i < k; ++i)
        best = std::max(best, diag(i) + diag(j0 + j) - 2 * W(i, j));
  }
  return best;
}

template <typename Scalar>
Scalar max_eigenvalue(const Matrix<Scalar>& G) {
  if (G.size() == 0) return Scalar(0);
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(G, Eigen::EigenvaluesOnly);
  return std::max(Scalar(0), es.eigenvalues().maxCoeff());
}

}  // namespace detail

// Upper bound on the curvature constant
//   sup (2/g^2) (L(a + g(b - a)) - L(a) - g <b - a, grad L(a)>)
// over a, b in C and g in (0, 1]. For the quadratic part this is
// sup (b - a)' H (b - a) with H = X'X/n, at most 4 max_C theta' H theta on
// symmetric bodies; asymmetric bodies use the exact pairwise vertex maximum.
template <typename Scalar>
Scalar curvature_bound(const LossSpec<Scalar>& spec, const ConvexBody<Scalar>& C,
                       const Dataset<Scalar>& D) {
  require_dim(C.dim(), D.p(), "curvature_bound");
  if (spec.constants.curvature) return *spec.constants.curvature;
  if (spec.kind == LossKind::kCustom)
    throw InvalidArgument("curvature_bound: custom loss must supply its curvature");
  const Scalar d = l2_diameter(C);
  const Scalar reg = spec.ridge * d * d;
  if (D.lasso_profile()) {
    // (b - a)' H (b - a) <= max_i <x_i, b - a>^2 <= ||b - a||_1^2 <= (2R)^2.
    const Scalar R = l1_radius(C);
    return 4 * R * R + reg;
  }
  const auto& G = D.gram();
  Scalar quad = 0;
  if (C.centrally_symmetric()) {
    switch (C.kind()) {
      case BodyKind::kL2Ball:
        quad = C.radius() * C.radius() * detail::max_eigenvalue(G);
        break;
      case BodyKind::kGroupedL1Ball:
        for (Eigen::Index j = 0; j < C.num_groups(); ++j) {
          auto [f, n] = C.group_range(j);
          quad = std::max(quad, detail::max_eigenvalue<Scalar>(G.block(f, f, n, n)));
        }
        quad *= C.radius() * C.radius();
        break;
      case BodyKind::kBox:
        if (!C.vertex_enumerable()) {
          const Scalar r = l2_radius(C);
          quad = r * r * detail::max_eigenvalue(G);
          break;
        }
        [[fallthrough]];
      default: {
        const Matrix<Scalar> V = vertices(C);
        quad = (V.cwiseProduct(G * V)).colwise().sum().maxCoeff();
      }
    }
    return 4 * std::max(quad, Scalar(0)) + reg;
  }
  if (!C.vertex_enumerable())
    throw InvalidArgument("curvature_bound: asymmetric body without a vertex list");
  return detail::max_pairwise_quadratic<Scalar>(vertices(C), G) + reg;
}

namespace detail {

// L(c) - L(a) - <c - a, grad L(a)>. The squared error uses the exact
// second-order form, which avoids cancellation when c is close to a.
template <typename Scalar>
Scalar linearization_remainder(const LossSpec<Scalar>& spec, const Vector<Scalar>& a,
                               const Vector<Scalar>& c, const Dataset<Scalar>& D) {
  const Vector<Scalar> d = c - a;
  if (spec.kind == LossKind::kSquaredError)
    return Scalar(0.5) * (D.X() * d).squaredNorm() / Scalar(D.n()) +
           Scalar(0.5) * spec.ridge * d.squaredNorm();
  return loss(spec, c, D) - loss(spec, a, D) - d.dot(grad(spec, a, D));
}

}  // namespace detail

// Lower estimate of the curvature constant from `trials` sampled triples
// (a, b, g); a and b are LMO points of random directions or mixtures of two.
template <typename Scalar>
Scalar curvature_empirical(const LossSpec<Scalar>& spec, const ConvexBody<Scalar>& C,
                           const Dataset<Scalar>& D, long trials, std::uint64_t seed) {
  require(trials >= 1, "curvature_empirical: trials must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Eigen::Index p = C.dim();
  auto direction = [&] {
    Vector<Scalar> d(p);
    for (Eigen::Index i = 0; i < p; ++i) d(i) = Scalar(normal(gen));
    return d;
  };
  auto sample_point = [&] {
    const Vector<Scalar> u = lmo(C, direction());
    if (unif(gen) < 0.5) return u;
    const Scalar w = Scalar(unif(gen));
    return Vector<Scalar>(w * u + (1 - w) * lmo(C, direction()));
  };
  Scalar best = 0;
  for (long t = 0; t < trials; ++t) {
    const Vector<Scalar> a = sample_point(), b = sample_point();
    const Scalar g = Scalar(1.0 - unif(gen));  // (0, 1]
    const Vector<Scalar> c = a + g * (b - a);
    const Scalar v = (2 / (g * g)) * detail::linearization_remainder(spec, a, c, D);
    best = std::max(best, v);
  }
  return best;
}

template <typename Scalar>
struct EigenBounds {
  Scalar lambda_min = 0;
  Scalar lambda_max = 0;
};

// Bounds on the eigenvalues of the per-record Hessian x x' + ridge I.
template <typename Scalar>
EigenBounds<Scalar> hessian_eig_bounds(const LossSpec<Scalar>& spec, const ConvexBody<Scalar>& C,
                                       const Dataset<Scalar>& D) {
  require_dim(C.dim(), D.p(), "hessian_eig_bounds");
  EigenBounds<Scalar> out;
  const auto& k = spec.constants;
  if (spec.kind == LossKind::kCustom && !(k.lambda_min && k.lambda_max))
    throw InvalidArgument("hessian_eig_bounds: custom loss must supply lambda_min/lambda_max");
  Scalar top = 0, bottom = 0;
  if (D.lasso_profile()) {
    top = Scalar(D.p());
  } else if (D.n() > 0) {
    top = D.X().rowwise().squaredNorm().maxCoeff();
  }
  // A rank-one Hessian is singular unless p = 1 (and Huber's flat zone is
  // always flat).
  if (D.p() == 1 && spec.kind == LossKind::kSquaredError && D.n() > 0 && !D.lasso_profile())
    bottom = D.X().col(0).cwiseAbs2().minCoeff();
  out.lambda_min = bottom + spec.ridge;
  out.lambda_max = top + spec.ridge;
  if (k.lambda_min) out.lambda_min = *k.lambda_min;
  if (k.lambda_max) out.lambda_max = *k.lambda_max;
  return out;
}

// Strong-convexity modulus of the empirical loss w.r.t. the l2 norm that the
// library can certify (the ridge term), unless declared explicitly.
template <typename Scalar>
Scalar strong_convexity(const LossSpec<Scalar>& spec) {
  if (spec.constants.strong_convexity) return *spec.constants.strong_convexity;
  return spec.ridge;
}

}  // namespace dperm

#endif  // DPERM_LOSSES_HPP_
