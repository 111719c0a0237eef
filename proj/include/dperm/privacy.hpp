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

// Privacy budgets, per-algorithm noise calibration, and the sampling
// primitives (Gaussian, Laplace, report-noisy-min, correlated Gaussian).
// Every logarithm is natural.

#ifndef DPERM_PRIVACY_HPP_
#define DPERM_PRIVACY_HPP_

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>

#include "dperm/core.hpp"

namespace dperm {

using Rng = std::mt19937_64;

// Generator for stream `id` of a master seed.
inline Rng make_rng(std::uint64_t master, std::uint64_t id = 0) {
  return Rng(stream_seed(master, id));
}

struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 1e-6;
  // False in non-private mode: calibration still uses (epsilon, delta) for
  // step counts, but every noise scale is zero.
  bool noise_enabled = true;

  static PrivacyBudget make(double epsilon, double delta) {
    require(epsilon > 0, "privacy budget: epsilon must be positive");
    require(delta > 0 && delta < 1, "privacy budget: delta must lie in (0, 1)");
    return PrivacyBudget{epsilon, delta, true};
  }

  // Sentinel with infinite epsilon: no noise, step counts hit their caps.
  static PrivacyBudget non_private(double delta = 1e-6) {
    return PrivacyBudget{std::numeric_limits<double>::infinity(), delta, false};
  }

  PrivacyBudget without_noise() const {
    PrivacyBudget b = *this;
    b.noise_enabled = false;
    return b;
  }

  bool is_private() const { return noise_enabled && std::isfinite(epsilon); }
};

enum class Mechanism { kNone, kGaussianPerStep, kLaplacePerScore, kObjPert, kSubGaussian };

inline const char* to_string(Mechanism m) {
  switch (m) {
    case Mechanism::kNone: return "none";
    case Mechanism::kGaussianPerStep: return "gaussian_per_step";
    case Mechanism::kLaplacePerScore: return "laplace_per_score";
    case Mechanism::kObjPert: return "objective_perturbation";
    case Mechanism::kSubGaussian: return "sub_gaussian";
  }
  return "unknown";
}

// Noise actually injected by a run, with a human-readable derivation.
struct NoisePlan {
  Mechanism mechanism = Mechanism::kNone;
  double sigma = 0.0;
  double laplace_scale = 0.0;
  double zeta = 0.0;
  long steps = 0;
  std::string trace;

  void note(const std::string& line) {
    if (!trace.empty()) trace += "; ";
    trace += line;
  }
};

// ---------------------------------------------------------------------------
// Calibration.

// sigma = sqrt(32 L^2 T) ln(T/delta) / (eps n).
inline double md_sigma(double L, long T, const PrivacyBudget& b, long n) {
  if (!b.is_private()) return 0.0;
  require(L >= 0 && T >= 1 && n >= 1, "md_sigma: need L >= 0, T >= 1, n >= 1");
  const double ratio = double(T) / b.delta;
  require(ratio > 1, "md_sigma: T/delta must exceed 1");
  return std::sqrt(32.0 * L * L * double(T)) * std::log(ratio) / (b.epsilon * double(n));
}

// b = L1 ||C||_1 sqrt(8 T ln(1/delta)) / (n eps).
inline double fw_laplace_scale(double L1, double l1_radius, long T, const PrivacyBudget& b,
                               long n) {
  require(b.delta < 1, "fw_laplace_scale: delta must be < 1");
  if (!b.is_private() || T == 0) return 0.0;
  require(L1 >= 0 && l1_radius >= 0 && T >= 0 && n >= 1,
          "fw_laplace_scale: need nonnegative constants and n >= 1");
  return L1 * l1_radius * std::sqrt(8.0 * double(T) * std::log(1.0 / b.delta)) /
         (double(n) * b.epsilon);
}

struct ObjPertPlan {
  double sigma = 0.0;
  double zeta = 0.0;
};

// sigma = L sqrt(2 ln(1/delta)) / (n eps); zeta = max(2 lmax/(n eps) - lmin, 0).
inline ObjPertPlan objpert_plan(double L2, double lambda_max, double lambda_min,
                                const PrivacyBudget& b, long n) {
  require(lambda_min <= lambda_max, "objpert_plan: lambda_min exceeds lambda_max");
  require(n >= 1, "objpert_plan: n must be >= 1");
  ObjPertPlan out;
  if (!b.is_private()) return out;
  const double ne = double(n) * b.epsilon;
  out.sigma = L2 * std::sqrt(2.0 * std::log(1.0 / b.delta)) / ne;
  out.zeta = std::max(2.0 * lambda_max / ne - lambda_min, 0.0);
  return out;
}

// Gaussian scale of the general-body private Frank-Wolfe step:
// sigma = sqrt(32 L2^2 T) ln(n/delta) / (n eps).
inline double fw_general_sigma(double L2, long T, const PrivacyBudget& b, long n) {
  if (!b.is_private() || T == 0) return 0.0;
  require(L2 >= 0 && T >= 0 && n >= 1, "fw_general_sigma: bad inputs");
  return std::sqrt(32.0 * L2 * L2 * double(T)) * std::log(double(n) / b.delta) /
         (double(n) * b.epsilon);
}

// ---------------------------------------------------------------------------
// Sampling.

template <typename Scalar = double>
Vector<Scalar> sample_gaussian_vec(Eigen::Index p, double sigma, Rng& rng) {
  require(sigma >= 0, "sample_gaussian_vec: sigma must be nonnegative");
  Vector<Scalar> v = Vector<Scalar>::Zero(p);
  if (sigma == 0) return v;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = Scalar(sigma * normal(rng));
  return v;
}

// Inverse-CDF Laplace draw from one uniform on [0, 1).
inline double sample_laplace(double scale, Rng& rng) {
  require(scale >= 0, "sample_laplace: scale must be nonnegative");
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng) - 0.5;
  while (u == -0.5) u = unif(rng) - 0.5;  // probability-zero endpoint
  const double a = std::abs(u);
  const double mag = -scale * std::log1p(-2.0 * a);
  return u < 0 ? -mag : mag;
}

// Index of the smallest score after adding independent Laplace(scale) noise
// to each score; lowest index wins ties.
template <typename Derived>
Eigen::Index report_noisy_min(const Eigen::MatrixBase<Derived>& scores, double scale, Rng& rng) {
  require(scores.size() >= 1, "report_noisy_min: empty score vector");
  require(scale >= 0, "report_noisy_min: scale must be nonnegative");
  for (Eigen::Index i = 0; i < scores.size(); ++i)
    if (std::isnan(double(scores(i)))) throw InvalidArgument("report_noisy_min: NaN score");
  Eigen::Index best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    double v = double(scores(i));
    if (scale > 0) v += sample_laplace(scale, rng);
    if (i == 0 || v < best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

// Mean-zero Gaussian with diagonal covariance `var` (entries >= 0).
template <typename Scalar = double>
Vector<Scalar> sub_gaussian_noise(const Vector<Scalar>& var, Rng& rng) {
  require((var.array() >= 0).all(), "sub_gaussian_noise: negative variance");
  Vector<Scalar> v = Vector<Scalar>::Zero(var.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < var.size(); ++i)
    if (var(i) > 0) v(i) = std::sqrt(var(i)) * Scalar(normal(rng));
  return v;
}

// Factor F with F F' = cov for a PSD covariance (eigendecomposition, so
// singular covariances are allowed). Throws when cov is not PSD.
template <typename Scalar = double>
Matrix<Scalar> covariance_factor(const Matrix<Scalar>& cov) {
  require(cov.rows() == cov.cols(), "covariance: matrix must be square");
  require_finite(cov, "covariance");
  const Scalar asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  const Scalar scale = std::max(Scalar(1), cov.cwiseAbs().maxCoeff());
  require(asym <= Scalar(1e-12) * scale, "covariance: matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(cov);
  const Vector<Scalar> ev = es.eigenvalues();
  if (ev.size() > 0 && ev.minCoeff() < -Scalar(1e-10) * scale)
    throw InvalidArgument("covariance: matrix is not positive semi-definite");
  return es.eigenvectors() * ev.cwiseMax(Scalar(0)).cwiseSqrt().asDiagonal();
}

template <typename Scalar = double>
Vector<Scalar> sample_with_factor(const Matrix<Scalar>& factor, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<Scalar> z(factor.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = Scalar(normal(rng));
  return factor * z;
}

// Mean-zero Gaussian with full covariance `cov`.
template <typename Scalar = double>
Vector<Scalar> sub_gaussian_noise(const Matrix<Scalar>& cov, Rng& rng) {
  return sample_with_factor<Scalar>(covariance_factor<Scalar>(cov), rng);
}

}  // namespace dperm

#endif  // DPERM_PRIVACY_HPP_
