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

#include "dperm/privacy.hpp"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "support/formula.hpp"

namespace dperm {
namespace {

using testing::Formula;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

TEST(BudgetTest, Validation) {
  EXPECT_THROW(PrivacyBudget::make(0, 1e-6), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::make(1, 0), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::make(1, 1), InvalidArgument);
  EXPECT_TRUE(PrivacyBudget::make(1, 1e-6).is_private());
  EXPECT_FALSE(PrivacyBudget::non_private().is_private());
  EXPECT_FALSE(PrivacyBudget::make(1, 1e-6).without_noise().is_private());
}

TEST(CalibrationTest, WorkedExamples) {
  const PrivacyBudget b = PrivacyBudget::make(1.0, 1e-6);
  const double s = md_sigma(1.0, 100, b, 1000);
  EXPECT_NEAR(s * s, 1.08582, 1e-5);
  EXPECT_NEAR(s, 1.04202, 2e-5);  // exact value 1.0420311, truncated
  EXPECT_EQ(md_sigma(1.0, 100, PrivacyBudget::non_private(), 1000), 0.0);
  const double s2 = md_sigma(1.0, 100, b, 2000);
  EXPECT_NEAR(s2 * s2, s * s / 4, 1e-14);
  EXPECT_THROW(md_sigma(1.0, 1, PrivacyBudget{1.0, 1.0, true}, 10), InvalidArgument);

  EXPECT_NEAR(fw_laplace_scale(1, 1, 64, b, 10000), 8.411e-3, 1e-6);
  EXPECT_EQ(fw_laplace_scale(1, 1, 0, b, 10000), 0.0);
  EXPECT_NEAR(fw_laplace_scale(3, 2, 64, b, 10000), 6 * fw_laplace_scale(1, 1, 64, b, 10000), 1e-15);

  const ObjPertPlan op = objpert_plan(1, 1, 0, b, 1000);
  EXPECT_NEAR(op.sigma, 5.2565e-3, 1e-7);
  EXPECT_DOUBLE_EQ(op.zeta, 2e-3);
  EXPECT_EQ(objpert_plan(1, 1, 0.5, b, 1000).zeta, 0.0);
  const ObjPertPlan np = objpert_plan(1, 1, 0, PrivacyBudget::non_private(), 1000);
  EXPECT_EQ(np.sigma, 0.0);
  EXPECT_EQ(np.zeta, 0.0);
  EXPECT_THROW(objpert_plan(1, 0, 1, b, 1000), InvalidArgument);
}

TEST(CalibrationTest, MatchesFormulaStrings) {
  Rng gen(42);
  std::uniform_real_distribution<double> u(0, 1);
  for (int r = 0; r < 1000; ++r) {
    const double L = std::exp(6 * u(gen) - 3), R = std::exp(4 * u(gen) - 2);
    const long T = 1 + long(std::exp(12 * u(gen)));
    const long n = 10 + long(std::exp(14 * u(gen)));
    const double eps = std::exp(6 * u(gen) - 4), delta = std::exp(-2 - 20 * u(gen));
    const double lmax = std::exp(4 * u(gen) - 2), lmin = lmax * u(gen);
    const PrivacyBudget b = PrivacyBudget::make(eps, delta);
    const Formula::Env env{{"L", L}, {"R", R}, {"T", double(T)}, {"n", double(n)}, {"eps", eps},
                           {"delta", delta}, {"lmax", lmax}, {"lmin", lmin}};
    EXPECT_LE(rel(md_sigma(L, T, b, n), Formula::eval("sqrt(32*L^2*T*ln(T/delta)^2/(eps*n)^2)", env)), 1e-12);
    EXPECT_LE(rel(fw_laplace_scale(L, R, T, b, n), Formula::eval("L*R*sqrt(8*T*ln(1/delta))/(n*eps)", env)),
              1e-12);
    const ObjPertPlan op = objpert_plan(L, lmax, lmin, b, n);
    EXPECT_LE(rel(op.sigma, Formula::eval("sqrt(L^2*2*ln(1/delta)/(n*eps)^2)", env)), 1e-12);
    const double zeta = Formula::eval("max(2*lmax/(n*eps) - lmin, 0)", env);
    if (zeta == 0) {
      EXPECT_EQ(op.zeta, 0.0);
    } else {
      EXPECT_LE(std::abs(op.zeta - zeta), 1e-12 * (2 * lmax / (n * eps)));
    }
    EXPECT_LE(rel(fw_general_sigma(L, T, b, n), Formula::eval("sqrt(32*L^2*T*ln(n/delta)^2/(n*eps)^2)", env)),
              1e-12);
  }
}

TEST(SamplingTest, GaussianVector) {
  Rng a(1), b(1);
  EXPECT_EQ(sample_gaussian_vec(5, 0.0, a), VectorXd::Zero(5));
  EXPECT_EQ(sample_gaussian_vec(7, 2.0, a), sample_gaussian_vec(7, 2.0, b));
  Rng gen(2);
  const VectorXd v = sample_gaussian_vec(1000000, 1.5, gen);
  const double var = (v.array() - v.mean()).square().sum() / (v.size() - 1);
  EXPECT_LE(std::abs(var / 2.25 - 1), 0.01);
  EXPECT_THROW(sample_gaussian_vec(3, -1.0, gen), InvalidArgument);
}

TEST(SamplingTest, LaplaceMeanAbsolute) {
  Rng gen(3);
  double s = 0, m = 0;
  const int N = 1000000;
  for (int i = 0; i < N; ++i) {
    const double x = sample_laplace(0.7, gen);
    s += std::abs(x);
    m += x;
  }
  EXPECT_LE(std::abs(s / N / 0.7 - 1), 0.01);
  EXPECT_LE(std::abs(m / N), 0.005);
  EXPECT_EQ(sample_laplace(0.0, gen), 0.0);
}

TEST(NoisyMinTest, WorkedExamples) {
  Rng gen(4);
  Eigen::Vector3d s(3, 1, 2);
  EXPECT_EQ(report_noisy_min(s, 0.0, gen), 1);
  EXPECT_EQ(report_noisy_min(Eigen::Vector3d(2, 1, 1), 0.0, gen), 1);
  int zeros = 0;
  for (int t = 0; t < 10000; ++t) zeros += report_noisy_min(Eigen::Vector2d(0, 10), 1.0, gen) == 0;
  EXPECT_GE(zeros, 9900);
  EXPECT_THROW(report_noisy_min(Eigen::Vector2d(0, NAN), 1.0, gen), InvalidArgument);
  EXPECT_THROW(report_noisy_min(VectorXd(0), 1.0, gen), InvalidArgument);
}

TEST(NoisyMinTest, ScaleZeroIsExactArgmin) {
  Rng gen(5);
  std::uniform_int_distribution<int> d(-3, 3);
  for (int r = 0; r < 2000; ++r) {
    VectorXd v(1 + r % 9);
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = d(gen);
    Eigen::Index want;
    v.minCoeff(&want);  // Eigen returns the first minimum
    EXPECT_EQ(report_noisy_min(v, 0.0, gen), want);
  }
}

TEST(NoisyMinTest, SelectionFrequencyMatchesLaplaceDifference) {
  // P[0 + L1 > 1 + L2] = P[L1 - L2 > 1] = (1/2) e^{-1/b} (1 + 1/(2b)) for b = 1.
  Rng gen(6);
  int ones = 0;
  const int N = 200000;
  for (int t = 0; t < N; ++t) ones += report_noisy_min(Eigen::Vector2d(0, 1), 1.0, gen) == 1;
  const double want = 0.5 * std::exp(-1.0) * 1.5;
  EXPECT_NEAR(double(ones) / N, want, 4 * std::sqrt(want * (1 - want) / N));
}

TEST(SubGaussianTest, DiagonalAndFull) {
  Rng a(7), b(7);
  const VectorXd var = VectorXd::Constant(6, 0.09);
  const VectorXd x = sub_gaussian_noise(var, a), y = sample_gaussian_vec(6, 0.3, b);
  EXPECT_LE((x - y).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(sub_gaussian_noise(VectorXd(VectorXd::Zero(4)), a), VectorXd::Zero(4));
  EXPECT_EQ(sub_gaussian_noise(MatrixXd(MatrixXd::Zero(3, 3)), a), VectorXd::Zero(3));
  MatrixXd bad(2, 2);
  bad << 1, 2, 2, 1;
  EXPECT_THROW(sub_gaussian_noise(bad, a), InvalidArgument);
}

TEST(SubGaussianTest, EmpiricalCovarianceWithinThreeStandardErrors) {
  MatrixXd cov(3, 3);
  cov << 2.0, 0.6, -0.3, 0.6, 1.0, 0.2, -0.3, 0.2, 0.5;
  const MatrixXd F = covariance_factor(cov);
  EXPECT_LE((F * F.transpose() - cov).cwiseAbs().maxCoeff(), 1e-12);
  Rng gen(8);
  const int N = 100000;
  MatrixXd S = MatrixXd::Zero(3, 3), S2 = MatrixXd::Zero(3, 3);
  for (int t = 0; t < N; ++t) {
    const VectorXd z = sample_with_factor(F, gen);
    const MatrixXd zz = z * z.transpose();
    S += zz;
    S2 += zz.cwiseProduct(zz);
  }
  const MatrixXd mean = S / N;
  const MatrixXd se = ((S2 / N - mean.cwiseProduct(mean)) / N).cwiseSqrt();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_LE(std::abs(mean(i, j) - cov(i, j)), 3 * se(i, j)) << i << "," << j;
}

TEST(StreamTest, DeterministicAndIndependent) {
  Rng a = make_rng(99, 3), b = make_rng(99, 3);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
  Rng s = make_rng(99, 0), t = make_rng(99, 1);
  std::normal_distribution<double> nd;
  const int N = 100000;
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < N; ++i) {
    const double x = nd(s), y = nd(t);
    sxy += x * y;
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
  }
  const double cxy = sxy / N - sx * sy / N / N;
  const double rho = cxy / std::sqrt((sxx / N - sx * sx / N / N) * (syy / N - sy * sy / N / N));
  EXPECT_LT(std::abs(rho), 0.01);
  EXPECT_NE(stream_seed(1, 2), stream_seed(2, 1));
}

}  // namespace
}  // namespace dperm
