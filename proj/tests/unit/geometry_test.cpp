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

#include "dperm/geometry.hpp"

#include <cmath>
#include <random>

#include "gtest/gtest.h"

namespace dperm {
namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd cols(std::initializer_list<std::initializer_list<double>> vs) {
  const Eigen::Index k = static_cast<Eigen::Index>(vs.size());
  const Eigen::Index p = static_cast<Eigen::Index>(vs.begin()->size());
  MatrixXd V(p, k);
  Eigen::Index j = 0;
  for (auto& v : vs) V.col(j++) = vec(v);
  return V;
}

Body triangle() { return Body::polytope(cols({{1, 0}, {0, 1}, {-1, -1}})); }
Body cross2() { return Body::polytope(cols({{1, 0}, {-1, 0}, {0, 1}, {0, -1}})); }

TEST(ContainsTest, WorkedExamples) {
  EXPECT_TRUE(contains(Body::l1_ball(2, 1.0), vec({0.5, -0.5})));
  EXPECT_FALSE(contains(Body::simplex(3), vec({0.5, 0.5, 0.1})));
  EXPECT_TRUE(contains(triangle(), vec({0, 0})));
  EXPECT_FALSE(contains(triangle(), vec({1, 1})));
}

TEST(ContainsTest, ToleranceIsAbsoluteOneNanoUnit) {
  const Body b = Body::l1_ball(2, 1.0);
  EXPECT_TRUE(contains(b, vec({1.0 + 5e-10, 0})));
  EXPECT_FALSE(contains(b, vec({1.0 + 5e-9, 0})));
  EXPECT_TRUE(contains(triangle(), vec({1.0 + 5e-10, 0})));
  EXPECT_FALSE(contains(triangle(), vec({1.0 + 1e-6, 0})));
}

TEST(ContainsTest, DimensionMismatchThrows) {
  EXPECT_THROW(contains(Body::l2_ball(3, 1.0), vec({0, 0})), InvalidArgument);
}

TEST(BodyTest, InvalidConstruction) {
  EXPECT_THROW(Body::l2_ball(0, 1.0), InvalidArgument);
  EXPECT_THROW(Body::l1_ball(2, 0.0), InvalidArgument);
  EXPECT_THROW(Body::polytope(MatrixXd(2, 0)), InvalidArgument);
  EXPECT_THROW(Body::polytope(MatrixXd::Zero(2, 10001)), InvalidArgument);
  EXPECT_THROW(Body::box(vec({1}), vec({0})), InvalidArgument);
  EXPECT_THROW(Body::grouped_l1_ball(4, 1.0, 5), InvalidArgument);
}

TEST(LmoTest, WorkedExamples) {
  const VectorXd a = lmo(Body::l1_ball(3, 1.0), vec({1, -3, 2}));
  EXPECT_EQ(a, vec({0, 1, 0}));
  EXPECT_DOUBLE_EQ(a.dot(vec({1, -3, 2})), -3.0);
  const VectorXd b = lmo(Body::l2_ball(2, 1.0), vec({3, 4}));
  EXPECT_NEAR(b(0), -0.6, 1e-15);
  EXPECT_NEAR(b(1), -0.8, 1e-15);
  EXPECT_EQ(lmo(Body::simplex(3), vec({0.2, -0.1, 0.5})), vec({0, 1, 0}));
}

TEST(LmoTest, TiesBreakToLowestIndex) {
  EXPECT_EQ(lmo(Body::simplex(3), vec({0.1, 0.1, 0.1})), vec({1, 0, 0}));
  EXPECT_EQ(lmo(Body::l1_ball(3, 1.0), vec({2, -2, 1})), vec({-1, 0, 0}));
  EXPECT_EQ(lmo(Body::l1_ball(2, 1.0), vec({0, 0})), vec({1, 0}));
  EXPECT_EQ(lmo(cross2(), vec({0, 0})), vec({1, 0}));
  EXPECT_EQ(lmo(Body::box(vec({-1, -2}), vec({1, 2})), vec({0, 0})), vec({-1, -2}));
}

TEST(LmoTest, NanDirectionThrows) {
  EXPECT_THROW(lmo(Body::l2_ball(2, 1.0), vec({NAN, 0})), InvalidArgument);
}

TEST(LmoTest, ClosedFormsAgreeWithVertexEnumeration) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  const Body bodies[] = {Body::l1_ball(5, 2.0), Body::simplex(5),
                         Body::box(vec({-1, 0, -2, 0.5, -3}), vec({1, 1, 0, 2, 3}))};
  for (const Body& C : bodies) {
    const MatrixXd V = vertices(C);
    for (int r = 0; r < 200; ++r) {
      VectorXd d(5);
      for (int i = 0; i < 5; ++i) d(i) = nd(gen);
      if (r % 7 == 0) d(1) = d(0);  // exercise ties
      Eigen::Index j;
      (V.transpose() * d).minCoeff(&j);
      EXPECT_EQ(lmo(C, d), VectorXd(V.col(j))) << C.describe();
    }
  }
}

TEST(LmoTest, OptimalityOnRandomSmallPolytopes) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> kd(1, 8), pd(1, 6);
  std::gamma_distribution<double> ex(1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const int p = pd(gen), k = kd(gen);
    MatrixXd V(p, k);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < k; ++j) V(i, j) = nd(gen);
    const Body C = Body::polytope(V);
    VectorXd d(p);
    for (int i = 0; i < p; ++i) d(i) = nd(gen);
    const VectorXd s = lmo(C, d);
    ASSERT_TRUE(contains(C, s));
    for (int j = 0; j < k; ++j) ASSERT_LE(d.dot(s), d.dot(V.col(j)));
    for (int r = 0; r < 100; ++r) {
      VectorXd w(k);
      for (int j = 0; j < k; ++j) w(j) = ex(gen);
      const VectorXd x = V * (w / w.sum());
      ASSERT_LE(d.dot(s), d.dot(x) + 1e-9);
    }
  }
}

TEST(LmoTest, ResultIsAlwaysFeasible) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> nd;
  const Body bodies[] = {Body::l2_ball(4, 1.5), Body::l1_ball(4, 0.5), Body::simplex(4),
                         Body::grouped_l1_ball(4, 2.0, 3),
                         Body::box(vec({-1, 0, -2, 0.5}), vec({1, 1, 0, 2})), triangle()};
  for (const Body& C : bodies) {
    for (int r = 0; r < 100; ++r) {
      VectorXd d(C.dim());
      for (int i = 0; i < C.dim(); ++i) d(i) = nd(gen);
      EXPECT_TRUE(contains(C, lmo(C, d))) << C.describe();
    }
  }
}

TEST(MinkowskiNormTest, WorkedExamples) {
  EXPECT_NEAR(minkowski_norm(Body::l1_ball(2, 1.0), vec({0.3, -0.7})), 1.0, 1e-15);
  EXPECT_NEAR(minkowski_norm(Body::l2_ball(2, 2.0), vec({3, 4})), 2.5, 1e-15);
  EXPECT_NEAR(minkowski_norm(cross2(), vec({1, 1})), 2.0, 1e-12);
}

TEST(MinkowskiNormTest, Errors) {
  EXPECT_THROW(minkowski_norm(Body::simplex(2), vec({0.5, 0.5})), InvalidArgument);
  EXPECT_THROW(minkowski_norm(triangle(), vec({0.1, 0.1})), InvalidArgument);
  const Body flat = Body::polytope(cols({{1, 0}, {-1, 0}}));
  EXPECT_TRUE(flat.centrally_symmetric());
  EXPECT_THROW(minkowski_norm(flat, vec({0, 1})), InvalidArgument);
  EXPECT_NEAR(minkowski_norm(flat, vec({0.5, 0})), 0.5, 1e-12);
}

TEST(MinkowskiNormTest, HolderAndHomogeneity) {
  std::mt19937_64 gen(17);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.1, 5.0);
  MatrixXd V(3, 6);
  for (int j = 0; j < 3; ++j) V.col(j) = VectorXd::NullaryExpr(3, [&] { return nd(gen); });
  V.rightCols(3) = -V.leftCols(3);
  const Body bodies[] = {Body::l2_ball(3, 1.3), Body::l1_ball(3, 0.7),
                         Body::grouped_l1_ball(3, 1.0, 2), Body::box(vec({-1, -2, -3}), vec({1, 2, 3})),
                         Body::polytope(V)};
  for (const Body& C : bodies) {
    ASSERT_TRUE(C.centrally_symmetric()) << C.describe();
    for (int r = 0; r < 200; ++r) {
      const VectorXd v = VectorXd::NullaryExpr(3, [&] { return nd(gen); });
      const VectorXd w = VectorXd::NullaryExpr(3, [&] { return nd(gen); });
      const double mv = minkowski_norm(C, v);
      EXPECT_GE(mv * dual_norm(C, w) + 1e-9, std::abs(v.dot(w))) << C.describe();
      const double c = ud(gen);
      EXPECT_NEAR(minkowski_norm(C, VectorXd(c * v)), c * mv, 1e-9 * (1 + c * mv)) << C.describe();
      EXPECT_TRUE(contains(C, VectorXd(v / mv * (1 - 1e-9))));
    }
  }
}

TEST(DualNormTest, WorkedExamples) {
  EXPECT_DOUBLE_EQ(dual_norm(Body::l1_ball(3, 1.0), vec({1, -3, 2})), 3.0);
  EXPECT_DOUBLE_EQ(dual_norm(Body::l2_ball(2, 1.0), vec({3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(dual_norm(Body::simplex(3), vec({0.2, -0.1, 0.5})), 0.5);
}

TEST(DualNormTest, MatchesLmoValues) {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> nd;
  const Body bodies[] = {Body::l2_ball(4, 1.5), Body::l1_ball(4, 0.5), Body::simplex(4),
                         Body::grouped_l1_ball(4, 2.0, 3),
                         Body::box(vec({-1, 0, -2, 0.5}), vec({1, 1, 0, 2}))};
  for (const Body& C : bodies) {
    for (int r = 0; r < 100; ++r) {
      const VectorXd v = VectorXd::NullaryExpr(4, [&] { return nd(gen); });
      const double lo = v.dot(lmo(C, v));
      const double hi = -(-v).dot(lmo(C, VectorXd(-v)));
      EXPECT_NEAR(dual_norm(C, v), std::max(std::abs(lo), std::abs(hi)), 1e-12) << C.describe();
    }
  }
}

TEST(SizeTest, WorkedExamples) {
  EXPECT_DOUBLE_EQ(l2_diameter(Body::l2_ball(3, 1.0)), 2.0);
  EXPECT_DOUBLE_EQ(l1_radius(Body::l1_ball(3, 1.0)), 1.0);
  EXPECT_NEAR(l2_diameter(triangle()), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(l2_diameter(Body::simplex(4)), std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(l1_radius(triangle()), 2.0);
  EXPECT_NEAR(l1_radius(Body::l2_ball(4, 1.0)), 2.0, 1e-15);
}

TEST(ProjectionTest, WorkedExamples) {
  const VectorXd a = euclidean_project(Body::l2_ball(2, 1.0), vec({3, 4}));
  EXPECT_NEAR((a - vec({0.6, 0.8})).norm(), 0.0, 1e-15);
  const VectorXd b = euclidean_project(Body::simplex(3), vec({0.4, 0.4, 0.4}));
  EXPECT_NEAR((b - VectorXd::Constant(3, 1.0 / 3)).norm(), 0.0, 1e-15);
  const VectorXd c = euclidean_project(Body::l1_ball(3, 1.0), vec({0.9, 0.5, 0.0}));
  EXPECT_NEAR((c - vec({0.7, 0.3, 0.0})).norm(), 0.0, 1e-15);
  EXPECT_THROW(euclidean_project(triangle(), vec({0, 0})), InvalidArgument);
}

TEST(ProjectionTest, VariationalInequality) {
  std::mt19937_64 gen(29);
  std::normal_distribution<double> nd;
  std::exponential_distribution<double> ex(1.0);
  const Body bodies[] = {Body::l2_ball(5, 1.0), Body::l1_ball(5, 1.0), Body::simplex(5),
                         Body::grouped_l1_ball(5, 1.0, 2),
                         Body::box(vec({-1, 0, -2, 0.5, -1}), vec({1, 1, 0, 2, 1}))};
  for (const Body& C : bodies) {
    for (int r = 0; r < 50; ++r) {
      const VectorXd x = 2.0 * VectorXd::NullaryExpr(5, [&] { return nd(gen); });
      const VectorXd px = euclidean_project(C, x);
      ASSERT_TRUE(contains(C, px)) << C.describe();
      for (int s = 0; s < 100; ++s) {
        // Feasible theta: a random mixture of LMO points.
        const VectorXd u = lmo(C, VectorXd(VectorXd::NullaryExpr(5, [&] { return nd(gen); })));
        const VectorXd v = lmo(C, VectorXd(VectorXd::NullaryExpr(5, [&] { return nd(gen); })));
        const double w = ex(gen) / (1 + ex(gen));
        const VectorXd theta = std::min(w, 1.0) * u + (1 - std::min(w, 1.0)) * v;
        ASSERT_LE((x - px).dot(theta - px), 1e-8) << C.describe();
      }
    }
  }
}

TEST(GaussianWidthTest, SingletonIsZero) {
  const WidthEstimate w = gaussian_width_mc(Body::polytope(MatrixXd::Zero(3, 1)), 100, 1);
  EXPECT_EQ(w.mean, 0.0);
  EXPECT_EQ(w.std_error, 0.0);
  EXPECT_EQ(w.samples, 100);
}

TEST(GaussianWidthTest, DeterministicForSeed) {
  const Body C = Body::l1_ball(16, 1.0);
  EXPECT_EQ(gaussian_width_mc(C, 500, 9).mean, gaussian_width_mc(C, 500, 9).mean);
  EXPECT_NE(gaussian_width_mc(C, 500, 9).mean, gaussian_width_mc(C, 500, 10).mean);
}

TEST(GaussianWidthTest, L2BallMatchesChiMean) {
  const WidthEstimate w = gaussian_width_mc(Body::l2_ball(64, 1.0), 100000, 42);
  const double chi = std::sqrt(2.0) * std::exp(std::lgamma(32.5) - std::lgamma(32.0));
  EXPECT_NEAR(chi, 7.9688, 1e-4);
  EXPECT_NEAR(w.mean, chi, 0.01 * chi);
  EXPECT_LT(w.std_error, 0.01);
}

TEST(GaussianWidthTest, ScalesWithRadiusAndOrdersBodies) {
  const WidthEstimate a = gaussian_width_mc(Body::l2_ball(10, 1.0), 20000, 3);
  const WidthEstimate b = gaussian_width_mc(Body::l2_ball(10, 3.0), 20000, 3);
  EXPECT_NEAR(b.mean, 3 * a.mean, 1e-9 * b.mean);
  const WidthEstimate l1 = gaussian_width_mc(Body::l1_ball(10, 1.0), 20000, 3);
  EXPECT_LT(l1.mean, a.mean);
  // Independent seeds: radius scaling within Monte Carlo error.
  const WidthEstimate c = gaussian_width_mc(Body::l1_ball(10, 2.5), 20000, 4);
  EXPECT_NEAR(c.mean, 2.5 * l1.mean, 4 * (c.std_error + 2.5 * l1.std_error));
}

TEST(SymmetryTest, DetectsAndBuildsHulls) {
  EXPECT_TRUE(cross2().centrally_symmetric());
  EXPECT_FALSE(triangle().centrally_symmetric());
  EXPECT_FALSE(Body::simplex(3).centrally_symmetric());
  EXPECT_TRUE(Body::box(vec({-1, -2}), vec({1, 2})).centrally_symmetric());
  EXPECT_FALSE(Body::box(vec({0, -2}), vec({1, 2})).centrally_symmetric());
  const Body q = symmetric_hull(Body::simplex(3));
  EXPECT_EQ(q.kind(), BodyKind::kL1Ball);
  const Body t = symmetric_hull(triangle());
  EXPECT_TRUE(t.centrally_symmetric());
  EXPECT_TRUE(contains(t, vec({-1, 0})));
  // Interior points in a vertex list do not break symmetry detection.
  const Body with_interior = Body::polytope(cols({{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {0.2, 0.1}}));
  EXPECT_TRUE(with_interior.centrally_symmetric());
}

TEST(SymmetryTest, MembershipSymmetric) {
  std::mt19937_64 gen(31);
  std::normal_distribution<double> nd;
  const Body bodies[] = {Body::l2_ball(3, 1.0), Body::l1_ball(3, 1.0), cross2()};
  for (const Body& C : bodies) {
    for (int r = 0; r < 200; ++r) {
      const VectorXd x = 0.8 * VectorXd::NullaryExpr(C.dim(), [&] { return nd(gen); });
      EXPECT_EQ(contains(C, x), contains(C, VectorXd(-x)));
    }
  }
}

}  // namespace
}  // namespace dperm
