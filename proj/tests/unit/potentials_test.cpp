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

#include "dperm/potentials.hpp"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace dperm {
namespace {

using Pot = Potential<double>;

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

MatrixXd cross_polytope(int p) {
  MatrixXd V = MatrixXd::Zero(p, 2 * p);
  for (int i = 0; i < p; ++i) {
    V(i, 2 * i) = 1;
    V(i, 2 * i + 1) = -1;
  }
  return V;
}

// A potential together with its domain body and a sampler of feasible points.
struct Case {
  std::string name;
  Pot pot;
  Body domain;
};

std::vector<Case> all_cases() {
  std::vector<Case> cs;
  cs.push_back({"squared_l2", Pot::squared_l2(vec({0.1, -0.2, 0.0, 0.3})), Body::l2_ball(4, 1.0)});
  cs.push_back({"entropy", Pot::negative_entropy(5, true), Body::simplex(5)});
  cs.push_back({"entropy_unshifted", Pot::negative_entropy(5, false), Body::simplex(5)});
  cs.push_back({"qnorm_k4", Pot::polytope_qnorm(cross_polytope(2)), Body::simplex(4)});
  cs.push_back({"qnorm_k16", Pot::polytope_qnorm(cross_polytope(8)), Body::simplex(16)});
  cs.push_back({"grouped_m1", Pot::grouped_l1(4, 4), Body::grouped_l1_ball(4, 1.0, 4)});
  cs.push_back({"grouped_m2", Pot::grouped_l1(6, 3), Body::grouped_l1_ball(6, 1.0, 3)});
  cs.push_back({"grouped_m5", Pot::grouped_l1(10, 2), Body::grouped_l1_ball(10, 1.0, 2)});
  return cs;
}

// Strictly interior random point: mixture of LMO points pulled toward the
// canonical point.
VectorXd sample(const Body& C, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.05, 0.95);
  VectorXd d(C.dim());
  for (int i = 0; i < C.dim(); ++i) d(i) = nd(gen);
  const VectorXd a = lmo(C, d);
  for (int i = 0; i < C.dim(); ++i) d(i) = nd(gen);
  const VectorXd b = lmo(C, d);
  const double w = ud(gen), s = ud(gen);
  VectorXd x = w * a + (1 - w) * b;
  if (C.kind() == BodyKind::kSimplex) {
    VectorXd e(C.dim());
    for (int i = 0; i < C.dim(); ++i) e(i) = -std::log(ud(gen));
    x = s * x + (1 - s) * e / e.sum();
  } else {
    x *= s;
  }
  return x;
}

TEST(PotentialValueTest, WorkedExamples) {
  const Pot sq = Pot::squared_l2(VectorXd::Zero(2));
  EXPECT_DOUBLE_EQ(value(sq, vec({3, 4})), 12.5);
  EXPECT_EQ(grad(sq, vec({3, 4})), vec({3, 4}));
  EXPECT_NEAR(value(Pot::negative_entropy(2, false), vec({0.5, 0.5})), -0.693147, 1e-6);
  EXPECT_NEAR(value(Pot::negative_entropy(2, true), vec({0.5, 0.5})), 0.0, 1e-15);
  const Pot qn = Pot::polytope_qnorm(cross_polytope(2));
  EXPECT_DOUBLE_EQ(qn.q(), 2.0);
  EXPECT_NEAR(value_at_point(qn, vec({0.6, 0})), 0.09, 1e-12);
}

TEST(PotentialValueTest, DefaultQ) {
  EXPECT_DOUBLE_EQ(Pot::default_q(4), 2.0);
  EXPECT_DOUBLE_EQ(Pot::default_q(7), 2.0);
  const double l16 = std::log(16.0);
  EXPECT_DOUBLE_EQ(Pot::default_q(16), l16 / (l16 - 1));
  EXPECT_THROW(Pot::polytope_qnorm(cross_polytope(2), 2.5), InvalidArgument);
  EXPECT_THROW(Pot::polytope_qnorm(cross_polytope(2), 1.0), InvalidArgument);
}

TEST(PotentialValueTest, GroupedParameters) {
  const Pot a = Pot::grouped_l1(4, 4);
  EXPECT_DOUBLE_EQ(a.M(), 2.0);
  EXPECT_DOUBLE_EQ(a.xi(), 1.0);
  const Pot b = Pot::grouped_l1(6, 3);
  EXPECT_DOUBLE_EQ(b.M(), 2.0);
  EXPECT_DOUBLE_EQ(b.xi(), 0.5);
  const Pot c = Pot::grouped_l1(10, 2);
  EXPECT_DOUBLE_EQ(c.M(), 1 + 1 / std::log(5.0));
  EXPECT_DOUBLE_EQ(c.xi(), 1 / (std::exp(1.0) * std::log(5.0)));
  // Single block reduces to the squared Euclidean potential.
  EXPECT_NEAR(value(a, vec({1, 2, 0, 2})), 4.5, 1e-12);
}

TEST(PotentialValueTest, EntropyFloorAvoidsLogZero) {
  const Pot e = Pot::negative_entropy(3, true);
  EXPECT_TRUE(std::isfinite(value(e, vec({0, 0, 1}))));
  EXPECT_TRUE(grad(e, vec({0, 0, 1})).allFinite());
  EXPECT_THROW(value(e, vec({-0.1, 0.1, 1})), InvalidArgument);
}

TEST(BregmanTest, WorkedExamples) {
  const Pot sq = Pot::squared_l2(VectorXd::Zero(2));
  EXPECT_DOUBLE_EQ(bregman(sq, vec({1, 0}), vec({0, 1})), 1.0);
  const Pot e = Pot::negative_entropy(2, true);
  EXPECT_NEAR(bregman(e, vec({0.5, 0.5}), vec({0.9, 0.1})), 0.510826, 1e-6);
  const double kl = 0.5 * std::log(0.5 / 0.9) + 0.5 * std::log(0.5 / 0.1);
  EXPECT_NEAR(bregman(e, vec({0.5, 0.5}), vec({0.9, 0.1})), kl, 1e-14);
}

TEST(BregmanTest, NonnegativeAndZeroOnDiagonal) {
  std::mt19937_64 gen(1);
  for (const Case& c : all_cases()) {
    for (int r = 0; r < 300; ++r) {
      const VectorXd a = sample(c.domain, gen), b = sample(c.domain, gen);
      EXPECT_GE(bregman(c.pot, a, b), -1e-9) << c.name;
      EXPECT_NEAR(bregman(c.pot, a, a), 0.0, 1e-9) << c.name;
    }
  }
}

TEST(GradientTest, FiniteDifferences) {
  std::mt19937_64 gen(2);
  const double h = 1e-6;
  for (const Case& c : all_cases()) {
    for (int r = 0; r < 50; ++r) {
      const VectorXd x = sample(c.domain, gen);
      const VectorXd g = grad(c.pot, x);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        VectorXd xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        const double fd = (value(c.pot, xp) - value(c.pot, xm)) / (2 * h);
        EXPECT_NEAR(fd, g(i), 1e-5) << c.name << " coord " << i;
      }
    }
  }
}

TEST(StrongConvexityTest, SpotCheckDeclaredModulus) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (const Case& c : all_cases()) {
    const double mod = strong_convexity_modulus(c.pot);
    ASSERT_GT(mod, 0) << c.name;
    for (int r = 0; r < 1000; ++r) {
      const VectorXd a = sample(c.domain, gen), b = sample(c.domain, gen);
      const double al = ud(gen);
      const VectorXd m = al * a + (1 - al) * b;
      const double nrm = reference_norm_value(c.pot, VectorXd(a - b));
      const double lhs = value(c.pot, m);
      const double rhs = al * value(c.pot, a) + (1 - al) * value(c.pot, b) -
                         mod * al * (1 - al) / 2 * nrm * nrm + 1e-8;
      ASSERT_LE(lhs, rhs) << c.name;
    }
  }
}

TEST(MaxOverDomainTest, WorkedExamples) {
  const Pot sq = Pot::squared_l2(VectorXd::Zero(3));
  EXPECT_DOUBLE_EQ(max_over_domain(sq, Body::l2_ball(3, 1.0)), 2.0);
  EXPECT_NEAR(max_over_domain(Pot::negative_entropy(4, true), Body::simplex(4)), std::log(4.0), 1e-15);
  EXPECT_DOUBLE_EQ(max_over_domain(Pot::negative_entropy(4, false), Body::simplex(4)), 0.0);
  // k = 16 vertices: 1/(4(q-1)) = (ln 16 - 1)/4.
  const Pot qn = Pot::polytope_qnorm(cross_polytope(8));
  EXPECT_NEAR(max_over_domain(qn, Body::simplex(16)), (std::log(16.0) - 1) / 4, 1e-14);
  EXPECT_THROW(max_over_domain(Pot::negative_entropy(4, true), Body::l1_ball(4, 1.0)),
               InvalidArgument);
}

TEST(MaxOverDomainTest, BoundsSampledValues) {
  std::mt19937_64 gen(4);
  for (const Case& c : all_cases()) {
    const double m = max_over_domain(c.pot, c.domain);
    for (int r = 0; r < 500; ++r) EXPECT_LE(value(c.pot, sample(c.domain, gen)), m + 1e-12) << c.name;
    // Tight at an extreme point for the closed forms.
    VectorXd e = VectorXd::Zero(c.domain.dim());
    e(0) = c.domain.kind() == BodyKind::kSimplex ? 1.0 : c.domain.radius();
    // The entropy floor shifts the vertex value by O(p * 1e-12 * ln 1e-12).
    if (c.pot.kind() != PotentialKind::kSquaredL2) {
      EXPECT_NEAR(value(c.pot, e), m, 1e-9) << c.name;
    }
  }
}

TEST(MaxOverDomainTest, QNormPointValueBoundedOnRandomHulls) {
  // The coefficient potential at the min-l1 representation stays below
  // 1/(4(q-1)) on random symmetric hulls.
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd H(3, 5);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) H(i, j) = nd(gen);
    MatrixXd V(3, 10);
    V << H, -H;
    const Pot qn = Pot::polytope_qnorm(V);
    const Body C = Body::polytope(V);
    const double m = max_over_domain(qn, Body::simplex(10));
    for (int r = 0; r < 20; ++r) {
      VectorXd w(10);
      for (int j = 0; j < 10; ++j) w(j) = std::abs(nd(gen));
      const VectorXd x = V * (w / w.sum());
      ASSERT_TRUE(contains(C, x));
      EXPECT_LE(value_at_point(qn, x), m + 1e-12);
    }
  }
}

TEST(MirrorStepTest, WorkedExamples) {
  const Pot sq = Pot::squared_l2(VectorXd::Zero(2));
  const Body ball = Body::l2_ball(2, 1.0);
  const VectorXd x = vec({0.5, 0.1}), g = vec({-3, 2});
  const MirrorStep<double> s = mirror_step(sq, ball, x, g, 0.7);
  EXPECT_LE((s.point - euclidean_project(ball, VectorXd(x - 0.7 * g))).norm(), 1e-10);
  const MirrorStep<double> e =
      mirror_step(Pot::negative_entropy(2), Body::simplex(2), vec({0.5, 0.5}), vec({std::log(2.0), 0}), 1.0);
  EXPECT_NEAR(e.point(0), 1.0 / 3, 1e-15);
  EXPECT_NEAR(e.point(1), 2.0 / 3, 1e-15);
}

TEST(MirrorStepTest, ZeroGradientKeepsPoint) {
  std::mt19937_64 gen(6);
  for (const Case& c : all_cases()) {
    for (int r = 0; r < 20; ++r) {
      const VectorXd x = sample(c.domain, gen);
      const VectorXd y = mirror_step(c.pot, c.domain, x, VectorXd::Zero(x.size()), 0.5).point;
      EXPECT_LE((y - x).cwiseAbs().maxCoeff(), 1e-9) << c.name;
    }
  }
}

TEST(MirrorStepTest, VariationalInequalityAndMonotonicity) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> eta_d(0.01, 3.0);
  for (const Case& c : all_cases()) {
    for (int r = 0; r < 100; ++r) {
      const VectorXd xt = sample(c.domain, gen);
      VectorXd g(xt.size());
      for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = nd(gen);
      const double eta = eta_d(gen);
      const MirrorStep<double> ms = mirror_step(c.pot, c.domain, xt, g, eta);
      ASSERT_TRUE(contains(c.domain, ms.point)) << c.name;
      const VectorXd lhs = eta * g + grad(c.pot, ms.point) - grad(c.pot, xt);
      for (int s = 0; s < 50; ++s) {
        const VectorXd th = sample(c.domain, gen);
        ASSERT_GE(lhs.dot(th - ms.point), -1e-6) << c.name;
      }
      EXPECT_LE(g.dot(ms.point - xt), 1e-12) << c.name;
    }
  }
}

TEST(MirrorStepTest, SquaredL2IsProjectedGradient) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> nd;
  const Body bodies[] = {Body::l2_ball(4, 1.0), Body::l1_ball(4, 1.0), Body::simplex(4),
                         Body::box(VectorXd::Constant(4, -0.5), VectorXd::Constant(4, 0.5))};
  for (const Body& C : bodies) {
    const Pot sq = Pot::squared_l2(VectorXd::Zero(4));
    for (int r = 0; r < 100; ++r) {
      const VectorXd x = sample(C, gen);
      const VectorXd g = VectorXd::NullaryExpr(4, [&] { return nd(gen); });
      const VectorXd y = mirror_step(sq, C, x, g, 0.3).point;
      EXPECT_LE((y - euclidean_project(C, VectorXd(x - 0.3 * g))).norm(), 1e-10);
    }
  }
}

TEST(MirrorStepTest, Errors) {
  const Pot e = Pot::negative_entropy(2);
  EXPECT_THROW(mirror_step(e, Body::l2_ball(2, 1.0), vec({0.5, 0.5}), vec({1, 0}), 1.0), InvalidArgument);
  EXPECT_THROW(mirror_step(e, Body::simplex(2), vec({0.5, 0.5}), vec({1, 0}), 0.0), InvalidArgument);
  EXPECT_THROW(mirror_step(e, Body::simplex(2), vec({0.5, 0.5}), vec({NAN, 0}), 1.0), InvalidArgument);
}

}  // namespace
}  // namespace dperm
