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
#include <random>

#include "dperm/harness.hpp"

namespace dperm {

GeneratedLasso generate_lasso(const LassoGenerator& g) {
  require(g.n >= 1 && g.p >= 1, "generate_lasso: need n >= 1 and p >= 1");
  require(g.sparsity >= 1 && g.sparsity <= g.p, "generate_lasso: need 1 <= sparsity <= p");
  require(g.noise >= 0, "generate_lasso: noise level must be nonnegative");
  require(g.scale > 0 && g.scale <= 1, "generate_lasso: scale must lie in (0, 1]");
  require(g.target != TargetSet::kSimplex || g.scale == 1.0,
          "generate_lasso: a simplex target has unit l1 norm (scale must be 1)");

  // Separate streams for the target and the records.
  Rng theta_rng = make_rng(g.seed, 1), rec_rng = make_rng(g.seed, 2);
  std::uniform_real_distribution<double> weight(0.5, 1.0), unif(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);

  VectorXd theta = VectorXd::Zero(g.p);
  for (int j = 0; j < g.sparsity; ++j) theta(j) = weight(theta_rng);
  theta = (theta / theta.sum()) * g.scale;
  if (g.target == TargetSet::kL1Ball)
    for (int j = 0; j < g.sparsity; ++j)
      if (coin(theta_rng)) theta(j) = -theta(j);

  MatrixXd X(g.n, g.p);
  VectorXd y(g.n);
  VectorXd x(g.p);
  for (long i = 0; i < g.n; ++i) {
    int attempt = 0;
    for (;; ++attempt) {
      if (attempt == 100)
        throw InvalidArgument("generate_lasso: record " + std::to_string(i) +
                              " still has |y| > 1 after 100 draws; lower the noise level");
      for (int j = 0; j < g.p; ++j)
        x(j) = g.features == FeatureDist::kUniform ? unif(rec_rng) : (coin(rec_rng) ? 1.0 : -1.0);
      const double yi = x.dot(theta) + (g.noise > 0 ? g.noise * normal(rec_rng) : 0.0);
      if (std::abs(yi) <= 1.0) {
        X.row(i) = x.transpose();
        y(i) = yi;
        break;
      }
    }
  }
  return GeneratedLasso{Data(std::move(X), std::move(y), true), std::move(theta)};
}

LassoGenerator generator_from_json(const Json& j) {
  LassoGenerator g;
  g.n = j.value("n", g.n);
  g.p = j.at("p").get<int>();
  g.sparsity = j.value("sparsity", std::min(4, g.p));
  g.noise = j.value("noise", g.noise);
  g.seed = j.value("seed", g.seed);
  g.scale = j.value("scale", g.scale);
  const std::string f = j.value("features", std::string("uniform"));
  if (f == "uniform") g.features = FeatureDist::kUniform;
  else if (f == "rademacher") g.features = FeatureDist::kRademacher;
  else throw InvalidArgument("generator features must be uniform or rademacher");
  const std::string t = j.value("target", std::string("l1_ball"));
  if (t == "l1_ball") g.target = TargetSet::kL1Ball;
  else if (t == "simplex") g.target = TargetSet::kSimplex;
  else throw InvalidArgument("generator target must be l1_ball or simplex");
  return g;
}

}  // namespace dperm
