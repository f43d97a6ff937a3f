// Copyright 2026 The Chewtex Authors. All Rights Reserved.
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

#include <algorithm>
#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "chewtex/learn/bayes_opt.hpp"
#include "chewtex/learn/cross_validation.hpp"
#include "chewtex/learn/kmeans.hpp"
#include "chewtex/learn/standardizer.hpp"
#include "chewtex/learn/svm.hpp"
#include "chewtex/metrics.hpp"
#include "chewtex/random.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace chewtex::learn {
namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd x(rows, cols);
  for (auto& v : x.reshaped()) v = rng.normal();
  return x;
}

Eigen::MatrixXd rbf(const Eigen::MatrixXd& x, double gamma) {
  return (-gamma * squared_distances(x, x).array()).exp().matrix();
}

// Two Gaussian blobs at +-offset on the first axis; first half positive.
void blobs(Eigen::Index per_class, double offset, std::uint64_t seed, Eigen::MatrixXd& x,
           Eigen::VectorXi& y) {
  Rng rng(seed);
  x = 0.3 * gaussian(2 * per_class, 2, rng);
  y.resize(2 * per_class);
  for (Eigen::Index i = 0; i < 2 * per_class; ++i) {
    const bool pos = i < per_class;
    x(i, 0) += pos ? offset : -offset;
    y[i] = pos ? 1 : -1;
  }
}

TEST(Standardizer, PopulationConvention) {
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 5.0, 3.0, 5.0;
  const auto s = fit_standardizer(x);
  EXPECT_DOUBLE_EQ(s.means[0], 2.0);
  EXPECT_DOUBLE_EQ(s.stds[0], 1.0);
  EXPECT_DOUBLE_EQ(s.stds[1], 1.0);
  const Eigen::MatrixXd z = apply_standardizer(s, x);
  EXPECT_EQ(z(0, 0), -1.0);
  EXPECT_EQ(z(1, 0), 1.0);
  EXPECT_EQ(z.col(1).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Standardizer, TrainingMatrixBecomesUnitAndIdempotent) {
  Rng rng(3);
  Eigen::MatrixXd x = gaussian(200, 5, rng);
  x.col(2) = x.col(2) * 40.0 + Eigen::VectorXd::Constant(200, 7.0);
  const Eigen::MatrixXd z = apply_standardizer(fit_standardizer(x), x);
  const Eigen::RowVectorXd mean = z.colwise().mean();
  const Eigen::RowVectorXd sd = ((z.rowwise() - mean).array().square().colwise().mean()).sqrt();
  EXPECT_LT(mean.cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((sd.array() - 1.0).abs().maxCoeff(), 1e-9);
  const Eigen::MatrixXd zz = apply_standardizer(fit_standardizer(z), z);
  EXPECT_LT((zz - z).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Standardizer, Errors) {
  EXPECT_THROW(fit_standardizer(Eigen::MatrixXd(0, 3)), Error);
  const auto s = fit_standardizer(Eigen::MatrixXd::Ones(2, 3));
  EXPECT_ERROR_KIND(apply_standardizer(s, Eigen::MatrixXd::Ones(2, 4)), ErrorKind::kShape);
}

TEST(Svm, RbfSolvesXor) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 1, 1, 0, 1, 1, 0;
  Eigen::VectorXi y(4);
  y << 1, 1, -1, -1;
  SvmParams p;
  p.C = 10.0;
  p.gamma = 1.0;
  const auto fit = svm_train(x, y, p);
  EXPECT_EQ(svm_predict(fit.model, x).labels, y);

  const Eigen::VectorXd upper = Eigen::VectorXd::Constant(4, 10.0);
  EXPECT_NEAR(fit.diagnostics.objective, test::dual_qp_oracle(rbf(x, 1.0), y, upper), 1e-3);
}

TEST(Svm, SeparableMarginAndFeasibility) {
  Eigen::MatrixXd x(4, 2);
  x << 0, 0, 0, 1, 3, 0, 3, 1;
  Eigen::VectorXi y(4);
  y << -1, -1, 1, 1;
  SvmParams p;
  p.C = 1000.0;
  p.gamma = 0.1;
  const auto fit = svm_train(x, y, p);
  const auto pred = svm_predict(fit.model, x);
  EXPECT_EQ(pred.labels, y);
  const auto& a = fit.diagnostics.alpha;
  EXPECT_NEAR(a.dot(y.cast<double>()), 0.0, 1e-8);
  EXPECT_TRUE(fit.diagnostics.converged);
  EXPECT_LT(fit.diagnostics.max_violation, 1e-3);
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_GE(a[i], 0.0);
    EXPECT_LE(a[i], p.C);
    if (a[i] > 1e-6) EXPECT_NEAR(std::abs(pred.decision_values[i]), 1.0, 1e-2);
  }
  // Far from every support vector the decision decays to the bias.
  Eigen::MatrixXd far(1, 2);
  far << 100.0, -100.0;
  EXPECT_NEAR(svm_predict(fit.model, far).decision_values[0], fit.model.bias, 1e-12);
}

TEST(Svm, MatchesExhaustiveQp) {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 3 + static_cast<Eigen::Index>(rng.index(6));
    const Eigen::MatrixXd x = gaussian(n, 2, rng);
    Eigen::VectorXi y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? 1 : -1;
    y[0] = 1;
    y[1] = -1;
    SvmParams p;
    p.C = std::exp2(rng.uniform(-2.0, 4.0));
    p.gamma = std::exp2(rng.uniform(-2.0, 2.0));
    p.weights = ClassWeights::balanced(y);
    const auto fit = svm_train(x, y, p);
    Eigen::VectorXd upper(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      upper[i] = p.C * (y[i] > 0 ? p.weights.positive : p.weights.negative);
    }
    EXPECT_NEAR(fit.diagnostics.objective, test::dual_qp_oracle(rbf(x, p.gamma), y, upper), 1e-3)
        << trial;
    EXPECT_LT(fit.diagnostics.max_violation, 1e-3);
  }
}

TEST(Svm, DuplicatedPointsKeepTheDecisionFunction) {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  blobs(6, 1.5, 5, x, y);
  SvmParams p;
  p.C = 1000.0;
  p.gamma = 0.5;
  Eigen::MatrixXd x2(2 * x.rows(), 2);
  x2 << x, x;
  Eigen::VectorXi y2(2 * y.size());
  y2 << y, y;
  const auto a = svm_train(x, y, p);
  const auto b = svm_train(x2, y2, p);
  Rng rng(1);
  const Eigen::MatrixXd probes = 2.0 * gaussian(100, 2, rng);
  const Eigen::VectorXd da = svm_predict(a.model, probes).decision_values;
  const Eigen::VectorXd db = svm_predict(b.model, probes).decision_values;
  EXPECT_LT((da - db).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Svm, Errors) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 2);
  EXPECT_ERROR_KIND(svm_train(x, Eigen::VectorXi::Ones(4), {}), ErrorKind::kDegenerateLabels);
  Eigen::VectorXi y(4);
  y << 1, -1, 1, -1;
  SvmParams bad;
  bad.C = 0.0;
  EXPECT_ERROR_KIND(svm_train(x, y, bad), ErrorKind::kConfig);
  const auto fit = svm_train(x, y, {});
  EXPECT_ERROR_KIND(svm_predict(fit.model, Eigen::MatrixXd::Zero(2, 3)), ErrorKind::kShape);
}

TEST(Svm, StandardizationAbsorbsAffineRescaling) {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  blobs(20, 0.4, 8, x, y);
  Rng rng(2);
  const Eigen::MatrixXd probes = gaussian(50, 2, rng);
  Eigen::RowVector2d scale(250.0, 0.01), shift(-3.0, 42.0);
  auto affine = [&](const Eigen::MatrixXd& m) {
    return Eigen::MatrixXd((m.array().rowwise() * scale.array()).rowwise() + shift.array());
  };
  auto labels = [&](const Eigen::MatrixXd& train, const Eigen::MatrixXd& probe) {
    const auto s = fit_standardizer(train);
    const auto fit = svm_train(apply_standardizer(s, train), y, {});
    return svm_predict(fit.model, apply_standardizer(s, probe)).labels;
  };
  EXPECT_EQ(labels(x, probes), labels(affine(x), affine(probes)));
}

TEST(CrossValidation, SeparableScoresOne) {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  blobs(15, 3.0, 4, x, y);
  const auto s = kfold_cv(x, y, 5, 1.0, 0.5);
  EXPECT_EQ(s.score, 1.0);
  EXPECT_FALSE(s.pooled);
}

TEST(CrossValidation, RandomLabelsScoreChance) {
  Rng rng(21);
  const Eigen::MatrixXd x = gaussian(400, 3, rng);
  Eigen::VectorXi y(400);
  for (auto& v : y) v = rng.uniform() < 0.3 ? 1 : -1;
  EXPECT_NEAR(kfold_cv(x, y, 5, 1.0, 1.0).score, 0.5, 0.1);
}

TEST(CrossValidation, FoldsAreStratified) {
  Eigen::VectorXi y(23);
  for (Eigen::Index i = 0; i < 23; ++i) y[i] = i < 8 ? 1 : -1;
  const auto ids = stratified_folds(y, 5, 9);
  for (int f = 0; f < 5; ++f) {
    int pos = 0, total = 0;
    for (Eigen::Index i = 0; i < 23; ++i) {
      if (ids[static_cast<std::size_t>(i)] != f) continue;
      ++total;
      pos += y[i] > 0;
    }
    EXPECT_GE(pos, 1);
    EXPECT_LE(pos, 2);
    EXPECT_GE(total, 4);
    EXPECT_LE(total, 5);
  }
}

TEST(CrossValidation, LeaveOneOutMatchesManualLoop) {
  Eigen::MatrixXd x(6, 2);
  x << 0.0, 0.1, 0.4, -0.2, 1.1, 0.9, 1.3, 1.4, 0.2, 1.2, 0.9, 0.1;
  Eigen::VectorXi y(6);
  y << 1, 1, -1, -1, 1, -1;
  const double C = 2.0, gamma = 0.7;
  ConfusionCounts pooled;
  for (Eigen::Index out = 0; out < 6; ++out) {
    std::vector<Eigen::Index> train;
    for (Eigen::Index i = 0; i < 6; ++i) {
      if (i != out) train.push_back(i);
    }
    const Eigen::VectorXi yt = y(train);
    SvmParams p;
    p.C = C;
    p.gamma = gamma;
    p.weights = ClassWeights::balanced(yt);
    const auto fit = svm_train(x(train, Eigen::all), yt, p);
    pooled.add(y[out] > 0, svm_predict(fit.model, x.row(out)).labels[0] > 0);
  }
  const auto s = kfold_cv(x, y, 6, C, gamma);
  EXPECT_TRUE(s.pooled);
  EXPECT_NEAR(s.score, *weighted_accuracy(pooled), 1e-12);
}

HpoConfig small_hpo(std::uint64_t seed) {
  HpoConfig cfg;
  cfg.seed = seed;
  return cfg;
}

TEST(BayesOpt, FindsQuadraticPeak) {
  const auto result = bayes_opt(
      [](double C, double gamma) {
        const double a = std::log2(C) - 3.0, b = std::log2(gamma) + 2.0;
        return -(a * a + b * b);
      },
      small_hpo(1));
  EXPECT_NEAR(std::log2(result.C), 3.0, 1.0);
  EXPECT_NEAR(std::log2(result.gamma), -2.0, 1.0);
  EXPECT_EQ(result.trace.size(), 40u);
}

TEST(BayesOpt, ConstantObjectiveTakesSmallestPoint) {
  const auto result = bayes_opt([](double, double) { return 0.5; }, small_hpo(2));
  double min_c = 1e300, min_g = 1e300;
  for (const auto& e : result.trace) min_c = std::min(min_c, e.log2_C);
  for (const auto& e : result.trace) {
    if (e.log2_C == min_c) min_g = std::min(min_g, e.log2_gamma);
  }
  EXPECT_EQ(std::log2(result.C), min_c);
  EXPECT_EQ(std::log2(result.gamma), min_g);
}

TEST(BayesOpt, StdEscapeTakesOverBelowThreshold) {
  auto cfg = small_hpo(5);
  cfg.posterior_std_threshold = 1e9;
  const auto result = bayes_opt([](double C, double) { return -std::abs(std::log2(C)); }, cfg);
  for (std::size_t i = 0; i < result.trace.size(); ++i) {
    EXPECT_EQ(result.trace[i].exploration, i >= static_cast<std::size_t>(cfg.initial_design)) << i;
  }
  std::set<std::pair<double, double>> seen;
  for (const auto& e : result.trace) seen.insert({e.log2_C, e.log2_gamma});
  EXPECT_EQ(seen.size(), result.trace.size());
}

TEST(BayesOpt, BudgetEqualToDesignReturnsBestOfDesign) {
  auto cfg = small_hpo(3);
  cfg.budget = cfg.initial_design;
  auto objective = [](double C, double gamma) { return -std::abs(std::log2(C) - std::log2(gamma)); };
  const auto result = bayes_opt(objective, cfg);
  ASSERT_EQ(result.trace.size(), 10u);
  double best = -1e300;
  for (const auto& e : result.trace) best = std::max(best, e.score);
  EXPECT_EQ(result.score, best);
}

TEST(BayesOpt, StaysInRangeAndImprovesWithBudget) {
  auto objective = [](double C, double gamma) {
    return std::sin(0.3 * std::log2(C)) + std::cos(0.4 * std::log2(gamma));
  };
  double previous = -1e300;
  for (int budget : {10, 20, 40}) {
    auto cfg = small_hpo(4);
    cfg.budget = budget;
    const auto result = bayes_opt(objective, cfg);
    EXPECT_TRUE(cfg.log2_C.contains(std::log2(result.C)));
    EXPECT_TRUE(cfg.log2_gamma.contains(std::log2(result.gamma)));
    for (const auto& e : result.trace) {
      EXPECT_TRUE(cfg.log2_C.contains(e.log2_C));
      EXPECT_TRUE(cfg.log2_gamma.contains(e.log2_gamma));
    }
    EXPECT_GE(result.score, previous);
    previous = result.score;
  }
}

TEST(BayesOpt, ConfigErrors) {
  auto cfg = small_hpo(0);
  cfg.budget = 5;
  EXPECT_ERROR_KIND(bayes_opt([](double, double) { return 0.0; }, cfg), ErrorKind::kConfig);
  cfg = small_hpo(0);
  cfg.folds = 1;
  EXPECT_ERROR_KIND(cfg.validate(), ErrorKind::kConfig);
  cfg = small_hpo(0);
  cfg.log2_C = {3.0, 1.0};
  EXPECT_ERROR_KIND(cfg.validate(), ErrorKind::kConfig);
}

TEST(KMeans, SingleClusterIsTheMean) {
  Rng rng(5);
  const Eigen::MatrixXd x = gaussian(50, 3, rng);
  const auto fit = kmeans_fit(x, 1, 0);
  EXPECT_LT((fit.codebook.centroids.row(0) - x.colwise().mean()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(KMeans, RecoversBlobMeans) {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  blobs(100, 5.0, 6, x, y);
  const auto fit = kmeans_fit(x, 2, 1);
  const Eigen::RowVectorXd m_pos = x.topRows(100).colwise().mean();
  const Eigen::RowVectorXd m_neg = x.bottomRows(100).colwise().mean();
  const auto& c = fit.codebook.centroids;
  const int pos_row = (c.row(0) - m_pos).norm() < (c.row(1) - m_pos).norm() ? 0 : 1;
  EXPECT_LT((c.row(pos_row) - m_pos).norm(), 0.1);
  EXPECT_LT((c.row(1 - pos_row) - m_neg).norm(), 0.1);
}

TEST(KMeans, OneClusterPerPoint) {
  Rng rng(7);
  const Eigen::MatrixXd x = gaussian(12, 2, rng);
  EXPECT_EQ(kmeans_fit(x, 12, 3).codebook.inertia, 0.0);
}

TEST(KMeans, InertiaNeverIncreases) {
  Rng rng(8);
  const Eigen::MatrixXd x = gaussian(300, 4, rng);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto fit = kmeans_fit(x, 8, seed);
    ASSERT_FALSE(fit.inertia_history.empty());
    for (std::size_t i = 1; i < fit.inertia_history.size(); ++i) {
      EXPECT_LE(fit.inertia_history[i], fit.inertia_history[i - 1] * (1.0 + 1e-12));
    }
    // No empty clusters.
    const Eigen::VectorXi a = assign_nearest(fit.codebook, x);
    std::set<int> used(a.begin(), a.end());
    EXPECT_EQ(used.size(), 8u);
  }
}

TEST(KMeans, DuplicatePointsStillGiveKClusters) {
  Eigen::MatrixXd x(10, 1);
  x << 0, 0, 0, 0, 0, 0, 0, 1, 2, 3;
  const auto fit = kmeans_fit(x, 4, 0);
  EXPECT_EQ(fit.codebook.k(), 4);
  EXPECT_EQ(fit.codebook.inertia, 0.0);
}

TEST(KMeans, Errors) {
  EXPECT_ERROR_KIND(kmeans_fit(Eigen::MatrixXd::Zero(3, 2), 4, 0), ErrorKind::kConfig);
  EXPECT_ERROR_KIND(kmeans_fit(Eigen::MatrixXd::Zero(3, 2), 0, 0), ErrorKind::kConfig);
}

TEST(Bow, CountsAssignments) {
  Codebook cb;
  cb.centroids.resize(4, 1);
  cb.centroids << 0.0, 10.0, 20.0, 30.0;
  Eigen::MatrixXd v(5, 1);
  v << 0.1, -1.0, 9.0, 21.0, 4.9;
  Eigen::Vector4d expected(0.6, 0.2, 0.2, 0.0);
  EXPECT_EQ(bow_encode(cb, v), expected);
  // Equidistant from centroids 0 and 1: lowest index wins.
  EXPECT_EQ(assign_nearest(cb, Eigen::MatrixXd::Constant(1, 1, 5.0))[0], 0);
  EXPECT_EQ(bow_encode(cb, Eigen::MatrixXd::Constant(3, 1, 29.0)), Eigen::Vector4d(0, 0, 0, 1));
  EXPECT_THROW(bow_encode(cb, Eigen::MatrixXd(0, 1)), Error);
  EXPECT_ERROR_KIND(bow_encode(cb, Eigen::MatrixXd::Zero(2, 2)), ErrorKind::kShape);
}

TEST(Bow, MatchesBruteForce) {
  Rng rng(9);
  Codebook cb;
  cb.centroids = gaussian(16, 5, rng);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd v = gaussian(1 + static_cast<Eigen::Index>(rng.index(60)), 5, rng);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(16);
    for (Eigen::Index r = 0; r < v.rows(); ++r) {
      Eigen::Index best = 0;
      double best_d = 1e300;
      for (Eigen::Index c = 0; c < 16; ++c) {
        const double d = (v.row(r) - cb.centroids.row(c)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      counts[best] += 1.0;
    }
    const Eigen::VectorXd h = bow_encode(cb, v);
    EXPECT_LT((h - counts / static_cast<double>(v.rows())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_NEAR(h.sum(), 1.0, 1e-12);
    EXPECT_GE(h.minCoeff(), 0.0);
  }
}

}  // namespace
}  // namespace chewtex::learn
