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

#include "chewtex/learn/bayes_opt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "chewtex/error.hpp"
#include "chewtex/random.hpp"

namespace chewtex::learn {

void HpoConfig::validate() const {
  require(log2_C.hi > log2_C.lo && log2_gamma.hi > log2_gamma.lo, ErrorKind::kConfig,
          "HPO search intervals must have positive width");
  require(initial_design >= 1, ErrorKind::kConfig, "HPO initial design must be at least 1");
  require(budget >= initial_design, ErrorKind::kConfig,
          "HPO budget must be at least the initial design size");
  require(grid_resolution >= 2, ErrorKind::kConfig, "HPO grid resolution must be at least 2");
  require(posterior_std_threshold >= 0.0, ErrorKind::kConfig,
          "HPO posterior std threshold must be non-negative");
  require(folds >= 2, ErrorKind::kConfig, "HPO needs at least 2 folds");
}

GaussianProcess::GaussianProcess(double lengthscale, double signal_variance, double noise_variance)
    : lengthscale_(lengthscale), signal_variance_(signal_variance), noise_variance_(noise_variance) {}

double GaussianProcess::kernel(double distance) const {
  const double r = std::sqrt(5.0) * distance / lengthscale_;
  return signal_variance_ * (1.0 + r + r * r / 3.0) * std::exp(-r);
}

namespace {

Eigen::MatrixXd pairwise_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    d.col(j) = (a.rowwise() - b.row(j)).rowwise().norm();
  }
  return d;
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

constexpr std::array<double, 7> kLengthscales{0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.2};
constexpr double kExplorationMargin = 0.01;
constexpr double kNoiseVariance = 1e-6;

}  // namespace

void GaussianProcess::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  x_ = x;
  Eigen::MatrixXd k = pairwise_distances(x, x).unaryExpr([this](double d) { return kernel(d); });
  k.diagonal().array() += noise_variance_;
  chol_.compute(k);
  require(chol_.info() == Eigen::Success, ErrorKind::kValidation,
          "GP covariance is not positive definite");
  alpha_ = chol_.solve(y);
  data_fit_ = y.dot(alpha_);
}

void GaussianProcess::predict(const Eigen::MatrixXd& x, Eigen::VectorXd& mean,
                              Eigen::VectorXd& stddev) const {
  const Eigen::MatrixXd ks =
      pairwise_distances(x_, x).unaryExpr([this](double d) { return kernel(d); });
  mean = ks.transpose() * alpha_;
  const Eigen::MatrixXd v = chol_.matrixL().solve(ks);
  stddev = (signal_variance_ - v.colwise().squaredNorm().array()).max(0.0).sqrt().matrix().transpose();
}

double GaussianProcess::log_marginal_likelihood() const {
  const double log_det = 2.0 * chol_.matrixLLT().diagonal().array().log().sum();
  const double n = static_cast<double>(x_.rows());
  return -0.5 * data_fit_ - 0.5 * log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

HpoResult bayes_opt(const std::function<double(double C, double gamma)>& objective,
                    const HpoConfig& config) {
  config.validate();
  const int g = config.grid_resolution;
  const Eigen::Index cells = static_cast<Eigen::Index>(g) * g;

  // Grid cell c -> (c / g, c % g): C-major, so lower indices mean smaller C, then smaller gamma.
  Eigen::MatrixXd grid(cells, 2);
  for (Eigen::Index c = 0; c < cells; ++c) {
    grid(c, 0) = static_cast<double>(c / g) / (g - 1);
    grid(c, 1) = static_cast<double>(c % g) / (g - 1);
  }
  std::vector<bool> used(static_cast<std::size_t>(cells), false);
  std::vector<Eigen::Index> observed;
  HpoResult result;

  auto evaluate = [&](Eigen::Index c, bool exploration) {
    used[static_cast<std::size_t>(c)] = true;
    observed.push_back(c);
    HpoEvaluation e;
    e.log2_C = config.log2_C.lo + grid(c, 0) * config.log2_C.width();
    e.log2_gamma = config.log2_gamma.lo + grid(c, 1) * config.log2_gamma.width();
    e.score = objective(std::exp2(e.log2_C), std::exp2(e.log2_gamma));
    e.exploration = exploration;
    result.trace.push_back(e);
  };

  // Latin hypercube on the unit box, snapped to the candidate grid.
  Rng rng(config.seed);
  const int n0 = std::min<Eigen::Index>(config.initial_design, cells);
  std::array<std::vector<int>, 2> strata;
  for (auto& s : strata) {
    s.resize(static_cast<std::size_t>(n0));
    for (int i = 0; i < n0; ++i) s[static_cast<std::size_t>(i)] = i;
    rng.shuffle(s);
  }
  for (int i = 0; i < n0; ++i) {
    std::array<Eigen::Index, 2> idx{};
    for (int d = 0; d < 2; ++d) {
      const double u = (strata[static_cast<std::size_t>(d)][static_cast<std::size_t>(i)] +
                        rng.uniform()) / n0;
      idx[static_cast<std::size_t>(d)] = std::lround(u * (g - 1));
    }
    Eigen::Index c = idx[0] * g + idx[1];
    while (used[static_cast<std::size_t>(c)]) c = (c + 1) % cells;
    evaluate(c, false);
  }

  while (static_cast<int>(observed.size()) < config.budget &&
         static_cast<Eigen::Index>(observed.size()) < cells) {
    const Eigen::MatrixXd x = grid(observed, Eigen::all);
    Eigen::VectorXd y(static_cast<Eigen::Index>(observed.size()));
    for (std::size_t i = 0; i < observed.size(); ++i) y[static_cast<Eigen::Index>(i)] = result.trace[i].score;
    const double mu = y.mean();
    double sd = std::sqrt((y.array() - mu).square().mean());
    if (!(sd > 0.0)) sd = 1.0;
    const Eigen::VectorXd ys = (y.array() - mu) / sd;

    std::optional<GaussianProcess> best_gp;
    double best_lml = -std::numeric_limits<double>::infinity();
    for (double ell : kLengthscales) {
      GaussianProcess gp(ell, 1.0, kNoiseVariance);
      gp.fit(x, ys);
      const double lml = gp.log_marginal_likelihood();
      if (lml > best_lml) {
        best_lml = lml;
        best_gp = gp;
      }
    }
    Eigen::VectorXd mean, stddev;
    best_gp->predict(grid, mean, stddev);

    const double incumbent = ys.maxCoeff();
    double max_std = -1.0, best_ei = -1.0;
    Eigen::Index std_cell = -1, ei_cell = -1;
    for (Eigen::Index c = 0; c < cells; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double s = stddev[c];
      const double imp = mean[c] - incumbent - kExplorationMargin;
      const double ei = s > 0.0 ? imp * normal_cdf(imp / s) + s * normal_pdf(imp / s) : std::max(imp, 0.0);
      if (s > max_std) {
        max_std = s;
        std_cell = c;
      }
      if (ei > best_ei) {
        best_ei = ei;
        ei_cell = c;
      }
    }
    if (max_std < config.posterior_std_threshold) {
      evaluate(std_cell, true);
    } else {
      evaluate(ei_cell, false);
    }
  }

  const HpoEvaluation* best = &result.trace.front();
  for (const auto& e : result.trace) {
    if (e.score > best->score ||
        (e.score == best->score &&
         (e.log2_C < best->log2_C || (e.log2_C == best->log2_C && e.log2_gamma < best->log2_gamma)))) {
      best = &e;
    }
  }
  result.C = std::exp2(best->log2_C);
  result.gamma = std::exp2(best->log2_gamma);
  result.score = best->score;
  return result;
}

}  // namespace chewtex::learn
