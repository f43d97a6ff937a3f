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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace chewtex::learn {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Search space and budget for the (C, gamma) search. Both axes are
/// searched in log2 units.
struct HpoConfig {
  Interval log2_C{-5.0, 15.0};
  Interval log2_gamma{-15.0, 3.0};
  int budget = 40;
  int initial_design = 10;
  double posterior_std_threshold = 1e-3;
  int folds = 5;
  std::uint64_t seed = 0;
  int grid_resolution = 41;  // candidates per axis for the acquisition search

  void validate() const;
  bool operator==(const HpoConfig&) const = default;
};

/// Zero-mean GP with a Matern-5/2 kernel on inputs scaled to the unit box.
class GaussianProcess {
 public:
  GaussianProcess(double lengthscale, double signal_variance, double noise_variance);

  void fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

  /// Posterior mean and standard deviation at each row of `x`.
  void predict(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& stddev) const;

  double log_marginal_likelihood() const;
  double kernel(double distance) const;

 private:
  double lengthscale_;
  double signal_variance_;
  double noise_variance_;
  Eigen::MatrixXd x_;
  Eigen::VectorXd alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double data_fit_ = 0.0;
};

struct HpoEvaluation {
  double log2_C = 0.0;
  double log2_gamma = 0.0;
  double score = 0.0;
  bool exploration = false;  // chosen by maximum posterior std
};

struct HpoResult {
  double C = 1.0;
  double gamma = 1.0;
  double score = 0.0;
  std::vector<HpoEvaluation> trace;
};

/// Maximizes objective(C, gamma): a Latin-hypercube initial design, then
/// expected improvement under the GP surrogate over a candidate grid. Once
/// the largest posterior std on the grid falls below the threshold the next
/// point maximizes the posterior std instead. Returns the best observed
/// point; ties go to smaller C, then smaller gamma.
HpoResult bayes_opt(const std::function<double(double C, double gamma)>& objective,
                    const HpoConfig& config);

}  // namespace chewtex::learn
