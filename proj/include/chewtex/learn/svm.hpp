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

#include <Eigen/Core>

namespace chewtex::learn {

/// Multipliers on C per class.
struct ClassWeights {
  double negative = 1.0;
  double positive = 1.0;

  /// n / (2 n_y) for each class y.
  static ClassWeights balanced(const Eigen::Ref<const Eigen::VectorXi>& labels);
  bool operator==(const ClassWeights&) const = default;
};

struct SvmParams {
  double C = 1.0;
  double gamma = 1.0;
  ClassWeights weights;
  double tolerance = 1e-3;
  long max_iterations = 100000;
};

/// Binary RBF-kernel SVM:
///   decision(x) = sum_i dual_coeffs_i exp(-gamma |x - sv_i|^2) + bias.
struct SvmModel {
  Eigen::MatrixXd support_vectors;  // one per row
  Eigen::VectorXd dual_coeffs;      // alpha_i y_i
  double bias = 0.0;
  double gamma = 1.0;
  double C = 1.0;
  ClassWeights weights;

  Eigen::Index dimension() const { return support_vectors.cols(); }
  bool operator==(const SvmModel&) const = default;
};

struct SmoDiagnostics {
  Eigen::VectorXd alpha;      // dual variables, one per training row
  double objective = 0.0;     // 0.5 a'Qa - sum(a), minimized
  double max_violation = 0.0; // maximal KKT violating-pair gap at exit
  long iterations = 0;
  bool converged = false;
};

struct SvmFit {
  SvmModel model;
  SmoDiagnostics diagnostics;
};

/// |a_i - b_j|^2 for every row pair.
Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b);

/// SMO with maximal-violating-pair working-set selection. Labels are +-1;
/// throws kDegenerateLabels when only one class is present.
SvmFit svm_train(const Eigen::Ref<const Eigen::MatrixXd>& x,
                 const Eigen::Ref<const Eigen::VectorXi>& y, const SvmParams& params);

struct DualSolution {
  SmoDiagnostics diagnostics;
  double bias = 0.0;
};

/// Solves the dual on a precomputed kernel matrix without building a model.
DualSolution svm_solve_dual(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                            const Eigen::Ref<const Eigen::VectorXi>& y, const SvmParams& params);

/// Same solver on a precomputed kernel matrix; `x` supplies the support
/// vector rows for the returned model.
SvmFit svm_train_kernel(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                        const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXi>& y, const SvmParams& params);

struct SvmPrediction {
  Eigen::VectorXi labels;  // +1 when decision > 0, else -1
  Eigen::VectorXd decision_values;
};

/// Throws kShape when the column count differs from the model dimension.
SvmPrediction svm_predict(const SvmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x);

}  // namespace chewtex::learn
