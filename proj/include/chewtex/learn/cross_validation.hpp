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
#include <memory>
#include <vector>

#include <Eigen/Core>

namespace chewtex::learn {

/// Stratified fold ids: examples are shuffled within each class, the
/// classes are concatenated and fold ids are dealt round-robin. A class with
/// fewer examples than folds therefore lands one example per fold, which is
/// leave-one-out on that class.
std::vector<int> stratified_folds(const Eigen::Ref<const Eigen::VectorXi>& y, int folds,
                                  std::uint64_t seed);

struct CvScore {
  double score = 0.0;
  int folds = 0;
  /// True when some validation fold lacked a class, in which case the score
  /// is the weighted accuracy of the pooled out-of-fold predictions instead
  /// of the per-fold mean.
  bool pooled = false;
};

/// k-fold cross-validation of the balanced-weight RBF SVM scored by
/// weighted accuracy. Squared distances are computed once and shared by
/// every (C, gamma) evaluation.
class CrossValidator {
 public:
  CrossValidator(std::shared_ptr<const Eigen::MatrixXd> squared_distances, Eigen::VectorXi y,
                 int folds, std::uint64_t seed);
  CrossValidator(const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::VectorXi y, int folds,
                 std::uint64_t seed);

  CvScore score(double C, double gamma) const;
  const std::vector<int>& fold_ids() const { return fold_ids_; }

 private:
  std::shared_ptr<const Eigen::MatrixXd> distances_;
  Eigen::VectorXi y_;
  int folds_;
  std::vector<int> fold_ids_;
};

CvScore kfold_cv(const Eigen::Ref<const Eigen::MatrixXd>& x,
                 const Eigen::Ref<const Eigen::VectorXi>& y, int folds, double C, double gamma,
                 std::uint64_t seed = 0);

}  // namespace chewtex::learn
