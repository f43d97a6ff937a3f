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

#include "chewtex/learn/cross_validation.hpp"

#include <algorithm>
#include <optional>

#include "chewtex/error.hpp"
#include "chewtex/learn/svm.hpp"
#include "chewtex/metrics.hpp"
#include "chewtex/random.hpp"

namespace chewtex::learn {

std::vector<int> stratified_folds(const Eigen::Ref<const Eigen::VectorXi>& y, int folds,
                                  std::uint64_t seed) {
  require(folds >= 2, ErrorKind::kConfig, "cross-validation needs at least 2 folds");
  std::vector<Eigen::Index> pos, neg;
  for (Eigen::Index t = 0; t < y.size(); ++t) (y[t] > 0 ? pos : neg).push_back(t);
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<Eigen::Index> order = pos;
  order.insert(order.end(), neg.begin(), neg.end());
  std::vector<int> ids(static_cast<std::size_t>(y.size()), 0);
  for (std::size_t p = 0; p < order.size(); ++p) {
    ids[static_cast<std::size_t>(order[p])] = static_cast<int>(p % static_cast<std::size_t>(folds));
  }
  return ids;
}

CrossValidator::CrossValidator(std::shared_ptr<const Eigen::MatrixXd> squared_distances,
                               Eigen::VectorXi y, int folds, std::uint64_t seed)
    : distances_(std::move(squared_distances)), y_(std::move(y)) {
  require(distances_ != nullptr, ErrorKind::kConfig, "cross-validation needs distances");
  require(distances_->rows() == y_.size() && distances_->cols() == y_.size(), ErrorKind::kShape,
          "cross-validation: distance matrix and labels disagree in size");
  require(y_.size() >= 2, ErrorKind::kConfig, "cross-validation needs at least 2 examples");
  folds_ = std::min<int>(folds, static_cast<int>(y_.size()));
  fold_ids_ = stratified_folds(y_, folds_, seed);
}

CrossValidator::CrossValidator(const Eigen::Ref<const Eigen::MatrixXd>& x, Eigen::VectorXi y,
                               int folds, std::uint64_t seed)
    : CrossValidator(std::make_shared<const Eigen::MatrixXd>(squared_distances(x, x)),
                     std::move(y), folds, seed) {}

CvScore CrossValidator::score(double C, double gamma) const {
  const Eigen::MatrixXd kernel = (-gamma * distances_->array()).exp().matrix();
  ConfusionCounts pooled;
  double sum = 0.0;
  int scored = 0;
  bool all_defined = true;

  for (int f = 0; f < folds_; ++f) {
    std::vector<Eigen::Index> train, val;
    for (Eigen::Index t = 0; t < y_.size(); ++t) {
      (fold_ids_[static_cast<std::size_t>(t)] == f ? val : train).push_back(t);
    }
    if (val.empty()) continue;
    const Eigen::VectorXi y_train = y_(train);
    const auto n_pos = (y_train.array() > 0).count();

    Eigen::VectorXd decision;
    if (n_pos == 0 || n_pos == y_train.size()) {
      decision = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(val.size()),
                                           n_pos == 0 ? -1.0 : 1.0);
    } else {
      SvmParams params;
      params.C = C;
      params.gamma = gamma;
      params.weights = ClassWeights::balanced(y_train);
      const Eigen::MatrixXd k_train = kernel(train, train);
      const DualSolution dual = svm_solve_dual(k_train, y_train, params);
      std::vector<Eigen::Index> support, support_local;
      for (std::size_t s = 0; s < train.size(); ++s) {
        if (dual.diagnostics.alpha[static_cast<Eigen::Index>(s)] > 0.0) {
          support.push_back(train[s]);
          support_local.push_back(static_cast<Eigen::Index>(s));
        }
      }
      const Eigen::VectorXd coef =
          dual.diagnostics.alpha(support_local).cwiseProduct(y_train(support_local).cast<double>());
      decision = (kernel(val, support) * coef).array() + dual.bias;
    }

    ConfusionCounts fold;
    for (std::size_t v = 0; v < val.size(); ++v) {
      fold.add(y_[val[v]] > 0, decision[static_cast<Eigen::Index>(v)] > 0.0);
    }
    pooled += fold;
    if (const auto wa = weighted_accuracy(fold)) {
      sum += *wa;
      ++scored;
    } else {
      all_defined = false;
    }
  }

  CvScore out;
  out.folds = folds_;
  if (all_defined && scored > 0) {
    out.score = sum / scored;
  } else {
    out.pooled = true;
    out.score = weighted_accuracy(pooled).value_or(0.0);
  }
  return out;
}

CvScore kfold_cv(const Eigen::Ref<const Eigen::MatrixXd>& x,
                 const Eigen::Ref<const Eigen::VectorXi>& y, int folds, double C, double gamma,
                 std::uint64_t seed) {
  return CrossValidator(x, y, folds, seed).score(C, gamma);
}

}  // namespace chewtex::learn
