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

inline constexpr double kDegenerateStd = 1e-12;

/// Per-column z-scoring with the population (1/n) standard deviation.
/// Columns whose deviation is below kDegenerateStd keep std = 1.
struct Standardizer {
  Eigen::RowVectorXd means;
  Eigen::RowVectorXd stds;

  Eigen::Index dimension() const { return means.size(); }
  bool operator==(const Standardizer&) const = default;
};

Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Rows are samples.
Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::Ref<const Eigen::MatrixXd>& x);

}  // namespace chewtex::learn
