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

#include "chewtex/learn/standardizer.hpp"

#include "chewtex/error.hpp"

namespace chewtex::learn {

Standardizer fit_standardizer(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  require(x.rows() > 0 && x.cols() > 0, ErrorKind::kConfig, "cannot fit a standardizer on an empty matrix");
  Standardizer s;
  s.means = x.colwise().mean();
  s.stds = ((x.rowwise() - s.means).array().square().colwise().mean()).sqrt().matrix();
  for (Eigen::Index c = 0; c < s.stds.size(); ++c) {
    if (s.stds[c] >= kDegenerateStd) continue;
    s.stds[c] = 1.0;
    // An exactly constant column maps to exact zeros.
    if ((x.col(c).array() == x(0, c)).all()) s.means[c] = x(0, c);
  }
  return s;
}

Eigen::MatrixXd apply_standardizer(const Standardizer& s, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  require(x.cols() == s.dimension(), ErrorKind::kShape,
          "standardizer expects " + std::to_string(s.dimension()) + " columns, got " +
              std::to_string(x.cols()));
  return ((x.rowwise() - s.means).array().rowwise() / s.stds.array()).matrix();
}

}  // namespace chewtex::learn
