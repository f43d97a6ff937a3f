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

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace chewtex::test {

/// Analog Butterworth high-pass magnitude evaluated at the pre-warped
/// frequency ratio r: |H|^2 = r^2N / (1 + r^2N).
inline double butterworth_highpass_magnitude(int order, double hz, double cutoff, double fs) {
  const double r = std::tan(std::numbers::pi * hz / fs) / std::tan(std::numbers::pi * cutoff / fs);
  const double p = std::pow(r, 2 * order);
  return std::sqrt(p / (1.0 + p));
}

/// Minimum of 0.5 a'Qa - sum(a) s.t. y'a = 0, 0 <= a <= upper, found by
/// enumerating every assignment of each variable to {lower bound, upper
/// bound, free} and solving the equality-constrained stationarity system on
/// the free set. Exponential in n; meant for n <= 8.
inline double dual_qp_oracle(const Eigen::MatrixXd& kernel, const Eigen::VectorXi& labels,
                             const Eigen::VectorXd& upper, Eigen::VectorXd* argmin = nullptr) {
  const Eigen::Index n = labels.size();
  const Eigen::VectorXd y = labels.cast<double>();
  const Eigen::MatrixXd q = (y * y.transpose()).cwiseProduct(kernel);
  long states = 1;
  for (Eigen::Index i = 0; i < n; ++i) states *= 3;

  double best = std::numeric_limits<double>::infinity();
  for (long code = 0; code < states; ++code) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> free;
    long c = code;
    for (Eigen::Index i = 0; i < n; ++i, c /= 3) {
      if (c % 3 == 1) a[i] = upper[i];
      if (c % 3 == 2) free.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(free.size());
    if (m > 0) {
      // [Q_FF y_F; y_F' 0] [a_F; nu] = [1 - Q_F,fixed a_fixed; -y_fixed' a_fixed]
      Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(m + 1, m + 1);
      Eigen::VectorXd rhs(m + 1);
      for (Eigen::Index r = 0; r < m; ++r) {
        for (Eigen::Index s = 0; s < m; ++s) sys(r, s) = q(free[r], free[s]);
        sys(r, m) = sys(m, r) = y[free[r]];
        rhs[r] = 1.0 - q.row(free[r]).dot(a);
      }
      rhs[m] = -y.dot(a);
      const Eigen::VectorXd sol = sys.colPivHouseholderQr().solve(rhs);
      if (!(sys * sol).isApprox(rhs, 1e-9)) continue;
      for (Eigen::Index r = 0; r < m; ++r) a[free[r]] = sol[r];
    }
    if (std::abs(y.dot(a)) > 1e-9) continue;
    if ((a.array() < -1e-12).any() || (a.array() > upper.array() + 1e-12).any()) continue;
    const double objective = 0.5 * a.dot(q * a) - a.sum();
    if (objective < best) {
      best = objective;
      if (argmin != nullptr) *argmin = a;
    }
  }
  return best;
}

}  // namespace chewtex::test
