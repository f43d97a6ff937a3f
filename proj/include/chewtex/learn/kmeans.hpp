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
#include <vector>

#include <Eigen/Core>

namespace chewtex::learn {

struct Codebook {
  Eigen::MatrixXd centroids;  // k x D
  double inertia = 0.0;

  Eigen::Index k() const { return centroids.rows(); }
  bool operator==(const Codebook&) const = default;
};

struct KMeansOptions {
  int max_iterations = 300;
  double tolerance = 1e-6;  // max centroid shift
};

struct KMeansFit {
  Codebook codebook;
  std::vector<double> inertia_history;  // after every assignment step
  int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations. Clusters that empty out
/// are re-seeded at the point farthest from its centroid.
KMeansFit kmeans_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, std::uint64_t seed,
                     const KMeansOptions& options = {});

/// Index of the nearest centroid per row (ties to the lowest index).
Eigen::VectorXi assign_nearest(const Codebook& codebook, const Eigen::Ref<const Eigen::MatrixXd>& x);

/// Normalized hard-assignment histogram of `vectors` over the codebook.
Eigen::VectorXd bow_encode(const Codebook& codebook, const Eigen::Ref<const Eigen::MatrixXd>& vectors);

}  // namespace chewtex::learn
