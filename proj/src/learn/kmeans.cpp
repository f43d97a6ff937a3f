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

#include "chewtex/learn/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "chewtex/error.hpp"
#include "chewtex/learn/svm.hpp"
#include "chewtex/random.hpp"

namespace chewtex::learn {

namespace {

/// Exact nearest-centroid search; writes squared distances when asked.
Eigen::VectorXi nearest_exact(const Eigen::MatrixXd& centroids,
                              const Eigen::Ref<const Eigen::MatrixXd>& x,
                              Eigen::VectorXd* distances = nullptr) {
  Eigen::VectorXi out(x.rows());
  if (distances) distances->resize(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      const double d = (x.row(i) - centroids.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    out[i] = static_cast<int>(best);
    if (distances) (*distances)[i] = best_d;
  }
  return out;
}

/// Nearest centroid via the GEMM expansion of the squared distance.
Eigen::VectorXi nearest_fast(const Eigen::MatrixXd& centroids,
                             const Eigen::Ref<const Eigen::MatrixXd>& x) {
  const Eigen::MatrixXd d = squared_distances(x, centroids);
  Eigen::VectorXi out(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best;
    d.row(i).minCoeff(&best);
    out[i] = static_cast<int>(best);
  }
  return out;
}

double inertia_of(const Eigen::MatrixXd& centroids, const Eigen::Ref<const Eigen::MatrixXd>& x,
                  const Eigen::VectorXi& assign) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) s += (x.row(i) - centroids.row(assign[i])).squaredNorm();
  return s;
}

Eigen::MatrixXd plus_plus_seeds(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd c(k, x.cols());
  c.row(0) = x.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));
  Eigen::VectorXd d2 = (x.rowwise() - c.row(0)).rowwise().squaredNorm();
  for (int j = 1; j < k; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
    }
    c.row(j) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - c.row(j)).rowwise().squaredNorm());
  }
  return c;
}

}  // namespace

KMeansFit kmeans_fit(const Eigen::Ref<const Eigen::MatrixXd>& x, int k, std::uint64_t seed,
                     const KMeansOptions& options) {
  require(k >= 1, ErrorKind::kConfig, "k-means needs k >= 1");
  require(x.rows() >= k, ErrorKind::kConfig,
          "k-means needs at least k = " + std::to_string(k) + " vectors, got " +
              std::to_string(x.rows()));
  Rng rng(seed);
  KMeansFit fit;
  Eigen::MatrixXd centroids = plus_plus_seeds(x, k, rng);
  Eigen::VectorXi assign;

  for (fit.iterations = 0; fit.iterations < options.max_iterations;) {
    assign = nearest_fast(centroids, x);
    fit.inertia_history.push_back(inertia_of(centroids, x, assign));
    ++fit.iterations;

    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(k, x.cols());
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      next.row(assign[i]) += x.row(i);
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        next.row(c) /= counts[c];
        continue;
      }
      // Re-seed an empty cluster at the point farthest from its centroid.
      Eigen::Index far = 0;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double d = (x.row(i) - centroids.row(assign[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      next.row(c) = x.row(far);
      assign[far] = c;
    }
    const double shift = (next - centroids).rowwise().norm().maxCoeff();
    centroids = std::move(next);
    if (shift < options.tolerance) break;
  }

  fit.codebook.centroids = centroids;
  Eigen::VectorXd d;
  nearest_exact(centroids, x, &d);
  fit.codebook.inertia = d.sum();
  return fit;
}

Eigen::VectorXi assign_nearest(const Codebook& codebook, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  require(x.cols() == codebook.centroids.cols(), ErrorKind::kShape,
          "codebook dimension does not match the vectors");
  return nearest_exact(codebook.centroids, x);
}

Eigen::VectorXd bow_encode(const Codebook& codebook, const Eigen::Ref<const Eigen::MatrixXd>& vectors) {
  require(vectors.rows() > 0, ErrorKind::kShape, "bag-of-words needs at least one vector");
  const Eigen::VectorXi a = assign_nearest(codebook, vectors);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(codebook.k());
  for (Eigen::Index i = 0; i < a.size(); ++i) h[a[i]] += 1.0;
  return h / static_cast<double>(vectors.rows());
}

}  // namespace chewtex::learn
