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

#include "chewtex/learn/svm.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "chewtex/error.hpp"

namespace chewtex::learn {

ClassWeights ClassWeights::balanced(const Eigen::Ref<const Eigen::VectorXi>& labels) {
  const double n = static_cast<double>(labels.size());
  const double pos = static_cast<double>((labels.array() > 0).count());
  const double neg = n - pos;
  ClassWeights w;
  if (pos > 0) w.positive = n / (2.0 * pos);
  if (neg > 0) w.negative = n / (2.0 * neg);
  return w;
}

Eigen::MatrixXd squared_distances(const Eigen::Ref<const Eigen::MatrixXd>& a,
                                  const Eigen::Ref<const Eigen::MatrixXd>& b) {
  require(a.cols() == b.cols(), ErrorKind::kShape, "squared_distances: column mismatch");
  Eigen::MatrixXd d = -2.0 * a * b.transpose();
  d.colwise() += a.rowwise().squaredNorm();
  d.rowwise() += b.rowwise().squaredNorm().transpose();
  return d.cwiseMax(0.0);
}

namespace {

/// Dual:  min 0.5 a'Qa - e'a  s.t.  y'a = 0,  0 <= a_i <= C_i,
/// with Q_ij = y_i y_j K_ij. Gradient-tracking SMO in the style of LIBSVM.
class SmoSolver {
 public:
  SmoSolver(const Eigen::Ref<const Eigen::MatrixXd>& kernel, const Eigen::VectorXi& y,
            const Eigen::VectorXd& upper, double tolerance, long max_iterations)
      : k_(kernel), y_(y.cast<double>()), upper_(upper), tol_(tolerance), max_iter_(max_iterations) {}

  SmoDiagnostics solve() {
    const Eigen::Index n = y_.size();
    alpha_ = Eigen::VectorXd::Zero(n);
    grad_ = Eigen::VectorXd::Constant(n, -1.0);

    SmoDiagnostics diag;
    for (diag.iterations = 0; diag.iterations < max_iter_; ++diag.iterations) {
      Eigen::Index i, j;
      const double gap = select_pair(i, j);
      if (gap < tol_) {
        diag.converged = true;
        break;
      }
      update_pair(i, j);
    }
    Eigen::Index i, j;
    diag.max_violation = std::max(0.0, select_pair(i, j));
    diag.alpha = alpha_;
    diag.objective = 0.5 * alpha_.dot(grad_ - Eigen::VectorXd::Ones(n));
    return diag;
  }

  /// Offset rho such that decision(x) = sum a_i y_i K(x_i, x) - rho.
  double rho() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    int free = 0;
    for (Eigen::Index t = 0; t < y_.size(); ++t) {
      const double yg = y_[t] * grad_[t];
      if (at_upper(t)) {
        if (y_[t] < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y_[t] > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++free;
        sum_free += yg;
      }
    }
    return free > 0 ? sum_free / free : (ub + lb) / 2.0;
  }

 private:
  bool at_upper(Eigen::Index t) const { return alpha_[t] >= upper_[t]; }
  bool at_lower(Eigen::Index t) const { return alpha_[t] <= 0.0; }
  bool in_up(Eigen::Index t) const { return y_[t] > 0 ? !at_upper(t) : !at_lower(t); }
  bool in_low(Eigen::Index t) const { return y_[t] > 0 ? !at_lower(t) : !at_upper(t); }

  /// Maximal violating pair; returns m(a) - M(a).
  double select_pair(Eigen::Index& i, Eigen::Index& j) const {
    i = j = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < y_.size(); ++t) {
      const double v = -y_[t] * grad_[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    if (i < 0 || j < 0) return 0.0;
    return g_max - g_min;
  }

  void update_pair(Eigen::Index i, Eigen::Index j) {
    const double ci = upper_[i], cj = upper_[j];
    const double old_i = alpha_[i], old_j = alpha_[j];
    double quad = k_(i, i) + k_(j, j) - 2.0 * k_(i, j);
    if (quad <= 0.0) quad = 1e-12;
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > ci - cj) {
        if (ai > ci) {
          ai = ci;
          aj = ci - diff;
        }
      } else if (aj > cj) {
        aj = cj;
        ai = cj + diff;
      }
    } else {
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > ci) {
        if (ai > ci) {
          ai = ci;
          aj = sum - ci;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > cj) {
        if (aj > cj) {
          aj = cj;
          ai = sum - cj;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    const double di = (ai - old_i) * y_[i];
    const double dj = (aj - old_j) * y_[j];
    // grad_t += y_t (K_ti y_i dai + K_tj y_j daj)
    grad_.array() += y_.array() * (k_.col(i).array() * di + k_.col(j).array() * dj);
  }

  Eigen::Ref<const Eigen::MatrixXd> k_;
  Eigen::VectorXd y_;
  Eigen::VectorXd upper_;
  double tol_;
  long max_iter_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd grad_;
};

void check_labels(const Eigen::Ref<const Eigen::VectorXi>& y) {
  require((y.array().abs() == 1).all(), ErrorKind::kConfig, "SVM labels must be +1 or -1");
  const auto pos = (y.array() > 0).count();
  require(pos > 0 && pos < y.size(), ErrorKind::kDegenerateLabels,
          "SVM training needs at least one example of each class");
}

}  // namespace

DualSolution svm_solve_dual(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                            const Eigen::Ref<const Eigen::VectorXi>& y, const SvmParams& params) {
  require(params.C > 0.0 && params.gamma > 0.0, ErrorKind::kConfig, "C and gamma must be positive");
  require(kernel.rows() == y.size() && kernel.cols() == y.size(), ErrorKind::kShape,
          "SVM: kernel and labels disagree in size");
  check_labels(y);

  Eigen::VectorXd upper(y.size());
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    upper[t] = params.C * (y[t] > 0 ? params.weights.positive : params.weights.negative);
  }
  const Eigen::VectorXi labels = y;
  SmoSolver solver(kernel, labels, upper, params.tolerance, params.max_iterations);
  DualSolution out;
  out.diagnostics = solver.solve();
  out.bias = -solver.rho();
  return out;
}

SvmFit svm_train_kernel(const Eigen::Ref<const Eigen::MatrixXd>& kernel,
                        const Eigen::Ref<const Eigen::MatrixXd>& x,
                        const Eigen::Ref<const Eigen::VectorXi>& y, const SvmParams& params) {
  require(x.rows() == y.size(), ErrorKind::kShape, "SVM: features and labels disagree in size");
  DualSolution dual = svm_solve_dual(kernel, y, params);

  SvmFit fit;
  fit.diagnostics = std::move(dual.diagnostics);
  const Eigen::VectorXd& alpha = fit.diagnostics.alpha;
  std::vector<Eigen::Index> support;
  for (Eigen::Index t = 0; t < alpha.size(); ++t) {
    if (alpha[t] > 0.0) support.push_back(t);
  }
  auto& m = fit.model;
  m.support_vectors = x(support, Eigen::all);
  m.dual_coeffs.resize(static_cast<Eigen::Index>(support.size()));
  for (std::size_t s = 0; s < support.size(); ++s) {
    m.dual_coeffs[static_cast<Eigen::Index>(s)] = alpha[support[s]] * y[support[s]];
  }
  m.bias = dual.bias;
  m.gamma = params.gamma;
  m.C = params.C;
  m.weights = params.weights;
  return fit;
}

SvmFit svm_train(const Eigen::Ref<const Eigen::MatrixXd>& x,
                 const Eigen::Ref<const Eigen::VectorXi>& y, const SvmParams& params) {
  require(params.gamma > 0.0, ErrorKind::kConfig, "gamma must be positive");
  const Eigen::MatrixXd kernel = (-params.gamma * squared_distances(x, x).array()).exp().matrix();
  return svm_train_kernel(kernel, x, y, params);
}

SvmPrediction svm_predict(const SvmModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x) {
  require(x.cols() == model.dimension(), ErrorKind::kShape,
          "SVM expects " + std::to_string(model.dimension()) + " features, got " +
              std::to_string(x.cols()));
  SvmPrediction out;
  if (model.support_vectors.rows() == 0) {
    out.decision_values = Eigen::VectorXd::Constant(x.rows(), model.bias);
  } else {
    // Row by row so a sample's decision does not depend on its batch.
    out.decision_values.resize(x.rows());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      const Eigen::VectorXd k =
          (-model.gamma * (model.support_vectors.rowwise() - x.row(r)).rowwise().squaredNorm().array()).exp();
      out.decision_values[r] = k.dot(model.dual_coeffs) + model.bias;
    }
  }
  out.labels = (out.decision_values.array() > 0.0).select(Eigen::VectorXi::Ones(x.rows()),
                                                          -Eigen::VectorXi::Ones(x.rows()));
  return out;
}

}  // namespace chewtex::learn
