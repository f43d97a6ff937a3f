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
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "chewtex/error.hpp"

namespace chewtex::features {

inline constexpr double kBandLogEpsilon = 1e-12;
inline constexpr double kConditionCapLog10 = 12.0;
inline constexpr double kMaxFractalDimension = 20.0;
inline constexpr int kDefaultAutocorrOrder = 10;
inline constexpr Eigen::Index kMinBandSegment = 64;
inline constexpr double kPeriodogramFrameSeconds = 0.064;

/// Ascending band boundaries in Hz; band i spans [edges[i], edges[i+1]).
struct BandPlan {
  std::vector<double> edges_hz;

  int count() const { return edges_hz.empty() ? 0 : static_cast<int>(edges_hz.size()) - 1; }

  /// Doubling grid 2000 * 2^-11 ... 2000 Hz (eleven bands) extended by the
  /// 2-4 kHz and 4-8 kHz bands, keeping only bands that end at or below
  /// the Nyquist frequency of `sample_rate`.
  static BandPlan standard(double sample_rate);

  /// Throws kConfig unless edges are strictly increasing, non-negative and
  /// end at or below fs/2.
  void validate(double sample_rate) const;

  bool operator==(const BandPlan&) const = default;
};

/// [band log-energies | fractal dimension | log10 condition number |
///  skewness | kurtosis]; dimension bands + 4 for every segment length.
struct FeatureVector {
  Eigen::VectorXd values;
  int bands = 0;

  Eigen::Index size() const { return values.size(); }
  auto band_energies() const { return values.head(bands); }
  double fd() const { return values[bands]; }
  double cn() const { return values[bands + 1]; }
  double m3() const { return values[bands + 2]; }
  double m4() const { return values[bands + 3]; }
};

struct FeatureConfig {
  BandPlan plan;
  int autocorr_order = kDefaultAutocorrOrder;

  int dimension() const { return plan.count() + 4; }
  bool operator==(const FeatureConfig&) const = default;
};

std::vector<std::string> feature_names(const BandPlan& plan);

/// Mean band power from an averaged Hann periodogram (64 ms frames, 50 %
/// overlap). Powers are one-sided and scaled so that summing over every
/// bin gives the mean square of the segment. A band narrower than the bin
/// spacing takes the linearly interpolated spectral density at its
/// geometric centre times its width.
Eigen::VectorXd band_powers(const Eigen::Ref<const Eigen::VectorXd>& segment, double sample_rate,
                            const BandPlan& plan);

/// log(1 + power / 1e-12) of band_powers.
Eigen::VectorXd band_energies(const Eigen::Ref<const Eigen::VectorXd>& segment,
                              double sample_rate, const BandPlan& plan);

/// Katz fractal dimension log10(n) / (log10(n) + log10(d / L)) with n steps,
/// L the summed absolute amplitude steps and d the largest excursion from
/// the first sample. Amplitude-only distances make the estimate invariant
/// to positive scaling. A constant segment yields 1; when d / L drops to
/// the point where the denominator vanishes (near-Nyquist oscillation) the
/// result saturates at kMaxFractalDimension.
template <typename Derived>
typename Derived::Scalar fractal_dimension(const Eigen::MatrixBase<Derived>& segment) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index size = segment.size();
  require(size >= 3, ErrorKind::kSegmentTooShort, "fractal dimension needs >= 3 samples");
  const Eigen::Index steps = size - 1;
  const Scalar length = (segment.tail(steps) - segment.head(steps)).cwiseAbs().sum();
  if (!(length > Scalar(0))) return Scalar(1);
  const Scalar extent = (segment.array() - segment(0)).abs().maxCoeff();
  const Scalar log_n = std::log10(static_cast<Scalar>(steps));
  const Scalar denominator = log_n + std::log10(extent / length);
  if (denominator <= log_n / Scalar(kMaxFractalDimension)) return Scalar(kMaxFractalDimension);
  return log_n / denominator;
}

/// log10 of the condition number of the order x order symmetric Toeplitz
/// matrix built from biased autocorrelation lags 0..order-1 of the
/// zero-mean segment. Numerically singular matrices (smallest singular
/// value below 1e-12 of the largest) report kConditionCapLog10.
template <typename Derived>
typename Derived::Scalar condition_number(const Eigen::MatrixBase<Derived>& segment, int order) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = segment.size();
  require(order >= 2, ErrorKind::kConfig, "autocorrelation order must be >= 2");
  require(n > order, ErrorKind::kSegmentTooShort,
          "condition number needs more samples than the autocorrelation order");

  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> centred =
      segment.array() - segment.mean();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> lags(order);
  for (int k = 0; k < order; ++k) {
    lags[k] = centred.head(n - k).dot(centred.tail(n - k)) / static_cast<Scalar>(n);
  }
  Matrix toeplitz(order, order);
  for (int i = 0; i < order; ++i) {
    for (int j = 0; j < order; ++j) toeplitz(i, j) = lags[std::abs(i - j)];
  }
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(toeplitz, Eigen::EigenvaluesOnly);
  const auto singular = solver.eigenvalues().cwiseAbs();
  const Scalar largest = singular.maxCoeff();
  const Scalar smallest = singular.minCoeff();
  if (!(largest > Scalar(0)) || smallest <= largest * Scalar(1e-12)) {
    return Scalar(kConditionCapLog10);
  }
  return std::log10(largest / smallest);
}

template <typename Scalar>
struct Moments {
  Scalar skewness = 0;
  Scalar kurtosis = 0;
};

/// Standardized third and fourth central moments; (0, 0) when the variance
/// is negligible relative to the sample magnitude.
template <typename Derived>
Moments<typename Derived::Scalar> higher_moments(const Eigen::MatrixBase<Derived>& segment) {
  using Scalar = typename Derived::Scalar;
  require(segment.size() >= 4, ErrorKind::kSegmentTooShort, "moments need >= 4 samples");
  const auto centred = (segment.array() - segment.mean()).eval();
  const Scalar variance = centred.square().mean();
  const Scalar scale = segment.cwiseAbs().maxCoeff() * Scalar(1e-12);
  if (!(variance > scale * scale)) return {};
  return {centred.cube().mean() / std::pow(variance, Scalar(1.5)),
          centred.square().square().mean() / (variance * variance)};
}

FeatureVector extract_segment_features(const Eigen::Ref<const Eigen::VectorXd>& segment,
                                       double sample_rate, const FeatureConfig& config);

/// Sample span inside a bout.
struct Window {
  Eigen::Index offset = 0;
  Eigen::Index length = 0;
};

struct BoutWindows {
  std::vector<Window> windows;
  bool short_bout = false;  // bout shorter than one window: a single whole-bout window
};

inline constexpr double kBoutWindowSeconds = 0.5;
inline constexpr double kBoutStepSeconds = 0.1;

/// floor((n - win) / step) + 1 overlapping windows in temporal order.
BoutWindows window_bout(Eigen::Index bout_samples, double sample_rate,
                        double window_s = kBoutWindowSeconds, double step_s = kBoutStepSeconds);

/// CSV with a header naming every coordinate; one row per segment.
void write_feature_csv(std::ostream& out, const BandPlan& plan,
                       const std::vector<std::string>& row_ids, const Eigen::MatrixXd& rows);

}  // namespace chewtex::features
