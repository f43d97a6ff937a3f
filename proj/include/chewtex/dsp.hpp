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

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "chewtex/corpus.hpp"

namespace chewtex::dsp {

/// One second-order section, normalized so that a0 = 1:
///   H(z) = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2).
/// A first-order section has b2 = a2 = 0.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;

  std::complex<double> response(std::complex<double> z) const;
  /// Largest pole magnitude of the section.
  double max_pole_radius() const;
};

enum class FilterKind { kHighpassButterworth, kLowpassButterworth };

/// Digital Butterworth filter realized as a cascade of second-order sections
/// (one trailing first-order section when the order is odd).
struct FilterSpec {
  FilterKind kind = FilterKind::kHighpassButterworth;
  int order = 0;
  double cutoff_hz = 0.0;
  double sample_rate = 0.0;
  std::vector<Biquad> sections;

  /// Complex response at frequency `hz`.
  std::complex<double> response(double hz) const;
  double magnitude(double hz) const { return std::abs(response(hz)); }
};

/// Butterworth prototype mapped through the bilinear transform with the
/// cutoff pre-warped, so |H(cutoff)| = 1/sqrt(2) exactly.
/// Throws kDesign unless 0 < cutoff < fs/2 and order >= 1.
FilterSpec design_highpass(int order, double cutoff_hz, double sample_rate);
FilterSpec design_lowpass(int order, double cutoff_hz, double sample_rate);

/// Causal filtering through the cascade, zero initial state, transposed
/// direct form II per section.
Eigen::VectorXd apply_filter(const FilterSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x);

inline constexpr int kAntiAliasOrder = 8;
inline constexpr double kAntiAliasFraction = 0.45;  // of the target rate

/// Anti-aliased integer-factor decimation. The output keeps every M-th
/// low-passed sample starting at index 0, i.e. ceil(n / M) samples.
/// Throws kUnsupportedRate for non-integer factors or upsampling.
AudioRecording downsample(const AudioRecording& recording, int target_hz);

/// Downsample (when needed) and high-pass a recording: the front end shared
/// by both recognition algorithms.
struct FrontEnd {
  int target_rate_hz = 8000;
  int hp_order = 9;
  double hp_cutoff_hz = 20.0;
};

AudioRecording preprocess(const AudioRecording& recording, const FrontEnd& front_end);

}  // namespace chewtex::dsp
