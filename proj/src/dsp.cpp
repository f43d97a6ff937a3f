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

#include "chewtex/dsp.hpp"

#include <cmath>
#include <numbers>

#include "chewtex/error.hpp"

namespace chewtex::dsp {

std::complex<double> Biquad::response(std::complex<double> z) const {
  const std::complex<double> zi = 1.0 / z;
  return (b0 + zi * (b1 + zi * b2)) / (1.0 + zi * (a1 + zi * a2));
}

double Biquad::max_pole_radius() const {
  if (a2 == 0.0) return std::abs(a1);
  const std::complex<double> disc = std::sqrt(std::complex<double>(a1 * a1 - 4.0 * a2));
  return std::max(std::abs((-a1 + disc) / 2.0), std::abs((-a1 - disc) / 2.0));
}

std::complex<double> FilterSpec::response(double hz) const {
  const std::complex<double> z = std::polar(1.0, 2.0 * std::numbers::pi * hz / sample_rate);
  std::complex<double> h = 1.0;
  for (const auto& s : sections) h *= s.response(z);
  return h;
}

namespace {

FilterSpec design_butterworth(FilterKind kind, int order, double cutoff_hz, double fs) {
  require(order >= 1, ErrorKind::kDesign, "filter order must be >= 1");
  require(fs > 0.0, ErrorKind::kDesign, "sample rate must be positive");
  require(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0, ErrorKind::kDesign,
          "cutoff must lie strictly between 0 and the Nyquist frequency");

  const bool highpass = kind == FilterKind::kHighpassButterworth;
  const double warped = 2.0 * fs * std::tan(std::numbers::pi * cutoff_hz / fs);
  const double two_fs = 2.0 * fs;

  auto digital_pole = [&](int k) {
    const std::complex<double> proto =
        std::polar(1.0, std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order));
    const std::complex<double> s = highpass ? warped / proto : warped * proto;
    return (two_fs + s) / (two_fs - s);
  };

  FilterSpec spec{kind, order, cutoff_hz, fs, {}};
  // Each section is scaled to unit gain where the full filter has unit gain:
  // z = -1 (Nyquist) for high-pass, z = 1 (DC) for low-pass.
  const double zero_sign = highpass ? -1.0 : 1.0;
  for (int k = 0; k < order / 2; ++k) {
    const std::complex<double> p = digital_pole(k);
    Biquad s;
    s.a1 = -2.0 * p.real();
    s.a2 = std::norm(p);
    const double gain = highpass ? (1.0 - s.a1 + s.a2) / 4.0 : (1.0 + s.a1 + s.a2) / 4.0;
    s.b0 = gain;
    s.b1 = 2.0 * zero_sign * gain;
    s.b2 = gain;
    spec.sections.push_back(s);
  }
  if (order % 2 == 1) {
    const double p = digital_pole(order / 2).real();
    Biquad s;
    s.a1 = -p;
    const double gain = highpass ? (1.0 - s.a1) / 2.0 : (1.0 + s.a1) / 2.0;
    s.b0 = gain;
    s.b1 = zero_sign * gain;
    spec.sections.push_back(s);
  }
  return spec;
}

}  // namespace

FilterSpec design_highpass(int order, double cutoff_hz, double sample_rate) {
  return design_butterworth(FilterKind::kHighpassButterworth, order, cutoff_hz, sample_rate);
}

FilterSpec design_lowpass(int order, double cutoff_hz, double sample_rate) {
  return design_butterworth(FilterKind::kLowpassButterworth, order, cutoff_hz, sample_rate);
}

Eigen::VectorXd apply_filter(const FilterSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::VectorXd y = x;
  for (const auto& s : spec.sections) {
    double z1 = 0.0, z2 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double in = y[i];
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y[i] = out;
    }
  }
  return y;
}

AudioRecording downsample(const AudioRecording& recording, int target_hz) {
  require(target_hz > 0, ErrorKind::kUnsupportedRate, "target rate must be positive");
  require(target_hz <= recording.sample_rate, ErrorKind::kUnsupportedRate,
          "cannot downsample " + std::to_string(recording.sample_rate) + " Hz to " +
              std::to_string(target_hz) + " Hz");
  require(recording.sample_rate % target_hz == 0, ErrorKind::kUnsupportedRate,
          "only integer decimation factors are supported (" +
              std::to_string(recording.sample_rate) + " -> " + std::to_string(target_hz) + " Hz)");

  const int factor = recording.sample_rate / target_hz;
  AudioRecording out = recording;
  if (factor == 1) return out;

  const FilterSpec aa = design_lowpass(kAntiAliasOrder, kAntiAliasFraction * target_hz,
                                       recording.sample_rate);
  const Eigen::VectorXd smooth = apply_filter(aa, recording.samples);
  const Eigen::Index n = (smooth.size() + factor - 1) / factor;
  out.sample_rate = target_hz;
  out.samples = smooth(Eigen::seqN(0, n, factor));
  return out;
}

AudioRecording preprocess(const AudioRecording& recording, const FrontEnd& front_end) {
  AudioRecording out = recording.sample_rate == front_end.target_rate_hz
                           ? recording
                           : downsample(recording, front_end.target_rate_hz);
  const FilterSpec hp =
      design_highpass(front_end.hp_order, front_end.hp_cutoff_hz, out.sample_rate);
  out.samples = apply_filter(hp, out.samples);
  return out;
}

}  // namespace chewtex::dsp
