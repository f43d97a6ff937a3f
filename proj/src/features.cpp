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

#include "chewtex/features.hpp"

#include <algorithm>
#include <complex>
#include <numbers>
#include <ostream>

#include <unsupported/Eigen/FFT>

#include "text_util.hpp"

namespace chewtex::features {

BandPlan BandPlan::standard(double sample_rate) {
  BandPlan plan;
  for (int k = 11; k >= 0; --k) plan.edges_hz.push_back(2000.0 / std::ldexp(1.0, k));
  for (double edge : {4000.0, 8000.0}) {
    if (edge <= sample_rate / 2.0) plan.edges_hz.push_back(edge);
  }
  return plan;
}

void BandPlan::validate(double sample_rate) const {
  require(edges_hz.size() >= 2, ErrorKind::kConfig, "band plan needs at least two edges");
  require(edges_hz.front() >= 0.0, ErrorKind::kConfig, "band edges must be non-negative");
  for (std::size_t i = 1; i < edges_hz.size(); ++i) {
    require(edges_hz[i] > edges_hz[i - 1], ErrorKind::kConfig,
            "band edges must be strictly increasing");
  }
  require(edges_hz.back() <= sample_rate / 2.0, ErrorKind::kConfig,
          "top band edge exceeds the Nyquist frequency");
}

std::vector<std::string> feature_names(const BandPlan& plan) {
  std::vector<std::string> names;
  for (int b = 0; b < plan.count(); ++b) {
    names.push_back("band_" + detail::format_double(plan.edges_hz[b]) + "_" +
                    detail::format_double(plan.edges_hz[b + 1]) + "hz");
  }
  for (const char* name : {"fd", "cn_log10", "m3", "m4"}) names.emplace_back(name);
  return names;
}

Eigen::VectorXd band_powers(const Eigen::Ref<const Eigen::VectorXd>& segment, double sample_rate,
                            const BandPlan& plan) {
  const Eigen::Index n = segment.size();
  require(n >= kMinBandSegment, ErrorKind::kSegmentTooShort,
          "band energies need >= " + std::to_string(kMinBandSegment) + " samples, got " +
              std::to_string(n));
  plan.validate(sample_rate);

  const Eigen::Index frame =
      std::min<Eigen::Index>(n, std::lround(kPeriodogramFrameSeconds * sample_rate));
  const Eigen::Index hop = std::max<Eigen::Index>(1, frame / 2);
  Eigen::Index nfft = 1;
  while (nfft < frame) nfft <<= 1;
  const Eigen::Index half = nfft / 2;

  Eigen::ArrayXd window(frame);
  for (Eigen::Index i = 0; i < frame; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / frame);
  }
  const double window_energy = window.square().sum();

  std::vector<Eigen::Index> starts;
  for (Eigen::Index s = 0; s + frame <= n; s += hop) starts.push_back(s);
  if (starts.back() + frame < n) starts.push_back(n - frame);

  thread_local Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buffer(static_cast<std::size_t>(nfft), 0.0);
  std::vector<std::complex<double>> spectrum;

  // density[k] = 2|X_k|^2 / (nfft * sum w^2), averaged over frames.
  Eigen::ArrayXd density = Eigen::ArrayXd::Zero(half + 1);
  for (Eigen::Index s : starts) {
    for (Eigen::Index i = 0; i < frame; ++i) {
      buffer[static_cast<std::size_t>(i)] = segment[s + i] * window[i];
    }
    fft.fwd(spectrum, buffer);
    for (Eigen::Index k = 0; k <= half; ++k) {
      density[k] += std::norm(spectrum[static_cast<std::size_t>(k)]);
    }
  }
  density *= 2.0 / (static_cast<double>(nfft) * window_energy * static_cast<double>(starts.size()));

  const double bin_hz = sample_rate / static_cast<double>(nfft);
  Eigen::VectorXd powers = Eigen::VectorXd::Zero(plan.count());
  for (int b = 0; b < plan.count(); ++b) {
    const double lo = plan.edges_hz[b];
    const double hi = plan.edges_hz[b + 1];
    const auto first = static_cast<Eigen::Index>(std::ceil(lo / bin_hz - 1e-9));
    bool any = false;
    for (Eigen::Index k = std::max<Eigen::Index>(first, 0); k <= half && k * bin_hz < hi; ++k) {
      if (k * bin_hz < lo) continue;
      // DC and Nyquist bins carry no mirrored half.
      powers[b] += (k == 0 || k == half) ? density[k] / 2.0 : density[k];
      any = true;
    }
    if (!any) {
      const double centre = std::sqrt(std::max(lo, 1e-9) * hi) / bin_hz;
      const auto k0 = std::min<Eigen::Index>(static_cast<Eigen::Index>(centre), half - 1);
      const double frac = std::clamp(centre - static_cast<double>(k0), 0.0, 1.0);
      powers[b] = ((1.0 - frac) * density[k0] + frac * density[k0 + 1]) * (hi - lo) / bin_hz;
    }
  }
  return powers;
}

Eigen::VectorXd band_energies(const Eigen::Ref<const Eigen::VectorXd>& segment,
                              double sample_rate, const BandPlan& plan) {
  return (band_powers(segment, sample_rate, plan).array() / kBandLogEpsilon).log1p().matrix();
}

FeatureVector extract_segment_features(const Eigen::Ref<const Eigen::VectorXd>& segment,
                                       double sample_rate, const FeatureConfig& config) {
  const int bands = config.plan.count();
  FeatureVector fv;
  fv.bands = bands;
  fv.values.resize(bands + 4);
  fv.values.head(bands) = band_energies(segment, sample_rate, config.plan);
  fv.values[bands] = fractal_dimension(segment);
  fv.values[bands + 1] = condition_number(segment, config.autocorr_order);
  const auto moments = higher_moments(segment);
  fv.values[bands + 2] = moments.skewness;
  fv.values[bands + 3] = moments.kurtosis;
  return fv;
}

BoutWindows window_bout(Eigen::Index bout_samples, double sample_rate, double window_s,
                        double step_s) {
  require(window_s > 0.0 && step_s > 0.0, ErrorKind::kConfig, "window and step must be positive");
  const auto win = static_cast<Eigen::Index>(std::llround(window_s * sample_rate));
  const auto step = std::max<Eigen::Index>(1, std::llround(step_s * sample_rate));
  BoutWindows out;
  if (bout_samples < win) {
    out.short_bout = true;
    out.windows.push_back({0, bout_samples});
    return out;
  }
  const Eigen::Index count = (bout_samples - win) / step + 1;
  out.windows.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index i = 0; i < count; ++i) out.windows.push_back({i * step, win});
  return out;
}

void write_feature_csv(std::ostream& out, const BandPlan& plan,
                       const std::vector<std::string>& row_ids, const Eigen::MatrixXd& rows) {
  require(static_cast<Eigen::Index>(row_ids.size()) == rows.rows(), ErrorKind::kShape,
          "feature CSV: one id per row required");
  require(rows.cols() == plan.count() + 4, ErrorKind::kShape,
          "feature CSV: column count does not match the band plan");
  out << "segment_id";
  for (const auto& name : feature_names(plan)) out << ',' << name;
  out << '\n';
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out << row_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < rows.cols(); ++c) out << ',' << detail::format_double(rows(r, c));
    out << '\n';
  }
}

}  // namespace chewtex::features
