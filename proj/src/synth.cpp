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

// Synthetic chewing audio. Each food is rendered as a sum of acoustic
// archetypes selected by its texture labels:
//   crispy  Poisson click train, each click a 1.5-3.5 kHz resonant ring
//   wet     80-300 Hz damped sinusoid bursts over a faint squelch floor
//   chewy   long 50-150 Hz amplitude-modulated drone
// and every chew additionally carries a mid-band "thud" common to all foods.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "chewtex/corpus.hpp"
#include "chewtex/error.hpp"
#include "chewtex/random.hpp"

namespace chewtex {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kReferenceLevel = 0.05;

struct DurationStats {
  double mean_s;
  double std_s;
};

// Per-food chew duration statistics of the reference recordings.
DurationStats chew_duration_stats(std::string_view food) {
  if (food == "apple") return {0.54, 0.13};
  if (food == "banana") return {0.54, 0.16};
  if (food == "bread") return {0.56, 0.13};
  if (food == "candy_bar") return {0.62, 0.17};
  if (food == "cookie") return {0.51, 0.14};
  if (food == "lettuce") return {0.50, 0.11};
  if (food == "potato_chips") return {0.54, 0.12};
  if (food == "strawberry") return {0.52, 0.13};
  if (food == "toffee") return {0.70, 0.17};
  return {0.56, 0.15};
}

struct FoodVoice {
  AttributeLabels labels;
  DurationStats duration;
  double click_rate_hz = 0.0;
  double resonance_hz = 0.0;
  double burst_lo_hz = 0.0;
  double burst_hi_hz = 0.0;
  double drone_hz = 0.0;
  double drone_mod_hz = 0.0;
};

struct SubjectVoice {
  double gain = 1.0;
  double thud_hz = 500.0;
};

FoodVoice make_food_voice(std::uint64_t seed, std::size_t index, AttributeLabels labels,
                          std::string_view name) {
  Rng rng(Rng::mix(seed, 1000 + index));
  FoodVoice v;
  v.labels = labels;
  v.duration = chew_duration_stats(name);
  v.click_rate_hz = rng.uniform(40.0, 90.0);
  v.resonance_hz = rng.uniform(1500.0, 3500.0);
  v.burst_lo_hz = rng.uniform(80.0, 200.0);
  v.burst_hi_hz = std::min(300.0, v.burst_lo_hz + rng.uniform(40.0, 100.0));
  v.drone_hz = rng.uniform(50.0, 150.0);
  v.drone_mod_hz = rng.uniform(2.0, 5.0);
  return v;
}

SubjectVoice make_subject_voice(std::uint64_t seed, int index) {
  Rng rng(Rng::mix(seed, 2000 + static_cast<std::uint64_t>(index)));
  SubjectVoice v;
  v.gain = std::exp(rng.uniform(std::log(0.7), std::log(1.3)));
  v.thud_hz = rng.uniform(350.0, 700.0);
  return v;
}

/// White noise through a constant-peak-gain band-pass biquad, scaled to `rms`.
void add_band_noise(Eigen::Ref<Eigen::VectorXd> out, Rng& rng, double fs, double center_hz,
                    double bandwidth_hz, double rms, const Eigen::VectorXd& envelope) {
  const Eigen::Index n = out.size();
  const double w0 = kTwoPi * center_hz / fs;
  const double alpha = std::sin(w0) * bandwidth_hz / (2.0 * center_hz);
  const double a0 = 1.0 + alpha;
  const double b0 = alpha / a0, b2 = -alpha / a0;
  const double a1 = -2.0 * std::cos(w0) / a0, a2 = (1.0 - alpha) / a0;
  Eigen::VectorXd band(n);
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = rng.normal();
    const double y = b0 * x + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = x;
    y2 = y1;
    y1 = y;
    band[i] = y;
  }
  const double current = std::sqrt(band.squaredNorm() / std::max<Eigen::Index>(n, 1));
  if (current > 0.0) out.array() += band.array() * envelope.array() * (rms / current);
}

void render_chew(Eigen::Ref<Eigen::VectorXd> out, Rng& rng, double fs, const FoodVoice& food,
                 const SubjectVoice& subject) {
  const Eigen::Index n = out.size();
  const double duration = n / fs;
  Eigen::VectorXd envelope(n);
  Eigen::VectorXd plateau(n);
  const double fade = std::min(0.03, duration / 4.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = i / fs;
    envelope[i] = std::sin(std::numbers::pi * t / duration);
    const double edge = std::min(t, duration - t);
    plateau[i] = edge >= fade ? 1.0 : 0.5 - 0.5 * std::cos(std::numbers::pi * edge / fade);
  }

  add_band_noise(out, rng, fs, subject.thud_hz, 250.0, kReferenceLevel * subject.gain, envelope);

  if (food.labels.crispy) {
    const Eigen::Index ring = static_cast<Eigen::Index>(0.008 * fs);
    double t = rng.exponential(food.click_rate_hz);
    while (t < duration) {
      const auto start = static_cast<Eigen::Index>(t * fs);
      const double amp = rng.uniform(0.15, 0.4) * subject.gain * envelope[start];
      const double f = food.resonance_hz + rng.uniform(-250.0, 250.0);
      for (Eigen::Index k = 0; k < ring && start + k < n; ++k) {
        const double tau = k / fs;
        out[start + k] += amp * std::sin(kTwoPi * f * tau) * std::exp(-tau / 0.0015);
      }
      t += rng.exponential(food.click_rate_hz);
    }
  }

  if (food.labels.wet) {
    add_band_noise(out, rng, fs, 600.0, 800.0, 0.3 * kReferenceLevel * subject.gain, envelope);
    const std::size_t bursts = 2 + rng.index(3);
    for (std::size_t b = 0; b < bursts; ++b) {
      const auto start = static_cast<Eigen::Index>(rng.uniform(0.0, 0.7) * n);
      const double amp = rng.uniform(0.08, 0.14) * subject.gain;
      const double f = rng.uniform(food.burst_lo_hz, food.burst_hi_hz);
      const double decay = rng.uniform(0.025, 0.05);
      const double phase = rng.uniform(0.0, kTwoPi);
      const auto len = static_cast<Eigen::Index>(5.0 * decay * fs);
      for (Eigen::Index k = 0; k < len && start + k < n; ++k) {
        const double tau = k / fs;
        out[start + k] +=
            amp * plateau[start + k] * std::sin(kTwoPi * f * tau + phase) * std::exp(-tau / decay);
      }
    }
  }

  if (food.labels.chewy) {
    const double amp = 0.07 * subject.gain;
    const double f = food.drone_hz + rng.uniform(-5.0, 5.0);
    const double phase = rng.uniform(0.0, kTwoPi);
    const double mod_phase = rng.uniform(0.0, kTwoPi);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = i / fs;
      const double mod = 1.0 + 0.5 * std::sin(kTwoPi * food.drone_mod_hz * t + mod_phase);
      out[i] += amp * plateau[i] * mod * std::sin(kTwoPi * f * t + phase);
    }
  }
}

std::string subject_name(int index, int total) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), total > 99 ? "s%03d" : "s%02d", index + 1);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  require(n_subjects >= 2, ErrorKind::kConfig, "synth: n_subjects must be >= 2");
  require(sample_rate >= 8000, ErrorKind::kConfig, "synth: sample_rate must be >= 8000 Hz");
  require(bouts_per_recording >= 1, ErrorKind::kConfig, "synth: bouts_per_recording must be >= 1");
  require(std::isfinite(chews_per_bout_mean) && chews_per_bout_mean >= 1.0, ErrorKind::kConfig,
          "synth: chews_per_bout_mean must be >= 1");
  require(std::isfinite(chews_per_bout_std) && chews_per_bout_std >= 0.0, ErrorKind::kConfig,
          "synth: chews_per_bout_std must be >= 0");
  require(chews_per_bout_min >= 1, ErrorKind::kConfig, "synth: chews_per_bout_min must be >= 1");
  require(std::isfinite(gap_mean_s) && gap_mean_s > 0.0, ErrorKind::kConfig,
          "synth: gap_mean_s must be > 0");
  require(std::isfinite(gap_std_s) && gap_std_s >= 0.0, ErrorKind::kConfig,
          "synth: gap_std_s must be >= 0");
  require(std::isfinite(padding_s) && padding_s >= 0.0, ErrorKind::kConfig,
          "synth: padding_s must be >= 0");
  require(std::isfinite(inter_bout_s) && inter_bout_s >= 0.0, ErrorKind::kConfig,
          "synth: inter_bout_s must be >= 0");
  require(std::isfinite(snr_db), ErrorKind::kConfig, "synth: snr_db must be finite");
}

Corpus synth_corpus(const SynthConfig& config) {
  config.validate();
  const double fs = config.sample_rate;

  Corpus corpus;
  corpus.labels = builtin_label_table();

  std::vector<std::pair<std::string, FoodVoice>> foods;
  std::size_t food_index = 0;
  for (const auto& [name, labels] : corpus.labels) {
    foods.emplace_back(name, make_food_voice(config.seed, food_index++, labels, name));
  }

  const double noise_std = kReferenceLevel * std::pow(10.0, -config.snr_db / 20.0);

  for (int s = 0; s < config.n_subjects; ++s) {
    const SubjectVoice subject = make_subject_voice(config.seed, s);
    for (std::size_t f = 0; f < foods.size(); ++f) {
      const auto& [food_name, food] = foods[f];
      Rng rng(Rng::mix(config.seed, 100000 + static_cast<std::uint64_t>(s) * 1000 + f));

      AudioRecording rec;
      rec.subject_id = subject_name(s, config.n_subjects);
      rec.food_type = food_name;
      rec.sample_rate = config.sample_rate;
      const std::string rec_id = rec.id();

      // Lay out chew boundaries in samples first, then render.
      struct Span {
        int bout;
        int chew;
        Eigen::Index start;
        Eigen::Index length;
      };
      std::vector<Span> spans;
      auto cursor = static_cast<Eigen::Index>(std::llround(config.padding_s * fs));
      for (int b = 0; b < config.bouts_per_recording; ++b) {
        if (b > 0) cursor += static_cast<Eigen::Index>(std::llround(config.inter_bout_s * fs));
        const int chews = std::max(
            config.chews_per_bout_min,
            static_cast<int>(std::lround(rng.normal(config.chews_per_bout_mean,
                                                    config.chews_per_bout_std))));
        for (int c = 0; c < chews; ++c) {
          if (c > 0) {
            const double gap = std::max(0.02, rng.normal(config.gap_mean_s, config.gap_std_s));
            cursor += static_cast<Eigen::Index>(std::llround(gap * fs));
          }
          const double lo = std::max(0.1, food.duration.mean_s - 2.5 * food.duration.std_s);
          const double hi = food.duration.mean_s + 2.5 * food.duration.std_s;
          double dur = rng.normal(food.duration.mean_s, food.duration.std_s);
          while (dur < lo || dur > hi) dur = rng.normal(food.duration.mean_s, food.duration.std_s);
          const auto length = static_cast<Eigen::Index>(std::llround(dur * fs));
          spans.push_back({b + 1, c + 1, cursor, length});
          cursor += length;
        }
      }
      cursor += static_cast<Eigen::Index>(std::llround(config.padding_s * fs));

      rec.samples = Eigen::VectorXd::Zero(cursor);
      for (const auto& span : spans) {
        render_chew(rec.samples.segment(span.start, span.length), rng, fs, food, subject);
        corpus.chews.push_back({rec_id, span.bout, span.chew, span.start / fs,
                                (span.start + span.length) / fs});
      }
      for (Eigen::Index i = 0; i < rec.samples.size(); ++i) {
        rec.samples[i] += noise_std * rng.normal();
      }
      quantize_pcm16(rec.samples);
      corpus.recordings.push_back(std::move(rec));
    }
  }

  corpus.chews = validate_chews(std::move(corpus.chews));
  corpus.bouts = derive_bouts(corpus.chews);
  return corpus;
}

}  // namespace chewtex
