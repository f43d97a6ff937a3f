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

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace chewtex {

enum class Attribute { kCrispy = 0, kWet = 1, kChewy = 2 };

inline constexpr std::array<Attribute, 3> kAttributes = {
    Attribute::kCrispy, Attribute::kWet, Attribute::kChewy};

std::string_view to_string(Attribute attribute);
Attribute attribute_from_string(std::string_view name);

/// Independent binary texture labels of one food type.
struct AttributeLabels {
  bool crispy = false;
  bool wet = false;
  bool chewy = false;

  bool operator[](Attribute attribute) const {
    switch (attribute) {
      case Attribute::kCrispy: return crispy;
      case Attribute::kWet: return wet;
      case Attribute::kChewy: return chewy;
    }
    return false;
  }
  bool operator==(const AttributeLabels&) const = default;
};

using LabelTable = std::map<std::string, AttributeLabels, std::less<>>;

/// One subject x food recording.
struct AudioRecording {
  std::string subject_id;
  std::string food_type;
  int sample_rate = 0;
  Eigen::VectorXd samples;

  std::string id() const;
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

std::string make_recording_id(std::string_view subject_id, std::string_view food_type);

struct ChewAnnotation {
  std::string recording_id;
  int bout_id = 0;
  int chew_id = 0;
  double start_s = 0.0;
  double stop_s = 0.0;

  double duration() const { return stop_s - start_s; }
  bool operator==(const ChewAnnotation&) const = default;
};

struct BoutAnnotation {
  std::string recording_id;
  int bout_id = 0;
  std::vector<int> chew_ids;  // in start-time order
  double start_s = 0.0;
  double stop_s = 0.0;

  double duration() const { return stop_s - start_s; }
  bool operator==(const BoutAnnotation&) const = default;
};

/// Recordings plus their chew/bout ground truth. Immutable once built.
struct Corpus {
  std::vector<AudioRecording> recordings;
  std::vector<ChewAnnotation> chews;  // sorted by (recording, bout, start)
  std::vector<BoutAnnotation> bouts;  // sorted by (recording, bout)
  LabelTable labels;

  const AudioRecording& recording(std::string_view id) const;
  const AttributeLabels& labels_of(const AudioRecording& rec) const;
  std::vector<std::string> subjects() const;    // sorted, unique
  std::vector<std::string> food_types() const;  // sorted, unique

  /// Chews of one bout, in start-time order.
  std::vector<ChewAnnotation> chews_of(const BoutAnnotation& bout) const;

  /// Checks cross-references: every chew lies inside an existing recording
  /// and every food type has a label row. Throws kValidation/kAnnotation.
  void validate() const;
};

// ---------------------------------------------------------------------------
// WAV

/// Decodes PCM16 or float32 RIFF/WAVE; multi-channel input is averaged to
/// mono. Subject and food are left empty.
AudioRecording load_wav(const std::filesystem::path& path);
AudioRecording decode_wav(std::span<const std::uint8_t> bytes);

/// Encodes mono PCM16 (samples are clamped to the representable range).
std::vector<std::uint8_t> encode_wav_pcm16(const AudioRecording& recording);
void write_wav(const std::filesystem::path& path, const AudioRecording& recording);

/// Rounds every sample to the PCM16 grid (k / 32768) so an encode/decode
/// round trip is lossless.
void quantize_pcm16(Eigen::VectorXd& samples);

// ---------------------------------------------------------------------------
// Annotations and labels

/// Parses `recording_id,bout_id,chew_id,start_s,stop_s` rows, validates them
/// and returns them sorted by (recording_id, bout_id, start_s).
std::vector<ChewAnnotation> parse_annotations(std::istream& in);
std::vector<ChewAnnotation> load_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, std::span<const ChewAnnotation> chews);

/// Sorts and validates a chew set (positive duration, no overlaps inside a
/// bout, chew ids ordered like start times).
std::vector<ChewAnnotation> validate_chews(std::vector<ChewAnnotation> chews);

std::vector<BoutAnnotation> derive_bouts(std::span<const ChewAnnotation> chews);

/// The nine reference foods and their texture attributes.
LabelTable builtin_label_table();
LabelTable parse_label_table(std::istream& in);
LabelTable load_label_table(const std::filesystem::path& path);
void write_label_table(std::ostream& out, const LabelTable& table);

// ---------------------------------------------------------------------------
// Synthetic corpus

/// Knobs of the synthetic chewing-audio generator. Chew durations follow the
/// per-food duration statistics of the reference data set.
struct SynthConfig {
  std::uint64_t seed = 7;
  int n_subjects = 9;
  int sample_rate = 16000;
  int bouts_per_recording = 1;
  double chews_per_bout_mean = 21.0;
  double chews_per_bout_std = 5.0;
  int chews_per_bout_min = 3;
  double gap_mean_s = 0.15;  // silence between successive chews
  double gap_std_s = 0.05;
  double padding_s = 0.5;    // before the first and after the last bout
  double inter_bout_s = 2.0;
  double snr_db = 20.0;

  void validate() const;
};

Corpus synth_corpus(const SynthConfig& config);

/// Writes `<id>.wav` per recording, `annotations.csv`, `labels.csv` and
/// `manifest.json` into `dir`.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                  const SynthConfig* generator = nullptr);

/// Reads a directory produced by write_corpus (or hand-assembled with the
/// same manifest schema). Missing labels.csv falls back to the builtin table.
Corpus load_corpus(const std::filesystem::path& dir);

inline constexpr std::string_view kManifestSchema = "chewtex.corpus-manifest/1";

}  // namespace chewtex
