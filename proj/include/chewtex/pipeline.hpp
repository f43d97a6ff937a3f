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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "chewtex/corpus.hpp"
#include "chewtex/dsp.hpp"
#include "chewtex/features.hpp"
#include "chewtex/learn/bayes_opt.hpp"
#include "chewtex/learn/kmeans.hpp"
#include "chewtex/learn/standardizer.hpp"
#include "chewtex/learn/svm.hpp"

namespace chewtex::pipeline {

enum class Mode { kChewLevel, kBoutLevel };
std::string_view to_string(Mode mode);

struct PipelineConfig {
  dsp::FrontEnd front_end;
  /// An empty band plan resolves to BandPlan::standard at the target rate.
  features::FeatureConfig features;
  int codebook_size = 64;
  learn::HpoConfig hpo;
  std::uint64_t seed = 0;
  int jobs = 1;

  features::FeatureConfig resolved_features() const;
  void validate() const;
};

/// One binary attribute classifier. A degenerate classifier (single-class
/// training labels, or no usable feature variation) always predicts the
/// training majority.
struct AttributeClassifier {
  bool degenerate = false;
  bool majority = false;
  learn::SvmModel svm;
  double cv_score = 0.0;
  std::int64_t train_positives = 0;
  std::int64_t train_negatives = 0;

  bool operator==(const AttributeClassifier&) const = default;
};

struct AttributeModel {
  Mode mode = Mode::kChewLevel;
  dsp::FrontEnd front_end;
  features::FeatureConfig features;
  learn::Standardizer standardizer;                    // on chew features or BoW histograms
  std::optional<learn::Standardizer> window_standardizer;  // bout level only
  std::optional<learn::Codebook> codebook;             // bout level only
  std::array<AttributeClassifier, 3> classifiers;
  std::uint64_t seed = 0;

  /// Decision values per attribute (columns) for already-extracted raw
  /// feature rows (chew features, or BoW histograms at bout level).
  Eigen::MatrixXd decide(const Eigen::Ref<const Eigen::MatrixXd>& rows) const;
};

inline constexpr std::string_view kModelSchema = "chewtex.attribute-model/1";

/// Canonical JSON: sorted keys, shortest round-trip numbers.
std::string model_to_json(const AttributeModel& model);
AttributeModel model_from_json(std::string_view text);
void save_model(const std::filesystem::path& path, const AttributeModel& model);
AttributeModel load_model(const std::filesystem::path& path);

struct ChewPrediction {
  std::string recording_id;
  int bout_id = 0;
  int chew_id = 0;
  double start_s = 0.0;
  std::array<bool, 3> labels{};
  std::array<double, 3> decisions{};
};

struct Provenance {
  enum class Kind { kVoteAll, kVoteFirstN, kBoutBow };
  Kind kind = Kind::kVoteAll;
  int n = 0;  // vote-first-n only

  std::string str() const;
  bool operator==(const Provenance&) const = default;
};

struct BoutPrediction {
  std::string recording_id;
  int bout_id = 0;
  std::array<bool, 3> labels{};
  std::array<double, 3> scores{};  // positive fraction for votes, decision value for BoW
  Provenance provenance;
};

/// Features of every annotated chew and every bout window of a corpus,
/// computed once per recording after preprocessing.
struct CorpusFeatures {
  dsp::FrontEnd front_end;
  features::FeatureConfig features;
  Eigen::MatrixXd chews;                     // row i <-> corpus.chews[i]
  std::vector<Eigen::MatrixXd> bout_windows;  // entry i <-> corpus.bouts[i]
  std::vector<bool> short_bouts;
};

struct FeatureRequest {
  bool chews = true;
  bool windows = true;
};

CorpusFeatures compute_features(const Corpus& corpus, const PipelineConfig& config,
                                FeatureRequest request = {});

/// Chew features of one preprocessed recording. Throws kAnnotation when a
/// chew lies outside the recording.
Eigen::MatrixXd chew_feature_rows(const AudioRecording& preprocessed,
                                  std::span<const ChewAnnotation> chews,
                                  const features::FeatureConfig& config);

/// Window features of one bout of a preprocessed recording.
Eigen::MatrixXd bout_window_rows(const AudioRecording& preprocessed, const BoutAnnotation& bout,
                                 const features::FeatureConfig& config, bool* short_bout = nullptr);

AttributeModel train_chew_level(const Corpus& corpus, const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config);
AttributeModel train_chew_level(const Corpus& corpus, const CorpusFeatures& cache,
                                const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config);

std::vector<ChewPrediction> predict_chews(const AttributeModel& model, const AudioRecording& recording,
                                          std::span<const ChewAnnotation> chews);

/// Majority vote over the first min(n, size) chews (all when n is empty).
/// An even split goes to the sign of the summed decision values, and a zero
/// sum to negative. Throws kValidation on an empty list.
BoutPrediction vote_bout(std::span<const ChewPrediction> predictions, std::optional<int> n = std::nullopt);

AttributeModel train_bout_level(const Corpus& corpus, const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config);
AttributeModel train_bout_level(const Corpus& corpus, const CorpusFeatures& cache,
                                const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config);

BoutPrediction predict_bout(const AttributeModel& model, const AudioRecording& recording,
                            const BoutAnnotation& bout);
BoutPrediction predict_bout_windows(const AttributeModel& model, const BoutAnnotation& bout,
                                    const Eigen::Ref<const Eigen::MatrixXd>& window_features);

/// `recording_id,bout_id,chew_id,attribute,label,score,provenance`; bout
/// rows leave chew_id empty.
void write_predictions_csv(std::ostream& out, std::span<const ChewPrediction> chews,
                           std::span<const BoutPrediction> bouts);

}  // namespace chewtex::pipeline
