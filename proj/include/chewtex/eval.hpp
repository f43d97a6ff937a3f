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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chewtex/corpus.hpp"
#include "chewtex/metrics.hpp"
#include "chewtex/pipeline.hpp"

namespace chewtex::eval {

enum class Protocol { kLoso, kLofto };
enum class Level { kChew, kVoteAll, kVoteFirstN, kBoutBow };

std::string_view to_string(Protocol protocol);
std::string level_name(Level level, int n = 0);
Protocol protocol_from_string(std::string_view name);

/// One fold: recordings (indices into corpus.recordings) to train on and
/// to test on, keyed by the left-out subject or food type.
struct Split {
  std::string key;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// One fold per subject. Throws kProtocol with fewer than two subjects.
std::vector<Split> loso_splits(const Corpus& corpus);
/// One fold per food type. Throws kProtocol with fewer than two food types.
std::vector<Split> lofto_splits(const Corpus& corpus);
std::vector<Split> make_splits(const Corpus& corpus, Protocol protocol);

struct AttributeFold {
  ConfusionCounts counts;
  bool degenerate = false;  // the fold's model predicted a constant class

  std::optional<double> prior() const { return positive_prior(counts); }
  std::optional<double> w() const { return prior_ratio(counts); }
  std::optional<double> weighted_accuracy() const { return chewtex::weighted_accuracy(counts); }
};

struct FoldResult {
  std::string key;
  bool completed = true;
  std::string error;
  std::array<AttributeFold, 3> attributes;
};

struct Aggregate {
  std::optional<double> prior;
  std::optional<double> weighted_accuracy;
  std::optional<double> w;
  int defined_folds = 0;  // folds contributing a weighted accuracy
};

/// (avg): mean of per-fold values over folds where each is defined.
/// (sum): the same quantities on element-wise summed confusion counts.
struct AttributeRow {
  Aggregate avg;
  Aggregate sum;
  ConfusionCounts pooled;
};

struct EvaluationReport {
  Protocol protocol = Protocol::kLoso;
  Level level = Level::kChew;
  int n = 0;  // vote-first-n only
  std::vector<FoldResult> folds;
  pipeline::PipelineConfig config;

  std::array<AttributeRow, 3> rows() const;
  bool partial() const;
};

inline constexpr std::string_view kReportSchema = "chewtex.evaluation-report/1";

/// Canonical JSON with per-fold confusions and both aggregations.
std::string report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(std::string_view text);

/// Text table in the Prior / Weighted accuracy / w layout, one block per
/// report. LOFTO blocks list only the (sum) rows since per-fold test sets
/// hold a single food and so a single class.
void write_report_table(std::ostream& out, const std::vector<EvaluationReport>& reports);

/// Per-fold outputs of chew-level training, shared by every chew and
/// voting level and by the first-n sweep.
struct ChewFold {
  Split split;
  std::optional<std::string> error;
  std::vector<pipeline::ChewPrediction> predictions;  // test chews in corpus order
  std::array<bool, 3> degenerate{};
  std::string model_json;
};

struct BoutFold {
  Split split;
  std::optional<std::string> error;
  std::vector<pipeline::BoutPrediction> predictions;
  std::array<bool, 3> degenerate{};
  std::string model_json;
};

std::vector<ChewFold> run_chew_folds(const Corpus& corpus, const pipeline::CorpusFeatures& cache,
                                     Protocol protocol, const pipeline::PipelineConfig& config);
std::vector<BoutFold> run_bout_folds(const Corpus& corpus, const pipeline::CorpusFeatures& cache,
                                     Protocol protocol, const pipeline::PipelineConfig& config);

/// Reports for chew, vote-all or vote-first-n(n) from shared fold outputs.
EvaluationReport chew_report(const Corpus& corpus, const std::vector<ChewFold>& folds, Protocol protocol,
                             Level level, int n, const pipeline::PipelineConfig& config);
EvaluationReport bout_report(const Corpus& corpus, const std::vector<BoutFold>& folds, Protocol protocol,
                             const pipeline::PipelineConfig& config);

/// Trains and tests every fold of `protocol` at `level`.
EvaluationReport run_protocol(const Corpus& corpus, Protocol protocol, Level level,
                              const pipeline::PipelineConfig& config, int n = 0);

struct SweepResult {
  Protocol protocol = Protocol::kLoso;
  std::vector<EvaluationReport> by_n;  // by_n[i] votes on the first i + 1 chews

  /// (sum) weighted accuracy per n for one attribute.
  std::vector<std::optional<double>> curve(Attribute attribute) const;
};

/// Votes on the first n = 1..n_max chews with models trained once per fold.
SweepResult first_n_sweep(const Corpus& corpus, const std::vector<ChewFold>& folds, Protocol protocol,
                          const pipeline::PipelineConfig& config, int n_max = 20);
SweepResult first_n_sweep(const Corpus& corpus, Protocol protocol,
                          const pipeline::PipelineConfig& config, int n_max = 20);

inline constexpr std::string_view kSweepSchema = "chewtex.sweep/1";
std::string sweep_to_json(const SweepResult& sweep);
SweepResult sweep_from_json(std::string_view text);

/// `attribute,n,weighted_accuracy` with empty cells where undefined.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);

}  // namespace chewtex::eval
