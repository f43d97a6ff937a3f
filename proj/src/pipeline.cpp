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

#include "chewtex/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "chewtex/error.hpp"
#include "chewtex/learn/cross_validation.hpp"
#include "chewtex/random.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace chewtex::pipeline {

using nlohmann::json;

std::string_view to_string(Mode mode) {
  return mode == Mode::kChewLevel ? "chew-level" : "bout-level";
}

features::FeatureConfig PipelineConfig::resolved_features() const {
  features::FeatureConfig out = features;
  if (out.plan.edges_hz.empty()) out.plan = features::BandPlan::standard(front_end.target_rate_hz);
  return out;
}

void PipelineConfig::validate() const {
  require(front_end.target_rate_hz > 0, ErrorKind::kConfig, "target rate must be positive");
  require(front_end.hp_order >= 1, ErrorKind::kConfig, "high-pass order must be >= 1");
  require(front_end.hp_cutoff_hz > 0.0 && front_end.hp_cutoff_hz < front_end.target_rate_hz / 2.0,
          ErrorKind::kConfig, "high-pass cutoff must lie in (0, fs/2)");
  resolved_features().plan.validate(front_end.target_rate_hz);
  require(features.autocorr_order >= 2, ErrorKind::kConfig, "autocorrelation order must be >= 2");
  require(codebook_size >= 1, ErrorKind::kConfig, "codebook size must be >= 1");
  require(jobs >= 1, ErrorKind::kConfig, "jobs must be >= 1");
  hpo.validate();
}

std::string Provenance::str() const {
  switch (kind) {
    case Kind::kVoteAll: return "vote-all";
    case Kind::kVoteFirstN: return "vote-first-n(" + std::to_string(n) + ")";
    case Kind::kBoutBow: return "bout-bow";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Features

namespace {

std::pair<Eigen::Index, Eigen::Index> sample_span(const AudioRecording& rec, double start_s,
                                                  double stop_s, std::string_view what) {
  const double duration = rec.duration_seconds();
  require(start_s >= 0.0 && stop_s > start_s && stop_s <= duration + 1e-9, ErrorKind::kAnnotation,
          std::string(what) + " [" + detail::format_double(start_s) + ", " +
              detail::format_double(stop_s) + "] s lies outside recording '" + rec.id() + "'");
  const auto n = rec.samples.size();
  const Eigen::Index begin = std::min<Eigen::Index>(n, std::llround(start_s * rec.sample_rate));
  const Eigen::Index end = std::min<Eigen::Index>(n, std::llround(stop_s * rec.sample_rate));
  require(end > begin, ErrorKind::kSegmentTooShort,
          std::string(what) + " in '" + rec.id() + "' is shorter than one sample");
  return {begin, end - begin};
}

std::map<std::string, std::size_t, std::less<>> recording_index(const Corpus& corpus) {
  std::map<std::string, std::size_t, std::less<>> out;
  for (std::size_t i = 0; i < corpus.recordings.size(); ++i) out.emplace(corpus.recordings[i].id(), i);
  return out;
}

}  // namespace

Eigen::MatrixXd chew_feature_rows(const AudioRecording& preprocessed,
                                  std::span<const ChewAnnotation> chews,
                                  const features::FeatureConfig& config) {
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(chews.size()), config.dimension());
  for (std::size_t c = 0; c < chews.size(); ++c) {
    const auto [offset, length] = sample_span(preprocessed, chews[c].start_s, chews[c].stop_s,
                                              "chew " + std::to_string(chews[c].chew_id));
    rows.row(static_cast<Eigen::Index>(c)) =
        features::extract_segment_features(preprocessed.samples.segment(offset, length),
                                           preprocessed.sample_rate, config)
            .values.transpose();
  }
  return rows;
}

Eigen::MatrixXd bout_window_rows(const AudioRecording& preprocessed, const BoutAnnotation& bout,
                                 const features::FeatureConfig& config, bool* short_bout) {
  const auto [offset, length] = sample_span(preprocessed, bout.start_s, bout.stop_s,
                                            "bout " + std::to_string(bout.bout_id));
  const features::BoutWindows windows = features::window_bout(length, preprocessed.sample_rate);
  if (short_bout) *short_bout = windows.short_bout;
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(windows.windows.size()), config.dimension());
  for (std::size_t w = 0; w < windows.windows.size(); ++w) {
    const auto& win = windows.windows[w];
    rows.row(static_cast<Eigen::Index>(w)) =
        features::extract_segment_features(
            preprocessed.samples.segment(offset + win.offset, win.length),
            preprocessed.sample_rate, config)
            .values.transpose();
  }
  return rows;
}

CorpusFeatures compute_features(const Corpus& corpus, const PipelineConfig& config,
                                FeatureRequest request) {
  config.validate();
  CorpusFeatures out;
  out.front_end = config.front_end;
  out.features = config.resolved_features();
  out.chews.resize(static_cast<Eigen::Index>(corpus.chews.size()), out.features.dimension());
  out.bout_windows.resize(corpus.bouts.size());
  out.short_bouts.assign(corpus.bouts.size(), false);

  // Group annotation indices by recording so each recording is filtered once.
  const auto index = recording_index(corpus);
  std::vector<std::vector<std::size_t>> chews_by_rec(corpus.recordings.size());
  std::vector<std::vector<std::size_t>> bouts_by_rec(corpus.recordings.size());
  for (std::size_t i = 0; i < corpus.chews.size(); ++i) {
    const auto it = index.find(corpus.chews[i].recording_id);
    require(it != index.end(), ErrorKind::kAnnotation,
            "chew references unknown recording '" + corpus.chews[i].recording_id + "'");
    chews_by_rec[it->second].push_back(i);
  }
  for (std::size_t i = 0; i < corpus.bouts.size(); ++i) {
    const auto it = index.find(corpus.bouts[i].recording_id);
    require(it != index.end(), ErrorKind::kAnnotation,
            "bout references unknown recording '" + corpus.bouts[i].recording_id + "'");
    bouts_by_rec[it->second].push_back(i);
  }

  std::vector<bool> short_flags(corpus.bouts.size(), false);
  detail::parallel_for(corpus.recordings.size(), config.jobs, [&](std::size_t r) {
    if (chews_by_rec[r].empty() && bouts_by_rec[r].empty()) return;
    const AudioRecording pre = dsp::preprocess(corpus.recordings[r], out.front_end);
    if (request.chews) {
      std::vector<ChewAnnotation> chews;
      for (std::size_t i : chews_by_rec[r]) chews.push_back(corpus.chews[i]);
      const Eigen::MatrixXd rows = chew_feature_rows(pre, chews, out.features);
      for (std::size_t c = 0; c < chews.size(); ++c) {
        out.chews.row(static_cast<Eigen::Index>(chews_by_rec[r][c])) = rows.row(static_cast<Eigen::Index>(c));
      }
    }
    if (request.windows) {
      for (std::size_t i : bouts_by_rec[r]) {
        bool is_short = false;
        out.bout_windows[i] = bout_window_rows(pre, corpus.bouts[i], out.features, &is_short);
        short_flags[i] = is_short;
      }
    }
  });
  out.short_bouts = short_flags;
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

constexpr std::uint64_t kHpoStream = 10;
constexpr std::uint64_t kCvStream = 20;
constexpr std::uint64_t kCodebookStream = 30;

std::array<AttributeClassifier, 3> train_classifiers(const Eigen::MatrixXd& z,
                                                     const std::vector<AttributeLabels>& labels,
                                                     const PipelineConfig& config) {
  std::array<AttributeClassifier, 3> out;
  const bool no_variation = z.size() == 0 || z.cwiseAbs().maxCoeff() == 0.0;
  std::shared_ptr<const Eigen::MatrixXd> distances;

  for (std::size_t a = 0; a < kAttributes.size(); ++a) {
    const Attribute attribute = kAttributes[a];
    AttributeClassifier& cls = out[a];
    Eigen::VectorXi y(z.rows());
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
      y[i] = labels[static_cast<std::size_t>(i)][attribute] ? 1 : -1;
    }
    cls.train_positives = (y.array() > 0).count();
    cls.train_negatives = y.size() - cls.train_positives;
    cls.majority = cls.train_positives > cls.train_negatives;
    if (no_variation || cls.train_positives == 0 || cls.train_negatives == 0) {
      cls.degenerate = true;
      continue;
    }
    if (!distances) distances = std::make_shared<const Eigen::MatrixXd>(learn::squared_distances(z, z));

    const learn::CrossValidator cv(distances, y, config.hpo.folds, Rng::mix(config.seed, kCvStream + a));
    learn::HpoConfig hpo = config.hpo;
    hpo.seed = Rng::mix(config.seed ^ config.hpo.seed, kHpoStream + a);
    const learn::HpoResult best =
        learn::bayes_opt([&](double C, double gamma) { return cv.score(C, gamma).score; }, hpo);

    learn::SvmParams params;
    params.C = best.C;
    params.gamma = best.gamma;
    params.weights = learn::ClassWeights::balanced(y);
    const Eigen::MatrixXd kernel = (-best.gamma * distances->array()).exp().matrix();
    cls.svm = learn::svm_train_kernel(kernel, z, y, params).model;
    cls.cv_score = best.score;
  }
  return out;
}

std::vector<std::size_t> sorted_unique(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::vector<bool> recording_mask(const Corpus& corpus, const std::vector<std::size_t>& train) {
  std::vector<bool> mask(corpus.recordings.size(), false);
  for (std::size_t r : sorted_unique(train)) {
    require(r < corpus.recordings.size(), ErrorKind::kConfig, "training recording index out of range");
    mask[r] = true;
  }
  return mask;
}

void check_cache(const CorpusFeatures& cache, const PipelineConfig& config) {
  require(cache.features == config.resolved_features() &&
              cache.front_end.target_rate_hz == config.front_end.target_rate_hz &&
              cache.front_end.hp_order == config.front_end.hp_order &&
              cache.front_end.hp_cutoff_hz == config.front_end.hp_cutoff_hz,
          ErrorKind::kConfig, "feature cache was computed with a different configuration");
}

}  // namespace

AttributeModel train_chew_level(const Corpus& corpus, const CorpusFeatures& cache,
                                const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config) {
  config.validate();
  check_cache(cache, config);
  require(cache.chews.rows() == static_cast<Eigen::Index>(corpus.chews.size()), ErrorKind::kConfig,
          "feature cache lacks chew features");
  const auto mask = recording_mask(corpus, train_recordings);
  const auto index = recording_index(corpus);

  std::vector<Eigen::Index> rows;
  std::vector<AttributeLabels> labels;
  for (std::size_t i = 0; i < corpus.chews.size(); ++i) {
    const std::size_t r = index.find(corpus.chews[i].recording_id)->second;
    if (!mask[r]) continue;
    rows.push_back(static_cast<Eigen::Index>(i));
    labels.push_back(corpus.labels_of(corpus.recordings[r]));
  }
  require(!rows.empty(), ErrorKind::kConfig, "training set contains no chews");

  AttributeModel model;
  model.mode = Mode::kChewLevel;
  model.front_end = config.front_end;
  model.features = cache.features;
  model.seed = config.seed;
  const Eigen::MatrixXd x = cache.chews(rows, Eigen::all);
  model.standardizer = learn::fit_standardizer(x);
  model.classifiers = train_classifiers(learn::apply_standardizer(model.standardizer, x), labels, config);
  return model;
}

AttributeModel train_chew_level(const Corpus& corpus, const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config) {
  return train_chew_level(corpus, compute_features(corpus, config, {.chews = true, .windows = false}),
                          train_recordings, config);
}

AttributeModel train_bout_level(const Corpus& corpus, const CorpusFeatures& cache,
                                const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config) {
  config.validate();
  check_cache(cache, config);
  require(cache.bout_windows.size() == corpus.bouts.size(), ErrorKind::kConfig,
          "feature cache lacks bout windows");
  const auto mask = recording_mask(corpus, train_recordings);
  const auto index = recording_index(corpus);

  std::vector<std::size_t> bouts;
  std::vector<AttributeLabels> labels;
  Eigen::Index total = 0;
  for (std::size_t i = 0; i < corpus.bouts.size(); ++i) {
    const std::size_t r = index.find(corpus.bouts[i].recording_id)->second;
    if (!mask[r]) continue;
    require(cache.bout_windows[i].rows() > 0, ErrorKind::kConfig, "feature cache lacks bout windows");
    bouts.push_back(i);
    labels.push_back(corpus.labels_of(corpus.recordings[r]));
    total += cache.bout_windows[i].rows();
  }
  require(!bouts.empty(), ErrorKind::kConfig, "training set contains no bouts");
  require(total >= config.codebook_size, ErrorKind::kConfig,
          "training set has " + std::to_string(total) + " window vectors, fewer than k = " +
              std::to_string(config.codebook_size) + "; use a smaller codebook size");

  Eigen::MatrixXd windows(total, cache.features.dimension());
  Eigen::Index at = 0;
  for (std::size_t i : bouts) {
    windows.middleRows(at, cache.bout_windows[i].rows()) = cache.bout_windows[i];
    at += cache.bout_windows[i].rows();
  }

  AttributeModel model;
  model.mode = Mode::kBoutLevel;
  model.front_end = config.front_end;
  model.features = cache.features;
  model.seed = config.seed;
  model.window_standardizer = learn::fit_standardizer(windows);
  model.codebook = learn::kmeans_fit(learn::apply_standardizer(*model.window_standardizer, windows),
                                     config.codebook_size, Rng::mix(config.seed, kCodebookStream))
                       .codebook;

  Eigen::MatrixXd histograms(static_cast<Eigen::Index>(bouts.size()), config.codebook_size);
  for (std::size_t b = 0; b < bouts.size(); ++b) {
    histograms.row(static_cast<Eigen::Index>(b)) =
        learn::bow_encode(*model.codebook,
                          learn::apply_standardizer(*model.window_standardizer, cache.bout_windows[bouts[b]]))
            .transpose();
  }
  model.standardizer = learn::fit_standardizer(histograms);
  model.classifiers =
      train_classifiers(learn::apply_standardizer(model.standardizer, histograms), labels, config);
  return model;
}

AttributeModel train_bout_level(const Corpus& corpus, const std::vector<std::size_t>& train_recordings,
                                const PipelineConfig& config) {
  return train_bout_level(corpus, compute_features(corpus, config, {.chews = false, .windows = true}),
                          train_recordings, config);
}

// ---------------------------------------------------------------------------
// Prediction

Eigen::MatrixXd AttributeModel::decide(const Eigen::Ref<const Eigen::MatrixXd>& rows) const {
  const Eigen::MatrixXd z = learn::apply_standardizer(standardizer, rows);
  Eigen::MatrixXd out(rows.rows(), 3);
  for (std::size_t a = 0; a < classifiers.size(); ++a) {
    const auto& cls = classifiers[a];
    const auto col = static_cast<Eigen::Index>(a);
    if (cls.degenerate) {
      out.col(col).setConstant(cls.majority ? 1.0 : -1.0);
    } else {
      out.col(col) = learn::svm_predict(cls.svm, z).decision_values;
    }
  }
  return out;
}

std::vector<ChewPrediction> predict_chews(const AttributeModel& model, const AudioRecording& recording,
                                          std::span<const ChewAnnotation> chews) {
  require(model.mode == Mode::kChewLevel, ErrorKind::kConfig, "predict_chews needs a chew-level model");
  const AudioRecording pre = dsp::preprocess(recording, model.front_end);
  const Eigen::MatrixXd decisions = model.decide(chew_feature_rows(pre, chews, model.features));
  std::vector<ChewPrediction> out;
  for (std::size_t c = 0; c < chews.size(); ++c) {
    ChewPrediction p;
    p.recording_id = chews[c].recording_id;
    p.bout_id = chews[c].bout_id;
    p.chew_id = chews[c].chew_id;
    p.start_s = chews[c].start_s;
    for (std::size_t a = 0; a < 3; ++a) {
      p.decisions[a] = decisions(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(a));
      p.labels[a] = p.decisions[a] > 0.0;
    }
    out.push_back(std::move(p));
  }
  return out;
}

BoutPrediction vote_bout(std::span<const ChewPrediction> predictions, std::optional<int> n) {
  require(!predictions.empty(), ErrorKind::kValidation, "cannot vote on an empty bout");
  require(!n || *n >= 1, ErrorKind::kConfig, "vote prefix length must be >= 1");
  const std::size_t used =
      n ? std::min(predictions.size(), static_cast<std::size_t>(*n)) : predictions.size();
  BoutPrediction out;
  out.recording_id = predictions.front().recording_id;
  out.bout_id = predictions.front().bout_id;
  out.provenance = n ? Provenance{Provenance::Kind::kVoteFirstN, *n} : Provenance{};
  for (std::size_t a = 0; a < 3; ++a) {
    std::size_t positive = 0;
    double sum = 0.0;
    for (std::size_t c = 0; c < used; ++c) {
      positive += predictions[c].labels[a] ? 1 : 0;
      sum += predictions[c].decisions[a];
    }
    const std::size_t negative = used - positive;
    out.labels[a] = positive != negative ? positive > negative : sum > 0.0;
    out.scores[a] = static_cast<double>(positive) / static_cast<double>(used);
  }
  return out;
}

BoutPrediction predict_bout_windows(const AttributeModel& model, const BoutAnnotation& bout,
                                    const Eigen::Ref<const Eigen::MatrixXd>& window_features) {
  require(model.mode == Mode::kBoutLevel && model.codebook && model.window_standardizer,
          ErrorKind::kConfig, "bout prediction needs a bout-level model");
  const Eigen::VectorXd hist = learn::bow_encode(
      *model.codebook, learn::apply_standardizer(*model.window_standardizer, window_features));
  const Eigen::MatrixXd decisions = model.decide(hist.transpose());
  BoutPrediction out;
  out.recording_id = bout.recording_id;
  out.bout_id = bout.bout_id;
  out.provenance = Provenance{Provenance::Kind::kBoutBow, 0};
  for (std::size_t a = 0; a < 3; ++a) {
    out.scores[a] = decisions(0, static_cast<Eigen::Index>(a));
    out.labels[a] = out.scores[a] > 0.0;
  }
  return out;
}

BoutPrediction predict_bout(const AttributeModel& model, const AudioRecording& recording,
                            const BoutAnnotation& bout) {
  require(model.mode == Mode::kBoutLevel, ErrorKind::kConfig, "predict_bout needs a bout-level model");
  const AudioRecording pre = dsp::preprocess(recording, model.front_end);
  return predict_bout_windows(model, bout, bout_window_rows(pre, bout, model.features));
}

void write_predictions_csv(std::ostream& out, std::span<const ChewPrediction> chews,
                           std::span<const BoutPrediction> bouts) {
  out << "recording_id,bout_id,chew_id,attribute,label,score,provenance\n";
  for (const auto& p : chews) {
    for (std::size_t a = 0; a < 3; ++a) {
      out << p.recording_id << ',' << p.bout_id << ',' << p.chew_id << ',' << to_string(kAttributes[a])
          << ',' << (p.labels[a] ? 1 : 0) << ',' << detail::format_double(p.decisions[a]) << ",chew\n";
    }
  }
  for (const auto& p : bouts) {
    for (std::size_t a = 0; a < 3; ++a) {
      out << p.recording_id << ',' << p.bout_id << ",," << to_string(kAttributes[a]) << ','
          << (p.labels[a] ? 1 : 0) << ',' << detail::format_double(p.scores[a]) << ','
          << p.provenance.str() << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json to_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  require(j.is_array(), ErrorKind::kSchema, "model JSON: expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from(const json& j, Eigen::Index cols) {
  require(j.is_array(), ErrorKind::kSchema, "model JSON: expected a matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    require(j[r].is_array() && static_cast<Eigen::Index>(j[r].size()) == cols, ErrorKind::kShape,
            "model JSON: ragged matrix row");
    for (Eigen::Index c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), c) = j[r][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json standardizer_json(const learn::Standardizer& s) {
  return {{"means", vector_json(s.means.transpose())}, {"stds", vector_json(s.stds.transpose())}};
}

learn::Standardizer standardizer_from(const json& j) {
  learn::Standardizer s;
  s.means = vector_from(j.at("means")).transpose();
  s.stds = vector_from(j.at("stds")).transpose();
  require(s.means.size() == s.stds.size(), ErrorKind::kShape, "model JSON: standardizer size mismatch");
  return s;
}

json classifier_json(const AttributeClassifier& c) {
  json j;
  j["degenerate"] = c.degenerate;
  j["majority"] = c.majority;
  j["cv_score"] = c.cv_score;
  j["train_positives"] = c.train_positives;
  j["train_negatives"] = c.train_negatives;
  if (!c.degenerate) {
    j["C"] = c.svm.C;
    j["gamma"] = c.svm.gamma;
    j["bias"] = c.svm.bias;
    j["class_weights"] = {{"negative", c.svm.weights.negative}, {"positive", c.svm.weights.positive}};
    j["dual_coeffs"] = vector_json(c.svm.dual_coeffs);
    j["support_vectors"] = to_json(c.svm.support_vectors);
  }
  return j;
}

AttributeClassifier classifier_from(const json& j, Eigen::Index dimension) {
  AttributeClassifier c;
  c.degenerate = j.at("degenerate").get<bool>();
  c.majority = j.at("majority").get<bool>();
  c.cv_score = j.at("cv_score").get<double>();
  c.train_positives = j.at("train_positives").get<std::int64_t>();
  c.train_negatives = j.at("train_negatives").get<std::int64_t>();
  if (!c.degenerate) {
    c.svm.C = j.at("C").get<double>();
    c.svm.gamma = j.at("gamma").get<double>();
    c.svm.bias = j.at("bias").get<double>();
    c.svm.weights.negative = j.at("class_weights").at("negative").get<double>();
    c.svm.weights.positive = j.at("class_weights").at("positive").get<double>();
    c.svm.dual_coeffs = vector_from(j.at("dual_coeffs"));
    c.svm.support_vectors = matrix_from(j.at("support_vectors"), dimension);
    require(c.svm.support_vectors.rows() == c.svm.dual_coeffs.size(), ErrorKind::kShape,
            "model JSON: support vector count mismatch");
  } else {
    c.svm.support_vectors.resize(0, dimension);
  }
  return c;
}

}  // namespace

std::string model_to_json(const AttributeModel& model) {
  json j;
  j["schema"] = kModelSchema;
  j["mode"] = to_string(model.mode);
  j["seed"] = model.seed;
  j["front_end"] = {{"target_rate_hz", model.front_end.target_rate_hz},
                    {"hp_order", model.front_end.hp_order},
                    {"hp_cutoff_hz", model.front_end.hp_cutoff_hz}};
  j["features"] = {{"band_edges_hz", model.features.plan.edges_hz},
                   {"autocorr_order", model.features.autocorr_order}};
  j["standardizer"] = standardizer_json(model.standardizer);
  if (model.window_standardizer) j["window_standardizer"] = standardizer_json(*model.window_standardizer);
  if (model.codebook) {
    j["codebook"] = {{"centroids", to_json(model.codebook->centroids)},
                     {"inertia", model.codebook->inertia}};
  }
  json classifiers = json::object();
  for (std::size_t a = 0; a < kAttributes.size(); ++a) {
    classifiers[std::string(to_string(kAttributes[a]))] = classifier_json(model.classifiers[a]);
  }
  j["classifiers"] = std::move(classifiers);
  return j.dump(1) + "\n";
}

AttributeModel model_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("model JSON does not parse: ") + e.what());
  }
  require(j.is_object() && j.contains("schema") && j["schema"].is_string(), ErrorKind::kSchema,
          "model JSON lacks a schema tag");
  const auto schema = j["schema"].get<std::string>();
  require(schema == kModelSchema, ErrorKind::kSchema,
          "incompatible model schema '" + schema + "', expected '" + std::string(kModelSchema) + "'");
  try {
    AttributeModel m;
    const auto mode = j.at("mode").get<std::string>();
    require(mode == "chew-level" || mode == "bout-level", ErrorKind::kSchema,
            "model JSON: unknown mode '" + mode + "'");
    m.mode = mode == "chew-level" ? Mode::kChewLevel : Mode::kBoutLevel;
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& fe = j.at("front_end");
    m.front_end.target_rate_hz = fe.at("target_rate_hz").get<int>();
    m.front_end.hp_order = fe.at("hp_order").get<int>();
    m.front_end.hp_cutoff_hz = fe.at("hp_cutoff_hz").get<double>();
    m.features.plan.edges_hz = j.at("features").at("band_edges_hz").get<std::vector<double>>();
    m.features.autocorr_order = j.at("features").at("autocorr_order").get<int>();
    m.features.plan.validate(m.front_end.target_rate_hz);
    m.standardizer = standardizer_from(j.at("standardizer"));
    if (m.mode == Mode::kBoutLevel) {
      m.window_standardizer = standardizer_from(j.at("window_standardizer"));
      const auto& cb = j.at("codebook");
      learn::Codebook codebook;
      codebook.centroids = matrix_from(cb.at("centroids"), m.features.dimension());
      codebook.inertia = cb.at("inertia").get<double>();
      require(codebook.k() == m.standardizer.dimension(), ErrorKind::kShape,
              "model JSON: codebook size does not match the histogram standardizer");
      m.codebook = std::move(codebook);
    } else {
      require(m.standardizer.dimension() == m.features.dimension(), ErrorKind::kShape,
              "model JSON: standardizer does not match the feature dimension");
    }
    for (std::size_t a = 0; a < kAttributes.size(); ++a) {
      m.classifiers[a] = classifier_from(j.at("classifiers").at(std::string(to_string(kAttributes[a]))),
                                         m.standardizer.dimension());
    }
    return m;
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed model JSON: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const AttributeModel& model) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write model '" + path.string() + "'");
  out << model_to_json(model);
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing model '" + path.string() + "'");
}

AttributeModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot read model '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return model_from_json(buffer.str());
}

}  // namespace chewtex::pipeline
