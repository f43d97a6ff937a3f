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

#include "chewtex/eval.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "chewtex/error.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace chewtex::eval {

using nlohmann::json;

std::string_view to_string(Protocol protocol) { return protocol == Protocol::kLoso ? "LOSO" : "LOFTO"; }

Protocol protocol_from_string(std::string_view name) {
  if (name == "loso" || name == "LOSO") return Protocol::kLoso;
  if (name == "lofto" || name == "LOFTO") return Protocol::kLofto;
  fail(ErrorKind::kConfig, "unknown protocol '" + std::string(name) + "' (expected loso or lofto)");
}

std::string level_name(Level level, int n) {
  switch (level) {
    case Level::kChew: return "chew";
    case Level::kVoteAll: return "vote-all";
    case Level::kVoteFirstN: return "vote-first-n(" + std::to_string(n) + ")";
    case Level::kBoutBow: return "bout-bow";
  }
  return {};
}

namespace {

Level level_from_name(const std::string& name, int& n) {
  if (name == "chew") return Level::kChew;
  if (name == "vote-all") return Level::kVoteAll;
  if (name == "bout-bow") return Level::kBoutBow;
  if (name.starts_with("vote-first-n(") && name.ends_with(")")) {
    n = detail::parse_int(name.substr(13, name.size() - 14), "vote prefix");
    return Level::kVoteFirstN;
  }
  fail(ErrorKind::kSchema, "unknown evaluation level '" + name + "'");
}

std::vector<Split> splits_by(const Corpus& corpus, const std::vector<std::string>& keys,
                             std::string_view what, std::string AudioRecording::*field) {
  require(keys.size() >= 2, ErrorKind::kProtocol,
          "protocol needs at least 2 " + std::string(what) + ", got " + std::to_string(keys.size()));
  std::vector<Split> out;
  for (const auto& key : keys) {
    Split s;
    s.key = key;
    for (std::size_t r = 0; r < corpus.recordings.size(); ++r) {
      (corpus.recordings[r].*field == key ? s.test : s.train).push_back(r);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<Split> loso_splits(const Corpus& corpus) {
  return splits_by(corpus, corpus.subjects(), "subjects", &AudioRecording::subject_id);
}

std::vector<Split> lofto_splits(const Corpus& corpus) {
  return splits_by(corpus, corpus.food_types(), "food types", &AudioRecording::food_type);
}

std::vector<Split> make_splits(const Corpus& corpus, Protocol protocol) {
  return protocol == Protocol::kLoso ? loso_splits(corpus) : lofto_splits(corpus);
}

// ---------------------------------------------------------------------------
// Aggregation

std::array<AttributeRow, 3> EvaluationReport::rows() const {
  std::array<AttributeRow, 3> out;
  for (std::size_t a = 0; a < 3; ++a) {
    AttributeRow& row = out[a];
    double prior = 0.0, wacc = 0.0, w = 0.0;
    int n_prior = 0, n_wacc = 0, n_w = 0;
    for (const auto& fold : folds) {
      if (!fold.completed) continue;
      const AttributeFold& f = fold.attributes[a];
      row.pooled += f.counts;
      if (const auto v = f.prior()) prior += *v, ++n_prior;
      if (const auto v = f.weighted_accuracy()) wacc += *v, ++n_wacc;
      if (const auto v = f.w()) w += *v, ++n_w;
    }
    if (n_prior > 0) row.avg.prior = prior / n_prior;
    if (n_wacc > 0) row.avg.weighted_accuracy = wacc / n_wacc;
    if (n_w > 0) row.avg.w = w / n_w;
    row.avg.defined_folds = n_wacc;
    row.sum.prior = positive_prior(row.pooled);
    row.sum.weighted_accuracy = weighted_accuracy(row.pooled);
    row.sum.w = prior_ratio(row.pooled);
    row.sum.defined_folds = n_wacc;
  }
  return out;
}

bool EvaluationReport::partial() const {
  for (const auto& f : folds) {
    if (!f.completed) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json config_json(const pipeline::PipelineConfig& c) {
  const auto features = c.resolved_features();
  return {
      {"seed", c.seed},
      {"codebook_size", c.codebook_size},
      {"front_end",
       {{"target_rate_hz", c.front_end.target_rate_hz},
        {"hp_order", c.front_end.hp_order},
        {"hp_cutoff_hz", c.front_end.hp_cutoff_hz}}},
      {"features", {{"band_edges_hz", features.plan.edges_hz}, {"autocorr_order", features.autocorr_order}}},
      {"hpo",
       {{"log2_C", {c.hpo.log2_C.lo, c.hpo.log2_C.hi}},
        {"log2_gamma", {c.hpo.log2_gamma.lo, c.hpo.log2_gamma.hi}},
        {"budget", c.hpo.budget},
        {"initial_design", c.hpo.initial_design},
        {"posterior_std_threshold", c.hpo.posterior_std_threshold},
        {"folds", c.hpo.folds},
        {"seed", c.hpo.seed},
        {"grid_resolution", c.hpo.grid_resolution}}},
  };
}

pipeline::PipelineConfig config_from(const json& j) {
  pipeline::PipelineConfig c;
  c.seed = j.at("seed").get<std::uint64_t>();
  c.codebook_size = j.at("codebook_size").get<int>();
  const auto& fe = j.at("front_end");
  c.front_end.target_rate_hz = fe.at("target_rate_hz").get<int>();
  c.front_end.hp_order = fe.at("hp_order").get<int>();
  c.front_end.hp_cutoff_hz = fe.at("hp_cutoff_hz").get<double>();
  c.features.plan.edges_hz = j.at("features").at("band_edges_hz").get<std::vector<double>>();
  c.features.autocorr_order = j.at("features").at("autocorr_order").get<int>();
  const auto& h = j.at("hpo");
  c.hpo.log2_C = {h.at("log2_C").at(0).get<double>(), h.at("log2_C").at(1).get<double>()};
  c.hpo.log2_gamma = {h.at("log2_gamma").at(0).get<double>(), h.at("log2_gamma").at(1).get<double>()};
  c.hpo.budget = h.at("budget").get<int>();
  c.hpo.initial_design = h.at("initial_design").get<int>();
  c.hpo.posterior_std_threshold = h.at("posterior_std_threshold").get<double>();
  c.hpo.folds = h.at("folds").get<int>();
  c.hpo.seed = h.at("seed").get<std::uint64_t>();
  c.hpo.grid_resolution = h.at("grid_resolution").get<int>();
  return c;
}

json aggregate_json(const Aggregate& a) {
  return {{"prior", optional_json(a.prior)},
          {"weighted_accuracy", optional_json(a.weighted_accuracy)},
          {"w", optional_json(a.w)},
          {"defined_folds", a.defined_folds}};
}

json report_json(const EvaluationReport& r) {
  json j;
  j["schema"] = kReportSchema;
  j["protocol"] = to_string(r.protocol);
  j["level"] = level_name(r.level, r.n);
  j["partial"] = r.partial();
  j["config"] = config_json(r.config);
  json folds = json::array();
  for (const auto& f : r.folds) {
    json fj;
    fj["key"] = f.key;
    fj["completed"] = f.completed;
    if (!f.completed) fj["error"] = f.error;
    json attrs = json::object();
    for (std::size_t a = 0; a < 3; ++a) {
      const AttributeFold& af = f.attributes[a];
      attrs[std::string(chewtex::to_string(kAttributes[a]))] = {
          {"tp", af.counts.tp}, {"fp", af.counts.fp}, {"tn", af.counts.tn}, {"fn", af.counts.fn},
          {"degenerate", af.degenerate},
          {"prior", optional_json(af.prior())},
          {"w", optional_json(af.w())},
          {"weighted_accuracy", optional_json(af.weighted_accuracy())}};
    }
    fj["attributes"] = std::move(attrs);
    folds.push_back(std::move(fj));
  }
  j["folds"] = std::move(folds);
  json rows = json::object();
  const auto computed = r.rows();
  for (std::size_t a = 0; a < 3; ++a) {
    rows[std::string(chewtex::to_string(kAttributes[a]))] = {{"avg", aggregate_json(computed[a].avg)},
                                                            {"sum", aggregate_json(computed[a].sum)}};
  }
  j["rows"] = std::move(rows);
  return j;
}

EvaluationReport report_from(const json& j) {
  require(j.is_object() && j.value("schema", "") == kReportSchema, ErrorKind::kSchema,
          "not an evaluation report (expected schema '" + std::string(kReportSchema) + "')");
  try {
    EvaluationReport r;
    r.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    r.level = level_from_name(j.at("level").get<std::string>(), r.n);
    r.config = config_from(j.at("config"));
    for (const auto& fj : j.at("folds")) {
      FoldResult f;
      f.key = fj.at("key").get<std::string>();
      f.completed = fj.at("completed").get<bool>();
      if (!f.completed) f.error = fj.value("error", "");
      for (std::size_t a = 0; a < 3; ++a) {
        const auto& aj = fj.at("attributes").at(std::string(chewtex::to_string(kAttributes[a])));
        auto& af = f.attributes[a];
        af.counts.tp = aj.at("tp").get<std::int64_t>();
        af.counts.fp = aj.at("fp").get<std::int64_t>();
        af.counts.tn = aj.at("tn").get<std::int64_t>();
        af.counts.fn = aj.at("fn").get<std::int64_t>();
        af.degenerate = aj.at("degenerate").get<bool>();
      }
      r.folds.push_back(std::move(f));
    }
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed evaluation report: ") + e.what());
  }
}

json parse_json(std::string_view text, std::string_view what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string(what) + " does not parse: " + e.what());
  }
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) { return report_json(report).dump(1) + "\n"; }

EvaluationReport report_from_json(std::string_view text) {
  return report_from(parse_json(text, "evaluation report"));
}

std::string sweep_to_json(const SweepResult& sweep) {
  json j;
  j["schema"] = kSweepSchema;
  j["protocol"] = to_string(sweep.protocol);
  json reports = json::array();
  for (const auto& r : sweep.by_n) reports.push_back(report_json(r));
  j["by_n"] = std::move(reports);
  return j.dump(1) + "\n";
}

SweepResult sweep_from_json(std::string_view text) {
  const json j = parse_json(text, "sweep");
  require(j.is_object() && j.value("schema", "") == kSweepSchema, ErrorKind::kSchema,
          "not a sweep file (expected schema '" + std::string(kSweepSchema) + "')");
  SweepResult s;
  try {
    s.protocol = protocol_from_string(j.at("protocol").get<std::string>());
    for (const auto& r : j.at("by_n")) s.by_n.push_back(report_from(r));
  } catch (const json::exception& e) {
    fail(ErrorKind::kSchema, std::string("malformed sweep: ") + e.what());
  }
  return s;
}

// ---------------------------------------------------------------------------
// Text output

namespace {

std::string cell(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

void table_row(std::ostream& out, const std::string& label, const Aggregate& a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-16s %8s  %17s  %8s\n", label.c_str(), cell(a.prior).c_str(),
                cell(a.weighted_accuracy).c_str(), cell(a.w).c_str());
  out << buf;
}

std::string section_title(const EvaluationReport& r) {
  switch (r.level) {
    case Level::kChew: return "Chew level";
    case Level::kVoteAll: return "Majority voting per bout";
    case Level::kVoteFirstN: return "Majority voting over the first " + std::to_string(r.n) + " chews";
    case Level::kBoutBow: return "Bout level";
  }
  return {};
}

}  // namespace

void write_report_table(std::ostream& out, const std::vector<EvaluationReport>& reports) {
  char header[128];
  std::snprintf(header, sizeof header, "%-16s %8s  %17s  %8s\n", "", "Prior", "Weighted accuracy", "w");
  out << header;
  for (const auto& r : reports) {
    out << std::string(54, '-') << '\n';
    out << to_string(r.protocol) << ": " << section_title(r);
    if (r.partial()) out << " (partial: some folds failed)";
    out << '\n';
    const auto rows = r.rows();
    for (std::size_t a = 0; a < 3; ++a) {
      const std::string name(chewtex::to_string(kAttributes[a]));
      if (r.protocol == Protocol::kLoso) table_row(out, name + " (avg)", rows[a].avg);
      table_row(out, name + " (sum)", rows[a].sum);
    }
    for (const auto& f : r.folds) {
      if (!f.completed) out << "  fold " << f.key << " failed: " << f.error << '\n';
      for (std::size_t a = 0; a < 3; ++a) {
        if (f.completed && f.attributes[a].degenerate) {
          out << "  fold " << f.key << ": " << chewtex::to_string(kAttributes[a])
              << " model degenerate (majority class)\n";
        }
      }
    }
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  out << "attribute,n,weighted_accuracy\n";
  for (const Attribute attribute : kAttributes) {
    const auto curve = sweep.curve(attribute);
    for (std::size_t i = 0; i < curve.size(); ++i) {
      out << chewtex::to_string(attribute) << ',' << i + 1 << ','
          << (curve[i] ? detail::format_double(*curve[i]) : "") << '\n';
    }
  }
}

std::vector<std::optional<double>> SweepResult::curve(Attribute attribute) const {
  const auto a = static_cast<std::size_t>(attribute);
  std::vector<std::optional<double>> out;
  for (const auto& r : by_n) out.push_back(r.rows()[a].sum.weighted_accuracy);
  return out;
}

// ---------------------------------------------------------------------------
// Protocol runs

namespace {

std::map<std::string, AttributeLabels, std::less<>> truth_by_recording(const Corpus& corpus) {
  std::map<std::string, AttributeLabels, std::less<>> out;
  for (const auto& rec : corpus.recordings) out.emplace(rec.id(), corpus.labels_of(rec));
  return out;
}

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    return std::string(chewtex::to_string(err->kind())) + ": " + err->what();
  }
  return e.what();
}

}  // namespace

std::vector<ChewFold> run_chew_folds(const Corpus& corpus, const pipeline::CorpusFeatures& cache,
                                     Protocol protocol, const pipeline::PipelineConfig& config) {
  const auto splits = make_splits(corpus, protocol);
  std::vector<ChewFold> out(splits.size());
  detail::parallel_for(splits.size(), config.jobs, [&](std::size_t f) {
    ChewFold& fold = out[f];
    fold.split = splits[f];
    try {
      const auto model = pipeline::train_chew_level(corpus, cache, fold.split.train, config);
      std::set<std::string, std::less<>> test_ids;
      for (std::size_t r : fold.split.test) test_ids.insert(corpus.recordings[r].id());
      std::vector<Eigen::Index> rows;
      for (std::size_t i = 0; i < corpus.chews.size(); ++i) {
        if (test_ids.contains(corpus.chews[i].recording_id)) rows.push_back(static_cast<Eigen::Index>(i));
      }
      const Eigen::MatrixXd decisions = model.decide(cache.chews(rows, Eigen::all));
      for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& chew = corpus.chews[static_cast<std::size_t>(rows[k])];
        pipeline::ChewPrediction p;
        p.recording_id = chew.recording_id;
        p.bout_id = chew.bout_id;
        p.chew_id = chew.chew_id;
        p.start_s = chew.start_s;
        for (std::size_t a = 0; a < 3; ++a) {
          p.decisions[a] = decisions(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a));
          p.labels[a] = p.decisions[a] > 0.0;
        }
        fold.predictions.push_back(std::move(p));
      }
      for (std::size_t a = 0; a < 3; ++a) fold.degenerate[a] = model.classifiers[a].degenerate;
      fold.model_json = pipeline::model_to_json(model);
    } catch (const std::exception& e) {
      fold.error = describe(e);
      fold.predictions.clear();
    }
  });
  return out;
}

std::vector<BoutFold> run_bout_folds(const Corpus& corpus, const pipeline::CorpusFeatures& cache,
                                     Protocol protocol, const pipeline::PipelineConfig& config) {
  const auto splits = make_splits(corpus, protocol);
  std::vector<BoutFold> out(splits.size());
  detail::parallel_for(splits.size(), config.jobs, [&](std::size_t f) {
    BoutFold& fold = out[f];
    fold.split = splits[f];
    try {
      const auto model = pipeline::train_bout_level(corpus, cache, fold.split.train, config);
      std::set<std::string, std::less<>> test_ids;
      for (std::size_t r : fold.split.test) test_ids.insert(corpus.recordings[r].id());
      for (std::size_t b = 0; b < corpus.bouts.size(); ++b) {
        if (!test_ids.contains(corpus.bouts[b].recording_id)) continue;
        fold.predictions.push_back(
            pipeline::predict_bout_windows(model, corpus.bouts[b], cache.bout_windows[b]));
      }
      for (std::size_t a = 0; a < 3; ++a) fold.degenerate[a] = model.classifiers[a].degenerate;
      fold.model_json = pipeline::model_to_json(model);
    } catch (const std::exception& e) {
      fold.error = describe(e);
      fold.predictions.clear();
    }
  });
  return out;
}

EvaluationReport chew_report(const Corpus& corpus, const std::vector<ChewFold>& folds, Protocol protocol,
                             Level level, int n, const pipeline::PipelineConfig& config) {
  require(level == Level::kChew || level == Level::kVoteAll || level == Level::kVoteFirstN,
          ErrorKind::kConfig, "chew folds support chew and voting levels only");
  require(level != Level::kVoteFirstN || n >= 1, ErrorKind::kConfig, "first-n voting needs n >= 1");
  const auto truth = truth_by_recording(corpus);
  EvaluationReport report;
  report.protocol = protocol;
  report.level = level;
  report.n = level == Level::kVoteFirstN ? n : 0;
  report.config = config;
  for (const auto& fold : folds) {
    FoldResult fr;
    fr.key = fold.split.key;
    if (fold.error) {
      fr.completed = false;
      fr.error = *fold.error;
      report.folds.push_back(std::move(fr));
      continue;
    }
    for (std::size_t a = 0; a < 3; ++a) fr.attributes[a].degenerate = fold.degenerate[a];
    const auto& preds = fold.predictions;
    if (level == Level::kChew) {
      for (const auto& p : preds) {
        const AttributeLabels& t = truth.find(p.recording_id)->second;
        for (std::size_t a = 0; a < 3; ++a) fr.attributes[a].counts.add(t[kAttributes[a]], p.labels[a]);
      }
    } else {
      // Predictions are in corpus order: contiguous per bout, by start time.
      const std::optional<int> limit = level == Level::kVoteFirstN ? std::optional<int>(n) : std::nullopt;
      for (std::size_t begin = 0; begin < preds.size();) {
        std::size_t end = begin;
        while (end < preds.size() && preds[end].recording_id == preds[begin].recording_id &&
               preds[end].bout_id == preds[begin].bout_id) {
          ++end;
        }
        const auto vote = pipeline::vote_bout(std::span(preds).subspan(begin, end - begin), limit);
        const AttributeLabels& t = truth.find(vote.recording_id)->second;
        for (std::size_t a = 0; a < 3; ++a) fr.attributes[a].counts.add(t[kAttributes[a]], vote.labels[a]);
        begin = end;
      }
    }
    report.folds.push_back(std::move(fr));
  }
  return report;
}

EvaluationReport bout_report(const Corpus& corpus, const std::vector<BoutFold>& folds, Protocol protocol,
                             const pipeline::PipelineConfig& config) {
  const auto truth = truth_by_recording(corpus);
  EvaluationReport report;
  report.protocol = protocol;
  report.level = Level::kBoutBow;
  report.config = config;
  for (const auto& fold : folds) {
    FoldResult fr;
    fr.key = fold.split.key;
    if (fold.error) {
      fr.completed = false;
      fr.error = *fold.error;
    } else {
      for (std::size_t a = 0; a < 3; ++a) fr.attributes[a].degenerate = fold.degenerate[a];
      for (const auto& p : fold.predictions) {
        const AttributeLabels& t = truth.find(p.recording_id)->second;
        for (std::size_t a = 0; a < 3; ++a) fr.attributes[a].counts.add(t[kAttributes[a]], p.labels[a]);
      }
    }
    report.folds.push_back(std::move(fr));
  }
  return report;
}

EvaluationReport run_protocol(const Corpus& corpus, Protocol protocol, Level level,
                              const pipeline::PipelineConfig& config, int n) {
  if (level == Level::kBoutBow) {
    const auto cache = pipeline::compute_features(corpus, config, {.chews = false, .windows = true});
    return bout_report(corpus, run_bout_folds(corpus, cache, protocol, config), protocol, config);
  }
  const auto cache = pipeline::compute_features(corpus, config, {.chews = true, .windows = false});
  return chew_report(corpus, run_chew_folds(corpus, cache, protocol, config), protocol, level, n, config);
}

SweepResult first_n_sweep(const Corpus& corpus, const std::vector<ChewFold>& folds, Protocol protocol,
                          const pipeline::PipelineConfig& config, int n_max) {
  require(n_max >= 1, ErrorKind::kConfig, "sweep needs n_max >= 1");
  SweepResult out;
  out.protocol = protocol;
  for (int n = 1; n <= n_max; ++n) {
    out.by_n.push_back(chew_report(corpus, folds, protocol, Level::kVoteFirstN, n, config));
  }
  return out;
}

SweepResult first_n_sweep(const Corpus& corpus, Protocol protocol, const pipeline::PipelineConfig& config,
                          int n_max) {
  const auto cache = pipeline::compute_features(corpus, config, {.chews = true, .windows = false});
  return first_n_sweep(corpus, run_chew_folds(corpus, cache, protocol, config), protocol, config, n_max);
}

}  // namespace chewtex::eval
