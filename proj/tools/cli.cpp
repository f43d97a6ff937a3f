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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "chewtex/corpus.hpp"
#include "chewtex/error.hpp"
#include "chewtex/eval.hpp"
#include "chewtex/pipeline.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace chewtex::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPublished = " (published default)";
constexpr const char* kRepo = " (repo default)";

struct PipelineOptions {
  pipeline::PipelineConfig config;
  std::string bands;
  std::vector<double> log2_c{-5.0, 15.0};
  std::vector<double> log2_gamma{-15.0, 3.0};

  pipeline::PipelineConfig resolve() const {
    pipeline::PipelineConfig c = config;
    if (!bands.empty()) {
      c.features.plan.edges_hz.clear();
      for (const auto& field : detail::split_csv(bands)) {
        c.features.plan.edges_hz.push_back(detail::parse_double(detail::trim(field), "--bands"));
      }
    }
    require(log2_c.size() == 2 && log2_gamma.size() == 2, ErrorKind::kConfig,
            "HPO ranges take exactly two values");
    c.hpo.log2_C = {log2_c[0], log2_c[1]};
    c.hpo.log2_gamma = {log2_gamma[0], log2_gamma[1]};
    c.validate();
    return c;
  }
};

void add_front_end_options(CLI::App* app, PipelineOptions& o) {
  auto& c = o.config;
  app->add_option("--target-rate-hz", c.front_end.target_rate_hz,
                  std::string("Analysis sample rate after decimation") + kPublished)
      ->capture_default_str();
  app->add_option("--hp-order", c.front_end.hp_order,
                  std::string("Butterworth high-pass order") + kPublished)
      ->capture_default_str();
  app->add_option("--hp-cutoff-hz", c.front_end.hp_cutoff_hz,
                  std::string("High-pass cutoff in Hz") + kPublished)
      ->capture_default_str();
  app->add_option("--bands", o.bands,
                  std::string("Comma-separated band edges in Hz; empty selects the doubling grid up to "
                              "the Nyquist frequency") + kRepo);
  app->add_option("--order-p", c.features.autocorr_order,
                  std::string("Autocorrelation matrix order for the condition-number feature") + kRepo)
      ->capture_default_str();
  app->add_option("--jobs", c.jobs, "Worker threads (default: available cores)")->capture_default_str();
}

void add_learning_options(CLI::App* app, PipelineOptions& o) {
  auto& c = o.config;
  app->add_option("--seed", c.seed, std::string("Seed for k-means, HPO design and CV folds") + kRepo)
      ->capture_default_str();
  app->add_option("-k,--codebook-size", c.codebook_size, std::string("Bag-of-words codebook size") + kRepo)
      ->capture_default_str();
  app->add_option("--log2-c-range", o.log2_c, std::string("HPO search interval for log2 C") + kRepo)
      ->expected(2)
      ->capture_default_str();
  app->add_option("--log2-gamma-range", o.log2_gamma, std::string("HPO search interval for log2 gamma") + kRepo)
      ->expected(2)
      ->capture_default_str();
  app->add_option("--budget", c.hpo.budget, std::string("HPO objective evaluations") + kRepo)
      ->capture_default_str();
  app->add_option("--initial-design", c.hpo.initial_design,
                  std::string("Latin-hypercube points before the GP takes over") + kRepo)
      ->capture_default_str();
  app->add_option("--std-threshold", c.hpo.posterior_std_threshold,
                  std::string("Posterior std below which HPO switches to pure exploration") + kRepo)
      ->capture_default_str();
  app->add_option("--cv-folds", c.hpo.folds, std::string("Cross-validation folds inside HPO") + kPublished)
      ->capture_default_str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << text;
  require(static_cast<bool>(out), ErrorKind::kIo, "failed writing '" + path.string() + "'");
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot read '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::kIo,
          "cannot create directory '" + dir.string() + "'" + (ec ? ": " + ec.message() : ""));
}

/// Recording indices matching optional subject and food filters.
std::vector<std::size_t> select_recordings(const Corpus& corpus, const std::vector<std::string>& subjects,
                                           const std::vector<std::string>& foods) {
  const std::set<std::string> s(subjects.begin(), subjects.end());
  const std::set<std::string> f(foods.begin(), foods.end());
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < corpus.recordings.size(); ++r) {
    const auto& rec = corpus.recordings[r];
    if (!s.empty() && !s.contains(rec.subject_id)) continue;
    if (!f.empty() && !f.contains(rec.food_type)) continue;
    out.push_back(r);
  }
  require(!out.empty(), ErrorKind::kConfig, "no recordings match the subject/food filters");
  return out;
}

std::optional<int> parse_vote(const std::string& vote) {
  if (vote == "all") return std::nullopt;
  const int n = detail::parse_int(vote, "--vote");
  require(n >= 1, ErrorKind::kConfig, "--vote takes 'all' or a positive chew count");
  return n;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  SynthConfig config;
  std::string out;
};

void cmd_synth(const SynthArgs& a, std::ostream& out) {
  a.config.validate();
  const Corpus corpus = synth_corpus(a.config);
  make_dir(a.out);
  write_corpus(corpus, a.out, &a.config);
  out << "wrote " << corpus.recordings.size() << " recordings, " << corpus.bouts.size() << " bouts, "
      << corpus.chews.size() << " chews to " << a.out << '\n';
}

struct ExtractArgs {
  std::string corpus;
  std::string out;
  std::string unit = "chew";
  PipelineOptions pipeline;
};

void cmd_extract(const ExtractArgs& a, std::ostream& out) {
  const auto config = a.pipeline.resolve();
  require(a.unit == "chew" || a.unit == "window", ErrorKind::kConfig, "--unit takes chew or window");
  const Corpus corpus = load_corpus(a.corpus);
  const bool chews = a.unit == "chew";
  const auto cache = pipeline::compute_features(corpus, config, {.chews = chews, .windows = !chews});
  std::vector<std::string> ids;
  Eigen::MatrixXd rows;
  if (chews) {
    for (const auto& c : corpus.chews) {
      ids.push_back(c.recording_id + ":" + std::to_string(c.bout_id) + ":" + std::to_string(c.chew_id));
    }
    rows = cache.chews;
  } else {
    Eigen::Index total = 0;
    for (const auto& w : cache.bout_windows) total += w.rows();
    rows.resize(total, cache.features.dimension());
    Eigen::Index at = 0;
    for (std::size_t b = 0; b < corpus.bouts.size(); ++b) {
      const auto& w = cache.bout_windows[b];
      for (Eigen::Index i = 0; i < w.rows(); ++i) {
        ids.push_back(corpus.bouts[b].recording_id + ":" + std::to_string(corpus.bouts[b].bout_id) + ":w" +
                      std::to_string(i));
      }
      rows.middleRows(at, w.rows()) = w;
      at += w.rows();
    }
  }
  std::ostringstream csv;
  features::write_feature_csv(csv, cache.features.plan, ids, rows);
  write_text(a.out, csv.str());
  out << "wrote " << rows.rows() << " x " << rows.cols() << " features to " << a.out << '\n';
}

struct TrainArgs {
  std::string corpus;
  std::string out;
  std::string level = "chew";
  std::vector<std::string> subjects;
  std::vector<std::string> foods;
  PipelineOptions pipeline;
};

void cmd_train(const TrainArgs& a, std::ostream& out) {
  const auto config = a.pipeline.resolve();
  require(a.level == "chew" || a.level == "bout", ErrorKind::kConfig, "--level takes chew or bout");
  const Corpus corpus = load_corpus(a.corpus);
  const auto train = select_recordings(corpus, a.subjects, a.foods);
  const auto model = a.level == "chew" ? pipeline::train_chew_level(corpus, train, config)
                                       : pipeline::train_bout_level(corpus, train, config);
  pipeline::save_model(a.out, model);
  out << "trained " << pipeline::to_string(model.mode) << " model on " << train.size() << " recordings";
  for (std::size_t i = 0; i < kAttributes.size(); ++i) {
    if (model.classifiers[i].degenerate) out << "; " << to_string(kAttributes[i]) << " degenerate";
  }
  out << "\nwrote " << a.out << '\n';
}

struct PredictArgs {
  std::string corpus;
  std::string model;
  std::string out;
  std::string vote = "all";
  std::vector<std::string> subjects;
  std::vector<std::string> foods;
  int jobs = 1;
};

void cmd_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = pipeline::load_model(a.model);
  const auto vote = parse_vote(a.vote);
  const Corpus corpus = load_corpus(a.corpus);
  const auto selected = select_recordings(corpus, a.subjects, a.foods);
  std::vector<pipeline::ChewPrediction> chews;
  std::vector<pipeline::BoutPrediction> bouts;
  for (std::size_t r : selected) {
    const auto& rec = corpus.recordings[r];
    for (const auto& bout : corpus.bouts) {
      if (bout.recording_id != rec.id()) continue;
      if (model.mode == pipeline::Mode::kChewLevel) {
        const auto bout_chews = corpus.chews_of(bout);
        auto preds = pipeline::predict_chews(model, rec, bout_chews);
        bouts.push_back(pipeline::vote_bout(preds, vote));
        chews.insert(chews.end(), preds.begin(), preds.end());
      } else {
        bouts.push_back(pipeline::predict_bout(model, rec, bout));
      }
    }
  }
  std::ostringstream csv;
  pipeline::write_predictions_csv(csv, chews, bouts);
  write_text(a.out, csv.str());
  out << "wrote " << chews.size() << " chew and " << bouts.size() << " bout predictions to " << a.out << '\n';
}

struct EvaluateArgs {
  std::string corpus;
  std::string out;
  std::string protocol = "loso";
  std::string level = "chew";
  std::string vote = "all";
  int sweep_n = 0;
  PipelineOptions pipeline;
};

void cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  const auto config = a.pipeline.resolve();
  const auto protocol = eval::protocol_from_string(a.protocol);
  require(a.level == "chew" || a.level == "bout", ErrorKind::kConfig, "--level takes chew or bout");
  require(a.sweep_n >= 0, ErrorKind::kConfig, "--sweep-n must be non-negative");
  require(a.sweep_n == 0 || a.level == "chew", ErrorKind::kConfig, "--sweep-n needs --level chew");
  const auto vote = parse_vote(a.vote);
  const Corpus corpus = load_corpus(a.corpus);
  make_dir(a.out);
  const fs::path dir(a.out);

  std::vector<eval::EvaluationReport> reports;
  std::map<std::string, std::string> models;
  std::optional<eval::SweepResult> sweep;
  if (a.level == "chew") {
    const auto cache = pipeline::compute_features(corpus, config, {.chews = true, .windows = false});
    const auto folds = eval::run_chew_folds(corpus, cache, protocol, config);
    reports.push_back(eval::chew_report(corpus, folds, protocol, eval::Level::kChew, 0, config));
    reports.push_back(eval::chew_report(corpus, folds, protocol,
                                        vote ? eval::Level::kVoteFirstN : eval::Level::kVoteAll,
                                        vote.value_or(0), config));
    if (a.sweep_n > 0) sweep = eval::first_n_sweep(corpus, folds, protocol, config, a.sweep_n);
    for (const auto& f : folds) {
      if (!f.error) models[f.split.key] = f.model_json;
    }
  } else {
    const auto cache = pipeline::compute_features(corpus, config, {.chews = false, .windows = true});
    const auto folds = eval::run_bout_folds(corpus, cache, protocol, config);
    reports.push_back(eval::bout_report(corpus, folds, protocol, config));
    for (const auto& f : folds) {
      if (!f.error) models[f.split.key] = f.model_json;
    }
  }

  std::ostringstream table;
  eval::write_report_table(table, reports);
  write_text(dir / "report.txt", table.str());
  for (const auto& r : reports) {
    std::string name = eval::level_name(r.level, r.n);
    std::replace(name.begin(), name.end(), '(', '-');
    name.erase(std::remove(name.begin(), name.end(), ')'), name.end());
    write_text(dir / ("report-" + name + ".json"), eval::report_to_json(r));
  }
  for (const auto& [key, json] : models) write_text(dir / "models" / ("fold-" + key + ".json"), json);
  if (sweep) {
    write_text(dir / "sweep.json", eval::sweep_to_json(*sweep));
    std::ostringstream csv;
    eval::write_sweep_csv(csv, *sweep);
    write_text(dir / "sweep.csv", csv.str());
  }
  out << table.str();
  for (const auto& r : reports) {
    if (r.partial()) out << "warning: " << eval::level_name(r.level, r.n) << " report is partial\n";
  }
  out << "wrote results to " << a.out << '\n';
}

struct ReportArgs {
  std::string input;
  std::string out;
  bool plot_data = false;
};

void cmd_report(const ReportArgs& a, std::ostream& out) {
  const std::string text = read_text(a.input);
  std::ostringstream result;
  if (text.find(eval::kSweepSchema) != std::string::npos) {
    const auto sweep = eval::sweep_from_json(text);
    if (a.plot_data) {
      eval::write_sweep_csv(result, sweep);
    } else {
      eval::write_report_table(result, sweep.by_n);
    }
  } else {
    require(!a.plot_data, ErrorKind::kConfig, "--plot-data needs a sweep file (sweep.json)");
    eval::write_report_table(result, {eval::report_from_json(text)});
  }
  if (a.out.empty()) {
    out << result.str();
  } else {
    write_text(a.out, result.str());
  }
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
    case ErrorKind::kDesign:
    case ErrorKind::kProtocol:
      return kExitConfig;
    default:
      return kExitData;
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Food-texture attribute recognition from chewing audio"};
  app.name(args.empty() ? "chewtex" : fs::path(args.front()).filename().string());
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic chewing corpus");
  s->add_option("--out", synth.out, "Output directory")->required();
  s->add_option("--seed", synth.config.seed, std::string("Generator seed") + kRepo)->capture_default_str();
  s->add_option("--subjects", synth.config.n_subjects, std::string("Number of subjects") + kPublished)
      ->capture_default_str();
  s->add_option("--sample-rate", synth.config.sample_rate, std::string("Recording sample rate in Hz") + kRepo)
      ->capture_default_str();
  s->add_option("--snr-db", synth.config.snr_db, std::string("Background noise level in dB") + kRepo)
      ->capture_default_str();

  ExtractArgs extract;
  auto* x = app.add_subcommand("extract", "Write chew or window feature vectors as CSV");
  x->add_option("--corpus", extract.corpus, "Corpus directory")->required();
  x->add_option("--out", extract.out, "Output CSV")->required();
  x->add_option("--unit", extract.unit, "chew or window")->capture_default_str();
  add_front_end_options(x, extract.pipeline);

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Train a chew-level or bout-level attribute model");
  t->add_option("--corpus", train.corpus, "Corpus directory")->required();
  t->add_option("--out", train.out, "Output model JSON")->required();
  t->add_option("--level", train.level, "chew or bout")->capture_default_str();
  t->add_option("--subjects", train.subjects, "Train on these subjects only")->delimiter(',');
  t->add_option("--foods", train.foods, "Train on these food types only")->delimiter(',');
  add_front_end_options(t, train.pipeline);
  add_learning_options(t, train.pipeline);

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Predict attributes for the chews and bouts of a corpus");
  p->add_option("--corpus", predict.corpus, "Corpus directory")->required();
  p->add_option("--model", predict.model, "Model JSON")->required();
  p->add_option("--out", predict.out, "Output predictions CSV")->required();
  p->add_option("--vote", predict.vote, "Chews per bout vote: 'all' or n")->capture_default_str();
  p->add_option("--subjects", predict.subjects, "Predict these subjects only")->delimiter(',');
  p->add_option("--foods", predict.foods, "Predict these food types only")->delimiter(',');

  EvaluateArgs evaluate;
  evaluate.pipeline.config.jobs = detail::default_jobs();
  train.pipeline.config.jobs = detail::default_jobs();
  extract.pipeline.config.jobs = detail::default_jobs();
  auto* e = app.add_subcommand("evaluate", "Run a LOSO or LOFTO evaluation");
  e->add_option("--corpus", evaluate.corpus, "Corpus directory")->required();
  e->add_option("--out", evaluate.out, "Run directory for reports and fold models")->required();
  e->add_option("--protocol", evaluate.protocol, "loso or lofto")->capture_default_str();
  e->add_option("--level", evaluate.level, "chew or bout")->capture_default_str();
  e->add_option("--vote", evaluate.vote, "Chew-level bout vote: 'all' or n")->capture_default_str();
  e->add_option("--sweep-n", evaluate.sweep_n, "Also vote on the first 1..N chews (0 disables)")
      ->capture_default_str();
  add_front_end_options(e, evaluate.pipeline);
  add_learning_options(e, evaluate.pipeline);

  ReportArgs report;
  auto* r = app.add_subcommand("report", "Print a report table or sweep plot data");
  r->add_option("input", report.input, "report-*.json or sweep.json")->required();
  r->add_option("--out", report.out, "Write to a file instead of stdout");
  r->add_flag("--plot-data", report.plot_data, "Emit the sweep as attribute,n,weighted_accuracy CSV");

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (s->parsed()) cmd_synth(synth, out);
    if (x->parsed()) cmd_extract(extract, out);
    if (t->parsed()) cmd_train(train, out);
    if (p->parsed()) cmd_predict(predict, out);
    if (e->parsed()) cmd_evaluate(evaluate, out);
    if (r->parsed()) cmd_report(report, out);
  } catch (const Error& ex) {
    err << "error (" << to_string(ex.kind()) << "): " << ex.what() << '\n';
    return exit_code(ex.kind());
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace chewtex::cli
