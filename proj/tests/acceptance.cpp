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

// Acceptance checks: one PASS/FAIL line per criterion. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "chewtex/dsp.hpp"
#include "chewtex/eval.hpp"
#include "chewtex/features.hpp"
#include "chewtex/learn/bayes_opt.hpp"
#include "chewtex/learn/kmeans.hpp"
#include "chewtex/learn/svm.hpp"
#include "chewtex/metrics.hpp"
#include "chewtex/random.hpp"
#include "cli.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace chewtex;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o, double seconds, double limit_s = 0.0) {
  Outcome final = o;
  if (limit_s > 0.0) final.check(seconds < limit_s, "runtime over " + std::to_string(limit_s) + " s");
  failures += final.pass ? 0 : 1;
  std::ostringstream line;
  line.precision(3);
  line << "CRITERION " << id << ": " << (final.pass ? "PASS" : "FAIL") << " - " << title << " ["
       << std::fixed << seconds << " s]";
  if (!final.detail.empty()) line << " (" << final.detail << ")";
  std::cout << line.str() << std::endl;
}

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << std::fixed << v;
  return s.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "chewtex");
  std::ostringstream out;
  const int code = cli::run(args, out, std::cerr);
  std::cout << out.str();
  return code;
}

// ---------------------------------------------------------------------------

void criterion_1() {
  const auto t0 = Clock::now();
  Outcome o;
  Rng rng(101);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    ConfusionCounts c;
    c.tp = static_cast<std::int64_t>(rng.index(1000));
    c.fn = static_cast<std::int64_t>(rng.index(1000));
    c.tn = static_cast<std::int64_t>(rng.index(1000));
    c.fp = static_cast<std::int64_t>(rng.index(1000));
    if (c.positives() == 0) c.tp = 1;
    if (c.negatives() == 0) c.tn = 1;
    const double balanced = 0.5 * (static_cast<double>(c.tp) / static_cast<double>(c.positives()) +
                                   static_cast<double>(c.tn) / static_cast<double>(c.negatives()));
    worst = std::max(worst, std::abs(*weighted_accuracy(c) - balanced));
  }
  o.check(worst <= 1e-12, "max deviation " + std::to_string(worst));
  report(1, "weighted accuracy equals balanced accuracy on 10000 random confusions", o, since(t0), 1.0);
}

void criterion_2() {
  const auto t0 = Clock::now();
  Outcome o;
  const auto hp = dsp::design_highpass(9, 20.0, 8000.0);
  o.check(std::abs(hp.magnitude(20.0) - 1.0 / std::numbers::sqrt2) <= 1e-3, "|H(20 Hz)|");
  o.check(hp.magnitude(0.0) < 1e-9, "|H(0)|");
  o.check(std::abs(hp.magnitude(1000.0) - 1.0) <= 1e-6, "|H(1 kHz)|");
  double worst = 0.0;
  for (double f : {0.0, 1.0, 5.0, 10.0, 15.0, 20.0, 25.0, 40.0, 100.0, 1000.0, 3000.0, 3999.0}) {
    worst = std::max(worst, std::abs(hp.magnitude(f) - test::butterworth_highpass_magnitude(9, f, 20.0, 8000.0)));
  }
  o.check(worst < 1e-9, "closed-form mismatch " + std::to_string(worst));
  report(2, "9th-order 20 Hz high-pass at 8 kHz matches the Butterworth magnitude", o, since(t0), 1.0);
}

void criterion_3() {
  const auto t0 = Clock::now();
  Outcome o;
  Rng rng(303);
  double worst_gap = 0.0, worst_kkt = 0.0, worst_eq = 0.0;
  const int instances = 40;
  for (int trial = 0; trial < instances; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng.index(7));
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(4));
    Eigen::MatrixXd x(n, d);
    for (auto& v : x.reshaped()) v = rng.normal();
    Eigen::VectorXi y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? 1 : -1;
    y[0] = 1;
    y[n - 1] = -1;
    learn::SvmParams p;
    p.C = std::exp2(rng.uniform(-3.0, 6.0));
    p.gamma = std::exp2(rng.uniform(-3.0, 2.0));
    p.weights = learn::ClassWeights::balanced(y);
    const auto fit = learn::svm_train(x, y, p);
    Eigen::VectorXd upper(n);
    for (Eigen::Index i = 0; i < n; ++i) upper[i] = p.C * (y[i] > 0 ? p.weights.positive : p.weights.negative);
    const Eigen::MatrixXd k = (-p.gamma * learn::squared_distances(x, x).array()).exp().matrix();
    const double oracle = test::dual_qp_oracle(k, y, upper);
    worst_gap = std::max(worst_gap, std::abs(fit.diagnostics.objective - oracle));
    worst_kkt = std::max(worst_kkt, fit.diagnostics.max_violation);
    worst_eq = std::max(worst_eq, std::abs(fit.diagnostics.alpha.dot(y.cast<double>())));
  }
  o.check(worst_gap <= 1e-3, "objective gap " + std::to_string(worst_gap));
  o.check(worst_kkt < 1e-3, "KKT violation " + std::to_string(worst_kkt));
  o.check(worst_eq <= 1e-8, "sum a_i y_i " + std::to_string(worst_eq));
  report(3, "SMO matches the exhaustive QP oracle on " + std::to_string(instances) + " instances (n <= 8)", o,
         since(t0), 30.0);
}

Eigen::VectorXd random_segment(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd x(n);
  const double fs = 8000.0;
  switch (rng.index(4)) {
    case 0:
      for (auto& v : x) v = rng.normal();
      break;
    case 1: {
      const double phi = rng.uniform(0.3, 0.98);
      double prev = 0.0;
      for (auto& v : x) v = prev = phi * prev + rng.normal();
      break;
    }
    case 2: {
      const double f = rng.uniform(50.0, 3500.0);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = std::sin(2.0 * std::numbers::pi * f * i / fs) + 0.1 * rng.normal();
      break;
    }
    default:
      for (Eigen::Index i = 0; i < n; ++i) {
        x[i] = (rng.uniform() < 0.02 ? rng.uniform(-5.0, 5.0) : 0.0) + 0.05 * rng.normal();
      }
  }
  return x;
}

void criterion_4() {
  const auto t0 = Clock::now();
  Outcome o;
  Rng rng(404);
  const double fs = 8000.0;
  const features::FeatureConfig cfg{features::BandPlan::standard(fs)};
  double fd_dev = 0.0, cn_dev = 0.0, m_dev = 0.0, bow_dev = 0.0;
  bool dims = true;
  for (int s = 0; s < 500; ++s) {
    const auto n = static_cast<Eigen::Index>(rng.uniform(0.2, 2.0) * fs);
    const Eigen::VectorXd x = random_segment(rng, n);
    const double a = std::exp(rng.uniform(-4.0, 4.0));
    const double b = rng.uniform(-3.0, 3.0);
    const Eigen::VectorXd scaled = a * x;
    const Eigen::VectorXd shifted = (a * x).array() + b;
    fd_dev = std::max(fd_dev, std::abs(features::fractal_dimension(x) - features::fractal_dimension(scaled)));
    cn_dev = std::max(cn_dev, std::abs(features::condition_number(x, 10) - features::condition_number(scaled, 10)));
    const auto m0 = features::higher_moments(x);
    const auto m1 = features::higher_moments(shifted);
    m_dev = std::max({m_dev, std::abs(m0.skewness - m1.skewness), std::abs(m0.kurtosis - m1.kurtosis)});
    const auto fv = features::extract_segment_features(x, fs, cfg);
    dims = dims && fv.size() == cfg.dimension() && fv.values.allFinite();

    learn::Codebook cb;
    cb.centroids.resize(1 + static_cast<Eigen::Index>(rng.index(64)), 16);
    for (auto& v : cb.centroids.reshaped()) v = rng.normal();
    Eigen::MatrixXd windows(1 + static_cast<Eigen::Index>(rng.index(200)), 16);
    for (auto& v : windows.reshaped()) v = rng.normal();
    const Eigen::VectorXd h = learn::bow_encode(cb, windows);
    bow_dev = std::max(bow_dev, std::abs(h.sum() - 1.0));
    dims = dims && h.size() == cb.k() && h.minCoeff() >= 0.0;
  }
  o.check(fd_dev <= 1e-9, "FD scale deviation " + std::to_string(fd_dev));
  o.check(cn_dev <= 1e-9, "CN scale deviation " + std::to_string(cn_dev));
  o.check(m_dev <= 1e-9, "moment affine deviation " + std::to_string(m_dev));
  o.check(dims, "feature or histogram shape");
  o.check(bow_dev <= 1e-12, "histogram sum deviation " + std::to_string(bow_dev));
  report(4, "feature invariants over 500 random segments", o, since(t0), 30.0);
}

void criterion_5() {
  const auto t0 = Clock::now();
  Outcome o;
  // Smooth, non-separable, with a secondary ridge.
  auto objective = [](double log2_c, double log2_g) {
    const double u = (log2_c - 6.3) / 5.0, v = (log2_g + 7.6) / 4.0;
    return std::exp(-(u * u + v * v + 0.6 * u * v)) +
           0.4 * std::exp(-(std::pow((log2_c + 1.0) / 3.0, 2) + std::pow((log2_g - 0.5) / 2.0, 2)));
  };
  learn::HpoConfig base;
  double best = -1e300, best_c = 0.0, best_g = 0.0;
  for (double c = base.log2_C.lo; c <= base.log2_C.hi + 1e-9; c += 0.25) {
    for (double g = base.log2_gamma.lo; g <= base.log2_gamma.hi + 1e-9; g += 0.25) {
      if (objective(c, g) > best) {
        best = objective(c, g);
        best_c = c;
        best_g = g;
      }
    }
  }
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto cfg = base;
    cfg.seed = seed;
    cfg.budget = 40;
    const auto r = learn::bayes_opt(
        [&](double C, double gamma) { return objective(std::log2(C), std::log2(gamma)); }, cfg);
    hits += std::hypot(std::log2(r.C) - best_c, std::log2(r.gamma) - best_g) <= 1.0;
  }
  o.check(hits >= 18, std::to_string(hits) + "/20 within 1 log2 unit");
  o.detail = o.pass ? std::to_string(hits) + "/20 runs within 1 log2 unit" : o.detail;
  report(5, "Bayesian optimizer lands near the grid optimum", o, since(t0), 120.0);
}

// ---------------------------------------------------------------------------
// End-to-end criteria share one synthetic corpus and its run directories.

struct E2eRun {
  fs::path corpus;
  fs::path loso_chew;
  fs::path loso_bout;
  int max_chews = 0;
  bool ok = true;
  double seconds = 0.0;
};

int max_chews_per_bout(const fs::path& corpus_dir) {
  const Corpus c = load_corpus(corpus_dir);
  std::size_t m = 0;
  for (const auto& b : c.bouts) m = std::max(m, b.chew_ids.size());
  return static_cast<int>(m);
}

E2eRun run_loso(const fs::path& root) {
  const auto t0 = Clock::now();
  E2eRun r;
  r.corpus = root / "corpus";
  r.loso_chew = root / "loso-chew";
  r.loso_bout = root / "loso-bout";
  r.ok = cli({"synth", "--seed", "7", "--subjects", "9", "--out", r.corpus.string()}) == 0;
  if (!r.ok) return r;
  r.max_chews = max_chews_per_bout(r.corpus);
  r.ok = cli({"evaluate", "--corpus", r.corpus.string(), "--out", r.loso_chew.string(), "--protocol", "loso",
              "--level", "chew", "--vote", "all", "--sweep-n", std::to_string(r.max_chews + 1)}) == 0 &&
         cli({"evaluate", "--corpus", r.corpus.string(), "--out", r.loso_bout.string(), "--protocol", "loso",
              "--level", "bout"}) == 0;
  r.seconds = since(t0);
  return r;
}

eval::EvaluationReport read_report(const fs::path& p) { return eval::report_from_json(slurp(p)); }

void criterion_6(const E2eRun& run) {
  Outcome o;
  o.check(run.ok, "command failed");
  if (run.ok) {
    const auto vote = read_report(run.loso_chew / "report-vote-all.json").rows();
    const auto bout = read_report(run.loso_bout / "report-bout-bow.json").rows();
    std::string summary;
    for (std::size_t a = 0; a < 3; ++a) {
      const std::string name(to_string(static_cast<Attribute>(a)));
      const double v = vote[a].sum.weighted_accuracy.value_or(0.0);
      const double b = bout[a].sum.weighted_accuracy.value_or(0.0);
      o.check(v >= 0.90, name + " vote-all " + fmt(v) + " < 0.90");
      o.check(b >= 0.85, name + " bout-bow " + fmt(b) + " < 0.85");
      summary += (a ? ", " : "") + name + " vote-all " + fmt(v) + " bout-bow " + fmt(b);
    }
    if (o.pass) o.detail = summary;
  }
  report(6, "synthetic LOSO: vote-all (sum) >= 0.90 and bout-level (sum) >= 0.85 for every attribute", o,
         run.seconds, 600.0);
}

void criterion_7(const E2eRun& run, const fs::path& root) {
  const auto t0 = Clock::now();
  Outcome o;
  const fs::path dir = root / "lofto-chew";
  const bool ok = run.ok && cli({"evaluate", "--corpus", run.corpus.string(), "--out", dir.string(), "--protocol",
                                 "lofto", "--level", "chew", "--vote", "all"}) == 0;
  o.check(ok, "command failed");
  if (ok) {
    std::string summary;
    for (const std::string level : {"chew", "vote-all"}) {
      const auto rows = read_report(dir / ("report-" + level + ".json")).rows();
      double wacc[3];
      for (std::size_t a = 0; a < 3; ++a) wacc[a] = rows[a].sum.weighted_accuracy.value_or(0.0);
      if (level == "chew") o.check(wacc[0] >= 0.85, "crispy chew-level " + fmt(wacc[0]) + " < 0.85");
      o.check(wacc[0] > wacc[1] && wacc[0] > wacc[2], level + ": crispy is not the best attribute");
      summary += (summary.empty() ? "" : "; ") + level + " crispy " + fmt(wacc[0]) + " wet " + fmt(wacc[1]) +
                 " chewy " + fmt(wacc[2]);
    }
    if (o.pass) o.detail = summary;
  }
  report(7, "synthetic LOFTO: crispy (sum) >= 0.85 and recognized best", o, since(t0));
}

void compare_trees(const fs::path& a, const fs::path& b, Outcome& o, int& files) {
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = b / fs::relative(entry.path(), a);
    ++files;
    if (!fs::exists(other)) {
      o.check(false, "missing " + other.string());
    } else if (slurp(entry.path()) != slurp(other)) {
      o.check(false, "differs: " + fs::relative(entry.path(), a).string());
    }
  }
}

void criterion_8(const E2eRun& first, const fs::path& root) {
  const E2eRun second = run_loso(root);
  Outcome o;
  o.check(first.ok && second.ok, "command failed");
  int files = 0, models = 0;
  if (o.pass) {
    compare_trees(first.loso_chew, second.loso_chew, o, files);
    compare_trees(first.loso_bout, second.loso_bout, o, files);
    for (const auto& dir : {first.loso_chew, first.loso_bout}) {
      for (const auto& e : fs::directory_iterator(dir / "models")) models += e.is_regular_file();
    }
    o.check(models == 18, std::to_string(models) + " fold models instead of 18");
    if (o.pass) o.detail = std::to_string(files) + " files identical, " + std::to_string(models) + " models";
  }
  report(8, "two runs of the synthetic LOSO give byte-identical models and reports", o, second.seconds);
}

void criterion_9(const E2eRun& run) {
  const auto t0 = Clock::now();
  Outcome o;
  o.check(run.ok, "command failed");
  if (run.ok) {
    const auto vote = read_report(run.loso_chew / "report-vote-all.json");
    const auto sweep = eval::sweep_from_json(slurp(run.loso_chew / "sweep.json"));
    o.check(static_cast<int>(sweep.by_n.size()) == run.max_chews + 1, "sweep length");
    for (int n : {run.max_chews, run.max_chews + 1}) {
      if (n > static_cast<int>(sweep.by_n.size())) break;
      const auto& r = sweep.by_n[static_cast<std::size_t>(n - 1)];
      o.check(r.n == n && r.folds.size() == vote.folds.size(), "fold layout at n = " + std::to_string(n));
      for (std::size_t f = 0; f < std::min(r.folds.size(), vote.folds.size()); ++f) {
        for (std::size_t a = 0; a < 3; ++a) {
          o.check(r.folds[f].key == vote.folds[f].key &&
                      r.folds[f].attributes[a].counts == vote.folds[f].attributes[a].counts,
                  "fold " + vote.folds[f].key + " differs at n = " + std::to_string(n));
        }
      }
    }
    if (o.pass) o.detail = "max chews per bout " + std::to_string(run.max_chews);
  }
  report(9, "first-n sweep at n >= longest bout equals vote-all per fold", o, since(t0));
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();

  test::TempDir root;
  const E2eRun run = run_loso(root.path() / "a");
  criterion_6(run);
  criterion_7(run, root.path() / "a");
  criterion_8(run, root.path() / "b");
  criterion_9(run);

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
