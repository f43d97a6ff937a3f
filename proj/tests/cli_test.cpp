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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "test_util.hpp"

namespace chewtex::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "chewtex");
  std::ostringstream out, err;
  Result r;
  r.code = run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

class CliCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new test::TempDir();
    const auto r = run_cli({"synth", "--out", (dir_->path() / "corpus").string(), "--subjects", "2",
                            "--sample-rate", "8000", "--seed", "3"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  static void TearDownTestSuite() {
    delete dir_;
    dir_ = nullptr;
  }
  static fs::path corpus() { return dir_->path() / "corpus"; }
  static fs::path path(const std::string& name) { return dir_->path() / name; }

  static test::TempDir* dir_;
};

test::TempDir* CliCorpus::dir_ = nullptr;

TEST(Cli, HelpDocumentsDefaultsAndTheirOrigin) {
  const auto r = run_cli({"evaluate", "--help"});
  EXPECT_EQ(r.code, kExitOk);
  const std::string text = r.out + r.err;
  for (const char* needle : {"--target-rate-hz", "--hp-order", "--hp-cutoff-hz", "--order-p", "--seed",
                             "--codebook-size", "--budget", "--std-threshold", "--cv-folds", "--jobs",
                             "published default", "repo default", "8000", "64"}) {
    EXPECT_NE(text.find(needle), std::string::npos) << needle;
  }
}

TEST(Cli, UsageAndConfigErrorsExitTwo) {
  EXPECT_EQ(run_cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"synth"}).code, kExitConfig);
  const auto r = run_cli({"synth", "--out", "/tmp/never-used", "--subjects", "0"});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingDataExitsThree) {
  test::TempDir dir;
  const auto r = run_cli({"train", "--corpus", (dir.path() / "absent").string(), "--out",
                          (dir.path() / "m.json").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UnwritableOutputFails) {
  const auto r = run_cli({"synth", "--out", "/proc/chewtex-denied", "--subjects", "2", "--sample-rate", "8000"});
  EXPECT_NE(r.code, kExitOk);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliCorpus, SynthIsDeterministic) {
  const auto again = path("again");
  ASSERT_EQ(run_cli({"synth", "--out", again.string(), "--subjects", "2", "--sample-rate", "8000",
                     "--seed", "3"}).code,
            kExitOk);
  int wavs = 0;
  for (const auto& entry : fs::directory_iterator(corpus())) {
    const auto other = again / entry.path().filename();
    ASSERT_TRUE(fs::exists(other)) << other;
    EXPECT_EQ(slurp(entry.path()), slurp(other)) << entry.path();
    wavs += entry.path().extension() == ".wav";
  }
  EXPECT_EQ(wavs, 18);
}

TEST_F(CliCorpus, ExtractWritesOneRowPerChew) {
  const auto out = path("chews.csv");
  ASSERT_EQ(run_cli({"extract", "--corpus", corpus().string(), "--out", out.string()}).code, kExitOk);
  std::istringstream in(slurp(out));
  std::string header, line;
  std::getline(in, header);
  EXPECT_TRUE(header.starts_with("segment_id,"));
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_GT(rows, 100);
}

TEST_F(CliCorpus, TrainPredictRoundTrip) {
  const auto model = path("model.json");
  const auto r = run_cli({"train", "--corpus", corpus().string(), "--out", model.string(), "--budget", "10",
                          "--subjects", "s01"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const std::string bytes = slurp(model);
  ASSERT_EQ(run_cli({"train", "--corpus", corpus().string(), "--out", path("model2.json").string(),
                     "--budget", "10", "--subjects", "s01"}).code,
            kExitOk);
  EXPECT_EQ(slurp(path("model2.json")), bytes);

  const auto preds = path("pred.csv");
  const auto p = run_cli({"predict", "--corpus", corpus().string(), "--model", model.string(), "--out",
                          preds.string(), "--subjects", "s01", "--vote", "all"});
  ASSERT_EQ(p.code, kExitOk) << p.err;
  std::istringstream in(slurp(preds));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "recording_id,bout_id,chew_id,attribute,label,score,provenance");
  int chew_rows = 0, bout_rows = 0, crispy_right = 0, crispy_rows = 0;
  while (std::getline(in, line)) {
    (line.ends_with(",chew") ? chew_rows : bout_rows)++;
    if (line.ends_with(",chew") && line.find(",crispy,") != std::string::npos) {
      ++crispy_rows;
      const bool crispy_food = line.find("apple") != std::string::npos ||
                               line.find("chips") != std::string::npos ||
                               line.find("cookie") != std::string::npos ||
                               line.find("lettuce") != std::string::npos;
      crispy_right += (line.find(",crispy,1,") != std::string::npos) == crispy_food;
    }
  }
  EXPECT_GT(chew_rows, 0);
  EXPECT_EQ(bout_rows, 27);
  EXPECT_GE(static_cast<double>(crispy_right) / crispy_rows, 0.9);
}

TEST_F(CliCorpus, PredictRejectsIncompatibleModels) {
  const auto model = path("model.json");
  if (!fs::exists(model)) {
    ASSERT_EQ(run_cli({"train", "--corpus", corpus().string(), "--out", model.string(), "--budget", "10",
                       "--subjects", "s01"}).code,
              kExitOk);
  }
  auto j = nlohmann::json::parse(slurp(model));
  j["standardizer"]["means"].erase(j["standardizer"]["means"].size() - 1);
  j["standardizer"]["stds"].erase(j["standardizer"]["stds"].size() - 1);
  std::ofstream(path("short.json")) << j.dump();
  auto r = run_cli({"predict", "--corpus", corpus().string(), "--model", path("short.json").string(), "--out",
                    path("p.csv").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_FALSE(r.err.empty());

  j = nlohmann::json::parse(slurp(model));
  j["schema"] = "chewtex.attribute-model/0";
  std::ofstream(path("old.json")) << j.dump();
  r = run_cli({"predict", "--corpus", corpus().string(), "--model", path("old.json").string(), "--out",
               path("p.csv").string()});
  EXPECT_EQ(r.code, kExitData);
  EXPECT_NE(r.err.find("schema"), std::string::npos);
}

TEST_F(CliCorpus, EvaluateWritesRunDirectory) {
  const auto run_dir = path("run");
  const auto r = run_cli({"evaluate", "--corpus", corpus().string(), "--out", run_dir.string(), "--protocol",
                          "loso", "--level", "chew", "--vote", "all", "--sweep-n", "4", "--budget", "10"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Weighted accuracy"), std::string::npos);
  EXPECT_TRUE(fs::exists(run_dir / "report.txt"));
  EXPECT_TRUE(fs::exists(run_dir / "report-chew.json"));
  EXPECT_TRUE(fs::exists(run_dir / "report-vote-all.json"));
  EXPECT_TRUE(fs::exists(run_dir / "models" / "fold-s01.json"));
  EXPECT_TRUE(fs::exists(run_dir / "models" / "fold-s02.json"));
  ASSERT_TRUE(fs::exists(run_dir / "sweep.json"));

  const auto plot = run_cli({"report", (run_dir / "sweep.json").string(), "--plot-data"});
  ASSERT_EQ(plot.code, kExitOk) << plot.err;
  EXPECT_EQ(plot.out, slurp(run_dir / "sweep.csv"));
  EXPECT_TRUE(plot.out.starts_with("attribute,n,weighted_accuracy\n"));

  const auto table = run_cli({"report", (run_dir / "report-vote-all.json").string()});
  ASSERT_EQ(table.code, kExitOk);
  EXPECT_NE(table.out.find("Majority voting per bout"), std::string::npos);
  EXPECT_EQ(run_cli({"report", (run_dir / "report-chew.json").string(), "--plot-data"}).code, kExitConfig);
}

}  // namespace
}  // namespace chewtex::cli
