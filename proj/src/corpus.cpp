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

#include "chewtex/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "chewtex/error.hpp"
#include "text_util.hpp"

namespace chewtex {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kFormat: return "format error";
    case ErrorKind::kUnsupportedCodec: return "unsupported codec";
    case ErrorKind::kUnsupportedRate: return "unsupported rate";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kAnnotation: return "annotation error";
    case ErrorKind::kSegmentTooShort: return "segment too short";
    case ErrorKind::kShape: return "shape error";
    case ErrorKind::kDegenerateLabels: return "degenerate labels";
    case ErrorKind::kSchema: return "schema error";
    case ErrorKind::kDesign: return "design error";
    case ErrorKind::kUndefinedMetric: return "undefined metric";
    case ErrorKind::kProtocol: return "protocol error";
    case ErrorKind::kIo: return "io error";
  }
  return "error";
}

std::string_view to_string(Attribute attribute) {
  switch (attribute) {
    case Attribute::kCrispy: return "crispy";
    case Attribute::kWet: return "wet";
    case Attribute::kChewy: return "chewy";
  }
  return "?";
}

Attribute attribute_from_string(std::string_view name) {
  for (Attribute a : kAttributes) {
    if (to_string(a) == name) return a;
  }
  fail(ErrorKind::kConfig, "unknown attribute '" + std::string(name) + "'");
}

std::string make_recording_id(std::string_view subject_id, std::string_view food_type) {
  return std::string(subject_id) + "-" + std::string(food_type);
}

std::string AudioRecording::id() const { return make_recording_id(subject_id, food_type); }

// ---------------------------------------------------------------------------
// Corpus

const AudioRecording& Corpus::recording(std::string_view id) const {
  for (const auto& rec : recordings) {
    if (rec.id() == id) return rec;
  }
  fail(ErrorKind::kAnnotation, "unknown recording '" + std::string(id) + "'");
}

const AttributeLabels& Corpus::labels_of(const AudioRecording& rec) const {
  auto it = labels.find(rec.food_type);
  require(it != labels.end(), ErrorKind::kValidation,
          "food type '" + rec.food_type + "' has no label-table entry");
  return it->second;
}

std::vector<std::string> Corpus::subjects() const {
  std::set<std::string> out;
  for (const auto& rec : recordings) out.insert(rec.subject_id);
  return {out.begin(), out.end()};
}

std::vector<std::string> Corpus::food_types() const {
  std::set<std::string> out;
  for (const auto& rec : recordings) out.insert(rec.food_type);
  return {out.begin(), out.end()};
}

std::vector<ChewAnnotation> Corpus::chews_of(const BoutAnnotation& bout) const {
  std::vector<ChewAnnotation> out;
  for (const auto& chew : chews) {
    if (chew.recording_id == bout.recording_id && chew.bout_id == bout.bout_id) {
      out.push_back(chew);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.start_s < b.start_s; });
  return out;
}

void Corpus::validate() const {
  std::map<std::string, double, std::less<>> durations;
  for (const auto& rec : recordings) {
    require(rec.sample_rate > 0, ErrorKind::kValidation,
            "recording '" + rec.id() + "' has non-positive sample rate");
    require(rec.samples.allFinite(), ErrorKind::kValidation,
            "recording '" + rec.id() + "' contains non-finite samples");
    require(durations.emplace(rec.id(), rec.duration_seconds()).second,
            ErrorKind::kValidation, "duplicate recording '" + rec.id() + "'");
    labels_of(rec);
  }
  for (const auto& chew : chews) {
    auto it = durations.find(chew.recording_id);
    require(it != durations.end(), ErrorKind::kAnnotation,
            "chew references unknown recording '" + chew.recording_id + "'");
    require(chew.start_s >= 0.0 && chew.stop_s <= it->second + 1e-9,
            ErrorKind::kAnnotation,
            "chew " + std::to_string(chew.chew_id) + " of '" + chew.recording_id +
                "' lies outside the recording");
  }
}

// ---------------------------------------------------------------------------
// Annotations

std::vector<ChewAnnotation> validate_chews(std::vector<ChewAnnotation> chews) {
  std::sort(chews.begin(), chews.end(), [](const auto& a, const auto& b) {
    return std::tie(a.recording_id, a.bout_id, a.start_s, a.chew_id) <
           std::tie(b.recording_id, b.bout_id, b.start_s, b.chew_id);
  });
  for (std::size_t i = 0; i < chews.size(); ++i) {
    const auto& c = chews[i];
    const std::string where = "chew " + std::to_string(c.chew_id) + " (recording '" +
                              c.recording_id + "', bout " + std::to_string(c.bout_id) + ")";
    require(std::isfinite(c.start_s) && std::isfinite(c.stop_s), ErrorKind::kValidation,
            where + ": non-finite time");
    require(c.start_s >= 0.0, ErrorKind::kValidation, where + ": negative start");
    require(c.stop_s > c.start_s, ErrorKind::kValidation, where + ": stop_s <= start_s");
    if (i == 0) continue;
    const auto& p = chews[i - 1];
    if (p.recording_id != c.recording_id || p.bout_id != c.bout_id) continue;
    require(c.start_s >= p.stop_s, ErrorKind::kValidation,
            where + ": overlaps chew " + std::to_string(p.chew_id));
    require(c.chew_id > p.chew_id, ErrorKind::kValidation,
            where + ": chew ids are not ordered by start time");
  }
  return chews;
}

std::vector<ChewAnnotation> parse_annotations(std::istream& in) {
  static const std::vector<std::string> kHeader = {"recording_id", "bout_id", "chew_id",
                                                   "start_s", "stop_s"};
  std::vector<ChewAnnotation> chews;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv(line);
    if (!header_seen) {
      require(fields == kHeader, ErrorKind::kFormat,
              "annotation header must be recording_id,bout_id,chew_id,start_s,stop_s");
      header_seen = true;
      continue;
    }
    require(fields.size() == 5, ErrorKind::kFormat,
            "annotation line " + std::to_string(line_no) + ": expected 5 fields");
    ChewAnnotation chew;
    chew.recording_id = fields[0];
    chew.bout_id = detail::parse_int(fields[1], "bout_id");
    chew.chew_id = detail::parse_int(fields[2], "chew_id");
    chew.start_s = detail::parse_double(fields[3], "start_s");
    chew.stop_s = detail::parse_double(fields[4], "stop_s");
    chews.push_back(std::move(chew));
  }
  require(header_seen, ErrorKind::kFormat, "annotation file is empty");
  return validate_chews(std::move(chews));
}

std::vector<ChewAnnotation> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  return parse_annotations(in);
}

void write_annotations(std::ostream& out, std::span<const ChewAnnotation> chews) {
  out << "recording_id,bout_id,chew_id,start_s,stop_s\n";
  for (const auto& c : chews) {
    out << c.recording_id << ',' << c.bout_id << ',' << c.chew_id << ','
        << detail::format_double(c.start_s) << ',' << detail::format_double(c.stop_s) << '\n';
  }
}

std::vector<BoutAnnotation> derive_bouts(std::span<const ChewAnnotation> chews) {
  std::map<std::pair<std::string, int>, std::vector<const ChewAnnotation*>> groups;
  for (const auto& c : chews) groups[{c.recording_id, c.bout_id}].push_back(&c);

  std::vector<BoutAnnotation> bouts;
  bouts.reserve(groups.size());
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end(),
              [](const auto* a, const auto* b) { return a->start_s < b->start_s; });
    BoutAnnotation bout;
    bout.recording_id = key.first;
    bout.bout_id = key.second;
    bout.start_s = members.front()->start_s;
    bout.stop_s = members.back()->stop_s;
    for (const auto* m : members) bout.chew_ids.push_back(m->chew_id);
    bouts.push_back(std::move(bout));
  }
  return bouts;
}

// ---------------------------------------------------------------------------
// Labels

LabelTable builtin_label_table() {
  return {
      {"apple", {true, true, false}},
      {"banana", {false, true, false}},
      {"bread", {false, false, false}},
      {"candy_bar", {false, false, true}},
      {"cookie", {true, false, false}},
      {"lettuce", {true, true, false}},
      {"potato_chips", {true, false, false}},
      {"strawberry", {false, true, false}},
      {"toffee", {false, false, true}},
  };
}

LabelTable parse_label_table(std::istream& in) {
  static const std::vector<std::string> kHeader = {"food_type", "crispy", "wet", "chewy"};
  auto flag = [](const std::string& s) {
    require(s == "0" || s == "1", ErrorKind::kFormat, "label flag must be 0 or 1, got '" + s + "'");
    return s == "1";
  };
  LabelTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv(line);
    if (!header_seen) {
      require(fields == kHeader, ErrorKind::kFormat,
              "label header must be food_type,crispy,wet,chewy");
      header_seen = true;
      continue;
    }
    require(fields.size() == 4, ErrorKind::kFormat, "label row must have 4 fields");
    require(table.emplace(fields[0], AttributeLabels{flag(fields[1]), flag(fields[2]),
                                                     flag(fields[3])})
                .second,
            ErrorKind::kFormat, "duplicate food type '" + fields[0] + "'");
  }
  require(header_seen, ErrorKind::kFormat, "label table is empty");
  return table;
}

LabelTable load_label_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(in.good(), ErrorKind::kIo, "cannot open " + path.string());
  return parse_label_table(in);
}

void write_label_table(std::ostream& out, const LabelTable& table) {
  out << "food_type,crispy,wet,chewy\n";
  for (const auto& [food, l] : table) {
    out << food << ',' << int{l.crispy} << ',' << int{l.wet} << ',' << int{l.chewy} << '\n';
  }
}

// ---------------------------------------------------------------------------
// Corpus directories

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir,
                  const SynthConfig* generator) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec && fs::is_directory(dir), ErrorKind::kIo,
          "cannot create directory " + dir.string());

  nlohmann::json manifest;
  manifest["schema"] = kManifestSchema;
  manifest["annotations"] = "annotations.csv";
  manifest["labels"] = "labels.csv";
  if (generator != nullptr) {
    manifest["seed"] = generator->seed;
    manifest["generator"] = {
        {"n_subjects", generator->n_subjects},
        {"sample_rate", generator->sample_rate},
        {"bouts_per_recording", generator->bouts_per_recording},
        {"chews_per_bout_mean", generator->chews_per_bout_mean},
        {"chews_per_bout_std", generator->chews_per_bout_std},
        {"chews_per_bout_min", generator->chews_per_bout_min},
        {"gap_mean_s", generator->gap_mean_s},
        {"gap_std_s", generator->gap_std_s},
        {"padding_s", generator->padding_s},
        {"inter_bout_s", generator->inter_bout_s},
        {"snr_db", generator->snr_db},
    };
  }
  auto recs = nlohmann::json::array();
  for (const auto& rec : corpus.recordings) {
    const std::string file = rec.id() + ".wav";
    write_wav(dir / file, rec);
    recs.push_back({{"id", rec.id()},
                    {"subject", rec.subject_id},
                    {"food_type", rec.food_type},
                    {"file", file},
                    {"sample_rate", rec.sample_rate},
                    {"num_samples", rec.samples.size()}});
  }
  manifest["recordings"] = std::move(recs);

  auto open = [&](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    require(out.good(), ErrorKind::kIo, "cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "annotations.csv");
    write_annotations(out, corpus.chews);
  }
  {
    auto out = open(dir / "labels.csv");
    write_label_table(out, corpus.labels);
  }
  {
    auto out = open(dir / "manifest.json");
    out << manifest.dump(2) << '\n';
  }
}

Corpus load_corpus(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  require(in.good(), ErrorKind::kIo, "cannot open " + (dir / "manifest.json").string());
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("manifest.json: ") + e.what());
  }
  require(manifest.value("schema", "") == kManifestSchema, ErrorKind::kSchema,
          "manifest schema must be " + std::string(kManifestSchema));

  Corpus corpus;
  try {
    for (const auto& entry : manifest.at("recordings")) {
      AudioRecording rec = load_wav(dir / entry.at("file").get<std::string>());
      rec.subject_id = entry.at("subject").get<std::string>();
      rec.food_type = entry.at("food_type").get<std::string>();
      if (entry.contains("id")) {
        require(entry.at("id").get<std::string>() == rec.id(), ErrorKind::kFormat,
                "manifest id '" + entry.at("id").get<std::string>() +
                    "' does not match subject/food '" + rec.id() + "'");
      }
      corpus.recordings.push_back(std::move(rec));
    }
    corpus.chews = load_annotations(dir / manifest.value("annotations", "annotations.csv"));
    const auto labels_path = dir / manifest.value("labels", "labels.csv");
    corpus.labels = std::filesystem::exists(labels_path) ? load_label_table(labels_path)
                                                         : builtin_label_table();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::kFormat, std::string("manifest.json: ") + e.what());
  }
  corpus.bouts = derive_bouts(corpus.chews);
  corpus.validate();
  return corpus;
}

}  // namespace chewtex
