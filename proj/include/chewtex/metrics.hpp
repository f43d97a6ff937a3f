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

#include <cstdint>
#include <optional>

namespace chewtex {

/// Binary confusion counts; "positive" is the attribute being present.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t positives() const { return tp + fn; }
  std::int64_t negatives() const { return tn + fp; }
  std::int64_t total() const { return tp + fp + tn + fn; }

  void add(bool truth, bool predicted) {
    if (truth) {
      predicted ? ++tp : ++fn;
    } else {
      predicted ? ++fp : ++tn;
    }
  }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    tn += o.tn;
    fn += o.fn;
    return *this;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

/// Ratio of priors w = (TN + FP) / (TP + FN); empty when no positives.
inline std::optional<double> prior_ratio(const ConfusionCounts& c) {
  if (c.positives() == 0) return std::nullopt;
  return static_cast<double>(c.negatives()) / static_cast<double>(c.positives());
}

/// Positive-class fraction of the evaluated units.
inline std::optional<double> positive_prior(const ConfusionCounts& c) {
  if (c.total() == 0) return std::nullopt;
  return static_cast<double>(c.positives()) / static_cast<double>(c.total());
}

/// (w TP + TN) / (w (TP + FN) + TN + FP). Undefined (empty) unless both
/// classes are present among the evaluated units.
inline std::optional<double> weighted_accuracy(const ConfusionCounts& c) {
  if (c.positives() == 0 || c.negatives() == 0) return std::nullopt;
  const double w = *prior_ratio(c);
  return (w * static_cast<double>(c.tp) + static_cast<double>(c.tn)) /
         (w * static_cast<double>(c.positives()) + static_cast<double>(c.negatives()));
}

}  // namespace chewtex
