// Copyright 2026 The Beekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "beekit/dataset.hpp"
#include "beekit/decode.hpp"
#include "beekit/metrics.hpp"

namespace beekit {

std::string_view ap_method_name(ApMethod method);
ApMethod ap_method_from_name(std::string_view name);

struct RunConfig {
  DatasetVariant variant{};
  std::string architecture;
  double confidence_threshold = 0.4;
  double nms_iou_threshold = 0.45;
  ApMethod ap_method = ApMethod::kAllPoints;
  std::string dataset_path;
  std::string detections_path;

  // ConfigError when a threshold leaves [0, 1].
  void validate() const;
};

// Fixed-width result table: one row per variant class with scores at three
// decimals (half-up), plus an unweighted average row when the variant has
// more than one class. The report must cover exactly the variant's classes.
std::string render_table(const EvalReport& report, const RunConfig& config);

// Self-describing JSON record with the run configuration and every table
// figure at full precision. Byte-identical for identical inputs.
std::string run_record(const EvalReport& report, const RunConfig& config);

struct InfestationSummary {
  DatasetVariant variant{};
  // Detection counts aligned with the variant's class names.
  std::vector<std::int64_t> class_counts;
  // infected/(healthy+infected) for healthy-ill, mites/bees for bees-mites;
  // absent when the denominator is zero or the variant has no bee counts.
  std::optional<double> ratio;
};

// Counts detections by class and derives the variant's infestation figure.
// The all-classes variant is not summarized.
InfestationSummary infestation(const std::vector<Detection>& detections,
                               const DatasetVariant& variant);

std::string render_infestation(const InfestationSummary& summary);

}  // namespace beekit
