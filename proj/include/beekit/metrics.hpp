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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "beekit/decode.hpp"
#include "beekit/geometry.hpp"

namespace beekit {

// One labeled box in pixel space.
struct GroundTruth {
  std::string image_id;
  int class_id = 0;
  BoundingBox box;
};

struct MatchCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
};

// Outcome of matching one image-and-class group at a fixed IoU level.
// Detection ids index the input detection vector; ground-truth ids index
// the input ground-truth vector. True positives and false positives are
// listed in processing order (confidence descending, ties by box);
// false negatives keep ground-truth input order.
struct MatchResult {
  struct TruePositive {
    std::size_t detection = 0;
    std::size_t ground_truth = 0;
  };
  std::vector<TruePositive> true_positives;
  std::vector<std::size_t> false_positives;
  std::vector<std::size_t> false_negatives;

  MatchCounts counts() const;
};

// Greedy matcher: detections in confidence-descending order each take the
// highest-IoU unmatched ground truth at or above the threshold; IoU ties
// resolve to the earlier ground truth. Inputs must already be one
// image-and-class group.
MatchResult match(const std::vector<Detection>& detections,
                  const std::vector<GroundTruth>& ground_truths,
                  double iou_threshold);

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
};

// Empty denominators yield 0.
PrecisionRecall precision_recall(const MatchCounts& counts);
double f1_score(double precision, double recall);

// One confidence-sweep step across the whole split for one class.
struct PRPoint {
  double confidence = 0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  double precision = 0;
  double recall = 0;
};

std::vector<PRPoint> pr_curve(const std::vector<Detection>& detections,
                              const std::vector<GroundTruth>& ground_truths,
                              double iou_threshold, int threads = 1);

// CSV with a "confidence,tp,fp,fn,precision,recall" header row.
std::string serialize_pr_curve(const std::vector<PRPoint>& points);

enum class ApMethod {
  kAllPoints,
  kElevenPoint,
};

double average_precision(const std::vector<Detection>& detections,
                         const std::vector<GroundTruth>& ground_truths,
                         double iou_threshold,
                         ApMethod method = ApMethod::kAllPoints,
                         int threads = 1);

// The ten IoU levels 0.50, 0.55, ... 0.95.
std::vector<double> map_iou_thresholds();

struct MapScores {
  double map50 = 0;
  double map_range = 0;
};

// Unweighted class means of AP at 0.5 and of AP averaged over the ten
// IoU levels. Classes are 0 .. num_classes-1.
MapScores map_range(const std::vector<Detection>& detections,
                    const std::vector<GroundTruth>& ground_truths,
                    int num_classes, ApMethod method = ApMethod::kAllPoints,
                    int threads = 1);

struct EvalParams {
  double match_iou = 0.5;
  ApMethod ap_method = ApMethod::kAllPoints;
  int threads = 1;
};

struct ClassEval {
  int class_id = 0;
  std::int64_t gt_count = 0;
  MatchCounts counts;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double ap50 = 0;
  double ap_range = 0;
};

struct MacroEval {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double map50 = 0;
  double map_range = 0;
};

struct EvalReport {
  std::vector<ClassEval> classes;
  MacroEval macro;
};

// Full per-class evaluation plus unweighted macro averages.
EvalReport evaluate(const std::vector<Detection>& detections,
                    const std::vector<GroundTruth>& ground_truths,
                    int num_classes, const EvalParams& params = {});

}  // namespace beekit
