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

#include "beekit/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>
#include <utility>

#include "beekit/errors.hpp"
#include "beekit/format.hpp"

namespace beekit {

namespace {

void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

bool merge_before(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (a.image_id != b.image_id) return a.image_id < b.image_id;
  return box_less(a.box, b.box);
}

struct ImageGroup {
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
};

// Matches each image independently; flags follow the global canonical
// order (confidence descending, image id, box), paired with detections.
struct SweepEntry {
  Detection det;
  bool tp = false;
};

std::vector<SweepEntry> sweep_entries(
    const std::vector<Detection>& detections,
    const std::vector<GroundTruth>& ground_truths, double iou_threshold,
    int threads) {
  std::map<std::string, ImageGroup> groups;
  for (const auto& d : detections) groups[d.image_id].dets.push_back(d);
  for (const auto& g : ground_truths) groups[g.image_id].gts.push_back(g);

  std::vector<ImageGroup*> tasks;
  for (auto& [id, group] : groups) tasks.push_back(&group);

  std::vector<std::vector<SweepEntry>> per_image(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    const ImageGroup& group = *tasks[i];
    const MatchResult result = match(group.dets, group.gts, iou_threshold);
    std::vector<bool> flags(group.dets.size(), false);
    for (const auto& tp : result.true_positives) flags[tp.detection] = true;
    auto& out = per_image[i];
    out.reserve(group.dets.size());
    for (std::size_t d = 0; d < group.dets.size(); ++d) {
      out.push_back(SweepEntry{group.dets[d], flags[d]});
    }
  });

  std::vector<SweepEntry> merged;
  merged.reserve(detections.size());
  for (const auto& image_entries : per_image) {
    merged.insert(merged.end(), image_entries.begin(), image_entries.end());
  }
  std::sort(merged.begin(), merged.end(),
            [](const SweepEntry& a, const SweepEntry& b) {
              return merge_before(a.det, b.det);
            });
  return merged;
}

std::vector<PRPoint> points_from_entries(const std::vector<SweepEntry>& entries,
                                         std::int64_t total_gt) {
  std::vector<PRPoint> points;
  points.reserve(entries.size());
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (const auto& entry : entries) {
    if (entry.tp) {
      ++tp;
    } else {
      ++fp;
    }
    PRPoint point;
    point.confidence = entry.det.confidence;
    point.tp = tp;
    point.fp = fp;
    point.fn = total_gt - tp;
    const MatchCounts counts{tp, fp, point.fn};
    const PrecisionRecall pr = precision_recall(counts);
    point.precision = pr.precision;
    point.recall = pr.recall;
    points.push_back(point);
  }
  return points;
}

double ap_from_points(const std::vector<PRPoint>& points, std::int64_t total_gt,
                      ApMethod method) {
  if (total_gt <= 0 || points.empty()) return 0.0;

  std::vector<double> envelope(points.size());
  double running = 0.0;
  for (std::size_t i = points.size(); i-- > 0;) {
    running = std::max(running, points[i].precision);
    envelope[i] = running;
  }

  if (method == ApMethod::kElevenPoint) {
    double sum = 0.0;
    for (int t = 0; t <= 10; ++t) {
      const double grid = static_cast<double>(t) / 10.0;
      double best = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].recall >= grid) {
          best = envelope[i];
          break;
        }
      }
      sum += best;
    }
    return sum / 11.0;
  }

  double sum = 0.0;
  std::int64_t prev_tp = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].tp > prev_tp) {
      sum += envelope[i];
      prev_tp = points[i].tp;
    }
  }
  return sum / static_cast<double>(total_gt);
}

void validate_eval_config(int num_classes, int threads) {
  if (num_classes < 1) {
    throw ConfigError("num_classes must be at least 1");
  }
  if (threads < 1) {
    throw ConfigError("threads must be at least 1");
  }
}

void validate_class_ids(const std::vector<Detection>& detections,
                        const std::vector<GroundTruth>& ground_truths,
                        int num_classes) {
  for (const auto& d : detections) {
    if (d.class_id < 0 || d.class_id >= num_classes) {
      throw ValidationError("detection class id out of range: " +
                            std::to_string(d.class_id));
    }
  }
  for (const auto& g : ground_truths) {
    if (g.class_id < 0 || g.class_id >= num_classes) {
      throw ValidationError("ground-truth class id out of range: " +
                            std::to_string(g.class_id));
    }
  }
}

struct ClassSlice {
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
};

std::vector<ClassSlice> slice_by_class(
    const std::vector<Detection>& detections,
    const std::vector<GroundTruth>& ground_truths, int num_classes) {
  std::vector<ClassSlice> slices(static_cast<std::size_t>(num_classes));
  for (const auto& d : detections) {
    slices[static_cast<std::size_t>(d.class_id)].dets.push_back(d);
  }
  for (const auto& g : ground_truths) {
    slices[static_cast<std::size_t>(g.class_id)].gts.push_back(g);
  }
  return slices;
}

}  // namespace

MatchCounts MatchResult::counts() const {
  return MatchCounts{static_cast<std::int64_t>(true_positives.size()),
                     static_cast<std::int64_t>(false_positives.size()),
                     static_cast<std::int64_t>(false_negatives.size())};
}

MatchResult match(const std::vector<Detection>& detections,
                  const std::vector<GroundTruth>& ground_truths,
                  double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Detection& da = detections[a];
    const Detection& db = detections[b];
    if (da.confidence != db.confidence) return da.confidence > db.confidence;
    return box_less(da.box, db.box);
  });

  MatchResult result;
  std::vector<bool> gt_used(ground_truths.size(), false);
  for (const std::size_t d : order) {
    double best_iou = 0.0;
    std::size_t best_gt = ground_truths.size();
    for (std::size_t g = 0; g < ground_truths.size(); ++g) {
      if (gt_used[g]) continue;
      const double v = iou(detections[d].box, ground_truths[g].box);
      if (v >= iou_threshold && v > best_iou) {
        best_iou = v;
        best_gt = g;
      }
    }
    if (best_gt < ground_truths.size()) {
      gt_used[best_gt] = true;
      result.true_positives.push_back(MatchResult::TruePositive{d, best_gt});
    } else {
      result.false_positives.push_back(d);
    }
  }
  for (std::size_t g = 0; g < ground_truths.size(); ++g) {
    if (!gt_used[g]) result.false_negatives.push_back(g);
  }
  return result;
}

PrecisionRecall precision_recall(const MatchCounts& counts) {
  PrecisionRecall pr;
  const std::int64_t detected = counts.tp + counts.fp;
  const std::int64_t actual = counts.tp + counts.fn;
  pr.precision = detected > 0
                     ? static_cast<double>(counts.tp) /
                           static_cast<double>(detected)
                     : 0.0;
  pr.recall = actual > 0 ? static_cast<double>(counts.tp) /
                               static_cast<double>(actual)
                         : 0.0;
  return pr;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  if (denom <= 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

std::vector<PRPoint> pr_curve(const std::vector<Detection>& detections,
                              const std::vector<GroundTruth>& ground_truths,
                              double iou_threshold, int threads) {
  if (threads < 1) throw ConfigError("threads must be at least 1");
  const auto entries =
      sweep_entries(detections, ground_truths, iou_threshold, threads);
  return points_from_entries(entries,
                             static_cast<std::int64_t>(ground_truths.size()));
}

std::string serialize_pr_curve(const std::vector<PRPoint>& points) {
  std::string out = "confidence,tp,fp,fn,precision,recall\n";
  for (const auto& p : points) {
    out += format_fixed(p.confidence, 6);
    out += ',';
    out += std::to_string(p.tp);
    out += ',';
    out += std::to_string(p.fp);
    out += ',';
    out += std::to_string(p.fn);
    out += ',';
    out += format_fixed(p.precision, 6);
    out += ',';
    out += format_fixed(p.recall, 6);
    out += '\n';
  }
  return out;
}

double average_precision(const std::vector<Detection>& detections,
                         const std::vector<GroundTruth>& ground_truths,
                         double iou_threshold, ApMethod method, int threads) {
  const auto points =
      pr_curve(detections, ground_truths, iou_threshold, threads);
  return ap_from_points(points,
                        static_cast<std::int64_t>(ground_truths.size()),
                        method);
}

std::vector<double> map_iou_thresholds() {
  std::vector<double> taus;
  taus.reserve(10);
  for (int i = 0; i < 10; ++i) {
    taus.push_back(static_cast<double>(50 + 5 * i) / 100.0);
  }
  return taus;
}

MapScores map_range(const std::vector<Detection>& detections,
                    const std::vector<GroundTruth>& ground_truths,
                    int num_classes, ApMethod method, int threads) {
  validate_eval_config(num_classes, threads);
  validate_class_ids(detections, ground_truths, num_classes);
  const auto slices = slice_by_class(detections, ground_truths, num_classes);
  const auto taus = map_iou_thresholds();

  MapScores scores;
  for (const auto& slice : slices) {
    double sum = 0.0;
    double ap50 = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double ap =
          average_precision(slice.dets, slice.gts, taus[i], method, threads);
      if (i == 0) ap50 = ap;
      sum += ap;
    }
    scores.map50 += ap50;
    scores.map_range += sum / static_cast<double>(taus.size());
  }
  scores.map50 /= static_cast<double>(num_classes);
  scores.map_range /= static_cast<double>(num_classes);
  return scores;
}

EvalReport evaluate(const std::vector<Detection>& detections,
                    const std::vector<GroundTruth>& ground_truths,
                    int num_classes, const EvalParams& params) {
  validate_eval_config(num_classes, params.threads);
  if (params.match_iou < 0.0 || params.match_iou > 1.0) {
    throw ConfigError("match_iou must lie in [0, 1]");
  }
  validate_class_ids(detections, ground_truths, num_classes);
  const auto slices = slice_by_class(detections, ground_truths, num_classes);
  const auto taus = map_iou_thresholds();

  EvalReport report;
  report.classes.reserve(slices.size());
  for (int c = 0; c < num_classes; ++c) {
    const ClassSlice& slice = slices[static_cast<std::size_t>(c)];
    ClassEval eval;
    eval.class_id = c;
    eval.gt_count = static_cast<std::int64_t>(slice.gts.size());

    const auto entries =
        sweep_entries(slice.dets, slice.gts, params.match_iou, params.threads);
    std::int64_t tp = 0;
    for (const auto& entry : entries) {
      if (entry.tp) ++tp;
    }
    eval.counts.tp = tp;
    eval.counts.fp = static_cast<std::int64_t>(entries.size()) - tp;
    eval.counts.fn = eval.gt_count - tp;
    const PrecisionRecall pr = precision_recall(eval.counts);
    eval.precision = pr.precision;
    eval.recall = pr.recall;
    eval.f1 = f1_score(pr.precision, pr.recall);

    double sum = 0.0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const double ap = average_precision(slice.dets, slice.gts, taus[i],
                                          params.ap_method, params.threads);
      if (i == 0) eval.ap50 = ap;
      sum += ap;
    }
    eval.ap_range = sum / static_cast<double>(taus.size());

    report.classes.push_back(eval);
  }

  MacroEval& macro = report.macro;
  for (const auto& eval : report.classes) {
    macro.precision += eval.precision;
    macro.recall += eval.recall;
    macro.f1 += eval.f1;
    macro.map50 += eval.ap50;
    macro.map_range += eval.ap_range;
  }
  const double n = static_cast<double>(num_classes);
  macro.precision /= n;
  macro.recall /= n;
  macro.f1 /= n;
  macro.map50 /= n;
  macro.map_range /= n;
  return report;
}

}  // namespace beekit
