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

#include "support/oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "beekit/geometry.hpp"

namespace testsupport {

namespace {

using beekit::Detection;
using beekit::GroundTruth;

std::tuple<double, double, double, double> box_key(
    const beekit::BoundingBox& b) {
  return {b.x_min, b.y_min, b.x_max, b.y_max};
}

int max_matching_rec(const std::vector<std::vector<bool>>& feasible,
                     std::size_t det, unsigned used_mask) {
  if (det == feasible.size()) return 0;
  int best = max_matching_rec(feasible, det + 1, used_mask);
  for (std::size_t g = 0; g < feasible[det].size(); ++g) {
    if (feasible[det][g] && !(used_mask & (1u << g))) {
      best = std::max(
          best, 1 + max_matching_rec(feasible, det + 1, used_mask | (1u << g)));
    }
  }
  return best;
}

}  // namespace

int max_matching_tp(const std::vector<Detection>& dets,
                    const std::vector<GroundTruth>& gts, double tau) {
  std::vector<std::vector<bool>> feasible(dets.size(),
                                          std::vector<bool>(gts.size()));
  for (std::size_t d = 0; d < dets.size(); ++d) {
    for (std::size_t g = 0; g < gts.size(); ++g) {
      feasible[d][g] = beekit::iou(dets[d].box, gts[g].box) >= tau;
    }
  }
  return max_matching_rec(feasible, 0, 0);
}

std::vector<bool> greedy_tp_flags(const std::vector<Detection>& dets,
                                  const std::vector<GroundTruth>& gts,
                                  double tau) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dets[a].confidence != dets[b].confidence) {
                       return dets[a].confidence > dets[b].confidence;
                     }
                     return box_key(dets[a].box) < box_key(dets[b].box);
                   });
  std::vector<bool> gt_used(gts.size(), false);
  std::vector<bool> flags(dets.size(), false);
  for (const std::size_t d : order) {
    double best_iou = 0;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (gt_used[g]) continue;
      const double v = beekit::iou(dets[d].box, gts[g].box);
      if (v >= tau && v > best_iou) {
        best_iou = v;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      gt_used[best_gt] = true;
      flags[d] = true;
    }
  }
  return flags;
}

std::vector<OraclePrefixPoint> oracle_sweep(
    const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
    double tau) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     if (dets[a].confidence != dets[b].confidence) {
                       return dets[a].confidence > dets[b].confidence;
                     }
                     if (dets[a].image_id != dets[b].image_id) {
                       return dets[a].image_id < dets[b].image_id;
                     }
                     return box_key(dets[a].box) < box_key(dets[b].box);
                   });

  const double total_gt = static_cast<double>(gts.size());
  std::vector<OraclePrefixPoint> points;
  for (std::size_t k = 1; k <= order.size(); ++k) {
    std::map<std::string, std::vector<Detection>> dets_by_image;
    for (std::size_t i = 0; i < k; ++i) {
      const Detection& d = dets[order[i]];
      dets_by_image[d.image_id].push_back(d);
    }
    long long tp = 0;
    for (const auto& [image_id, image_dets] : dets_by_image) {
      std::vector<GroundTruth> image_gts;
      for (const auto& g : gts) {
        if (g.image_id == image_id) image_gts.push_back(g);
      }
      for (const bool flag : greedy_tp_flags(image_dets, image_gts, tau)) {
        if (flag) ++tp;
      }
    }
    OraclePrefixPoint point;
    point.rank = k;
    point.tp = tp;
    point.fp = static_cast<long long>(k) - tp;
    point.precision = static_cast<double>(tp) / static_cast<double>(k);
    point.recall =
        total_gt > 0 ? static_cast<double>(tp) / total_gt : 0.0;
    points.push_back(point);
  }
  return points;
}

double oracle_average_precision(const std::vector<Detection>& dets,
                                const std::vector<GroundTruth>& gts,
                                double tau, bool eleven_point) {
  if (gts.empty()) return 0.0;
  const auto points = oracle_sweep(dets, gts, tau);

  const auto envelope_at = [&](double recall) {
    double best = 0.0;
    for (const auto& p : points) {
      if (p.recall >= recall) best = std::max(best, p.precision);
    }
    return best;
  };

  if (eleven_point) {
    double sum = 0.0;
    for (int t = 0; t <= 10; ++t) {
      sum += envelope_at(static_cast<double>(t) / 10.0);
    }
    return sum / 11.0;
  }

  double ap = 0.0;
  double prev_recall = 0.0;
  for (const auto& p : points) {
    if (p.recall > prev_recall) {
      ap += (p.recall - prev_recall) * envelope_at(p.recall);
      prev_recall = p.recall;
    }
  }
  return ap;
}

}  // namespace testsupport
