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

// Anchor and prior-box generation: per-scale pixel anchors and grid shapes
// for the YOLO head, default-box (prior) synthesis from layer tables for the
// SSD head, and a small-object fit report.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "beekit/geometry.hpp"

namespace beekit {

struct YoloScale {
  int stride = 0;
  std::array<std::pair<double, double>, 3> anchors;  // pixel (w, h)
};

struct YoloAnchorConfig {
  int input_size = 640;
  std::vector<YoloScale> scales;

  // 640-input config with the stock anchor lists:
  //   stride 8: (10,13) (16,30) (33,23)
  //   stride 16: (30,61) (62,45) (59,119)
  //   stride 32: (116,90) (156,198) (373,326)
  static YoloAnchorConfig defaults();
};

// Output tensor shapes (anchors, S, S, num_classes+5), one per scale in
// config order. Throws ConfigError when a stride does not divide the input.
std::vector<std::array<int, 4>> yolo_grid_shapes(const YoloAnchorConfig& cfg,
                                                 int num_classes);

// Sum of anchors*S*S over the scales.
std::int64_t yolo_total_predictions(const YoloAnchorConfig& cfg);

struct SsdLayerConfig {
  int feature_map_size = 0;
  int shrinkage = 0;  // carried as metadata; not used for placement
  double box_min = 0;
  double box_max = 0;
  std::vector<double> aspect_ratios;  // ratio 1 covers the two square slots
  int boxes_per_cell = 0;
};

// Plain-text layer table, one row per layer:
//   fm shrinkage min max ratios per_cell
// where ratios is comma-separated, e.g. "1,2,3".
std::vector<SsdLayerConfig> parse_ssd_layer_config(std::string_view text);
std::string serialize_ssd_layer_config(std::span<const SsdLayerConfig> layers);

// The two built-in 300-input configurations.
std::vector<SsdLayerConfig> vgg300_layers();
std::vector<SsdLayerConfig> mobilenet300_layers();

struct PriorBox {
  NormCenterBox box;
  int layer = 0;
  int row = 0;
  int col = 0;
  int slot = 0;
};

// Per cell: a box_min/input square, a sqrt(box_min*box_max)/input square,
// then for each ratio r > 1 ascending the stretched pair (s*sqrt(r), s/sqrt(r))
// and (s/sqrt(r), s*sqrt(r)) with s = box_min/input. Corner-clipped to [0,1].
// Emission order is layer-major, then row, then column, then slot.
std::vector<PriorBox> ssd_priors(std::span<const SsdLayerConfig> layers,
                                 int input_size);

std::int64_t ssd_prior_count(std::span<const SsdLayerConfig> layers);

struct MiteFit {
  double mite_px = 0;
  double best_iou = 0;
  int best_layer = -1;
  std::vector<std::pair<int, double>> layer_best;  // (layer, max IoU)
};

// Best concentric IoU between square boxes at the ends of the given pixel
// size range and the prior set; one report entry per extreme.
std::vector<MiteFit> mite_anchor_fit(std::span<const PriorBox> priors,
                                     int input_size,
                                     std::pair<double, double> mite_range = {
                                         15.0, 25.0});

}  // namespace beekit
