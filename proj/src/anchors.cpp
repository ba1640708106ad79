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

#include "beekit/anchors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "beekit/errors.hpp"
#include "beekit/format.hpp"
#include "text_util.hpp"

namespace beekit {

namespace {

std::vector<SsdLayerConfig> layers_300(std::array<int, 6> fms) {
  const std::array<int, 6> shrink{16, 32, 64, 100, 150, 300};
  const std::array<std::pair<double, double>, 6> sizes{{
      {15, 30}, {30, 60}, {60, 105}, {105, 150}, {150, 195}, {195, 240},
  }};
  const std::array<int, 6> per_cell{4, 6, 6, 6, 4, 4};
  std::vector<SsdLayerConfig> layers(6);
  for (std::size_t i = 0; i < 6; ++i) {
    layers[i].feature_map_size = fms[i];
    layers[i].shrinkage = shrink[i];
    layers[i].box_min = sizes[i].first;
    layers[i].box_max = sizes[i].second;
    layers[i].boxes_per_cell = per_cell[i];
    layers[i].aspect_ratios =
        per_cell[i] == 6 ? std::vector<double>{1, 2, 3}
                         : std::vector<double>{1, 2};
  }
  return layers;
}

void validate_layer(const SsdLayerConfig& layer, std::size_t idx) {
  const std::string where = "ssd layer " + std::to_string(idx) + ": ";
  if (layer.feature_map_size < 1) {
    throw ConfigError(where + "feature map size must be positive");
  }
  if (!(layer.box_min > 0) || !(layer.box_min < layer.box_max)) {
    throw ConfigError(where + "box sizes must satisfy 0 < min < max");
  }
  if (layer.boxes_per_cell != 4 && layer.boxes_per_cell != 6) {
    throw ConfigError(where + "boxes_per_cell must be 4 or 6");
  }
  int stretched = 0;
  for (const double r : layer.aspect_ratios) {
    if (!(r >= 1.0)) {
      throw ConfigError(where + "aspect ratios must be >= 1");
    }
    stretched += r > 1.0;
  }
  if (2 + 2 * stretched != layer.boxes_per_cell) {
    throw ConfigError(where + "ratio list yields " +
                      std::to_string(2 + 2 * stretched) +
                      " boxes per cell, config says " +
                      std::to_string(layer.boxes_per_cell));
  }
}

NormCenterBox clipped_prior(double cx, double cy, double w, double h) {
  const double x0 = std::clamp(cx - w / 2, 0.0, 1.0);
  const double x1 = std::clamp(cx + w / 2, 0.0, 1.0);
  const double y0 = std::clamp(cy - h / 2, 0.0, 1.0);
  const double y1 = std::clamp(cy + h / 2, 0.0, 1.0);
  return NormCenterBox{(x0 + x1) / 2, (y0 + y1) / 2, x1 - x0, y1 - y0};
}

// IoU of two boxes sharing a center, by side lengths.
double concentric_iou(double w1, double h1, double w2, double h2) {
  const double inter = std::min(w1, w2) * std::min(h1, h2);
  const double uni = w1 * h1 + w2 * h2 - inter;
  return uni > 0 ? inter / uni : 0.0;
}

}  // namespace

YoloAnchorConfig YoloAnchorConfig::defaults() {
  YoloAnchorConfig cfg;
  cfg.input_size = 640;
  cfg.scales = {
      {8, {{{10, 13}, {16, 30}, {33, 23}}}},
      {16, {{{30, 61}, {62, 45}, {59, 119}}}},
      {32, {{{116, 90}, {156, 198}, {373, 326}}}},
  };
  return cfg;
}

std::vector<std::array<int, 4>> yolo_grid_shapes(const YoloAnchorConfig& cfg,
                                                 int num_classes) {
  if (num_classes < 1) throw ConfigError("num_classes must be positive");
  std::vector<std::array<int, 4>> shapes;
  for (const auto& scale : cfg.scales) {
    if (scale.stride < 1 || cfg.input_size % scale.stride != 0) {
      throw ConfigError("input size " + std::to_string(cfg.input_size) +
                        " is not divisible by stride " +
                        std::to_string(scale.stride));
    }
    const int s = cfg.input_size / scale.stride;
    shapes.push_back({static_cast<int>(scale.anchors.size()), s, s,
                      num_classes + 5});
  }
  return shapes;
}

std::int64_t yolo_total_predictions(const YoloAnchorConfig& cfg) {
  std::int64_t total = 0;
  for (const auto& shape : yolo_grid_shapes(cfg, 1)) {
    total += static_cast<std::int64_t>(shape[0]) * shape[1] * shape[2];
  }
  return total;
}

std::vector<SsdLayerConfig> parse_ssd_layer_config(std::string_view text) {
  std::vector<SsdLayerConfig> layers;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line_no = std::to_string(i + 1);
    if (lines[i].empty() || lines[i][0] == '#') continue;
    const auto tokens = detail::tokenize(lines[i]);
    if (tokens.size() != 6) {
      throw ParseError("line " + line_no +
                       ": expected `fm shrinkage min max ratios per_cell`");
    }
    SsdLayerConfig layer;
    const auto fm = detail::parse_int(tokens[0]);
    const auto shrink = detail::parse_int(tokens[1]);
    const auto lo = detail::parse_double(tokens[2]);
    const auto hi = detail::parse_double(tokens[3]);
    const auto per_cell = detail::parse_int(tokens[5]);
    if (!fm || !shrink || !lo || !hi || !per_cell) {
      throw ParseError("line " + line_no + ": bad numeric field");
    }
    layer.feature_map_size = static_cast<int>(*fm);
    layer.shrinkage = static_cast<int>(*shrink);
    layer.box_min = *lo;
    layer.box_max = *hi;
    layer.boxes_per_cell = static_cast<int>(*per_cell);
    for (const auto part : detail::split_fields(tokens[4], ',')) {
      const auto r = detail::parse_double(part);
      if (!r) {
        throw ParseError("line " + line_no + ": bad ratio '" +
                         std::string(part) + "'");
      }
      layer.aspect_ratios.push_back(*r);
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::string serialize_ssd_layer_config(
    std::span<const SsdLayerConfig> layers) {
  std::string out;
  for (const auto& layer : layers) {
    out += std::to_string(layer.feature_map_size);
    out += ' ';
    out += std::to_string(layer.shrinkage);
    out += ' ';
    out += format_fixed(layer.box_min, 1);
    out += ' ';
    out += format_fixed(layer.box_max, 1);
    out += ' ';
    for (std::size_t i = 0; i < layer.aspect_ratios.size(); ++i) {
      if (i) out += ',';
      out += format_fixed(layer.aspect_ratios[i], 0);
    }
    out += ' ';
    out += std::to_string(layer.boxes_per_cell);
    out += '\n';
  }
  return out;
}

std::vector<SsdLayerConfig> vgg300_layers() {
  return layers_300({38, 19, 10, 5, 3, 1});
}

std::vector<SsdLayerConfig> mobilenet300_layers() {
  return layers_300({19, 10, 5, 3, 2, 1});
}

std::vector<PriorBox> ssd_priors(std::span<const SsdLayerConfig> layers,
                                 int input_size) {
  if (input_size < 1) throw ConfigError("input size must be positive");
  for (std::size_t i = 0; i < layers.size(); ++i) validate_layer(layers[i], i);

  std::vector<PriorBox> priors;
  priors.reserve(static_cast<std::size_t>(ssd_prior_count(layers)));
  for (std::size_t li = 0; li < layers.size(); ++li) {
    const auto& layer = layers[li];
    const int fm = layer.feature_map_size;
    const double s_min = layer.box_min / input_size;
    const double s_big =
        std::sqrt(layer.box_min * layer.box_max) / input_size;

    std::vector<double> stretched;
    for (const double r : layer.aspect_ratios) {
      if (r > 1.0) stretched.push_back(r);
    }
    std::sort(stretched.begin(), stretched.end());

    for (int i = 0; i < fm; ++i) {
      for (int j = 0; j < fm; ++j) {
        const double cx = (j + 0.5) / fm;
        const double cy = (i + 0.5) / fm;
        int slot = 0;
        const auto emit = [&](double w, double h) {
          priors.push_back(PriorBox{clipped_prior(cx, cy, w, h),
                                    static_cast<int>(li), i, j, slot++});
        };
        emit(s_min, s_min);
        emit(s_big, s_big);
        for (const double r : stretched) {
          const double root = std::sqrt(r);
          emit(s_min * root, s_min / root);
          emit(s_min / root, s_min * root);
        }
      }
    }
  }
  return priors;
}

std::int64_t ssd_prior_count(std::span<const SsdLayerConfig> layers) {
  std::int64_t total = 0;
  for (const auto& layer : layers) {
    total += static_cast<std::int64_t>(layer.feature_map_size) *
             layer.feature_map_size * layer.boxes_per_cell;
  }
  return total;
}

std::vector<MiteFit> mite_anchor_fit(std::span<const PriorBox> priors,
                                     int input_size,
                                     std::pair<double, double> mite_range) {
  std::vector<MiteFit> report;
  if (priors.empty()) return report;
  // The report compares sizes, so boxes deformed by frame clipping are
  // skipped; otherwise a truncated corner prior can masquerade as a better
  // size match than any configured box.
  const auto clipped = [](const NormCenterBox& b) {
    return b.cx - b.w / 2 <= 1e-12 || b.cx + b.w / 2 >= 1.0 - 1e-12 ||
           b.cy - b.h / 2 <= 1e-12 || b.cy + b.h / 2 >= 1.0 - 1e-12;
  };
  for (const double px : {mite_range.first, mite_range.second}) {
    MiteFit fit;
    fit.mite_px = px;
    const double side = px / input_size;
    std::map<int, double> per_layer;
    for (const auto& prior : priors) {
      if (clipped(prior.box)) continue;
      const double iou =
          concentric_iou(prior.box.w, prior.box.h, side, side);
      auto [it, inserted] = per_layer.try_emplace(prior.layer, iou);
      if (!inserted) it->second = std::max(it->second, iou);
      if (iou > fit.best_iou) {
        fit.best_iou = iou;
        fit.best_layer = prior.layer;
      }
    }
    fit.layer_best.assign(per_layer.begin(), per_layer.end());
    report.push_back(std::move(fit));
  }
  return report;
}

}  // namespace beekit
