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

#include "beekit/decode.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "beekit/errors.hpp"
#include "text_util.hpp"

namespace beekit {

namespace {

// The logistic function is strictly below 1 for finite input; keep that
// bound under rounding so a confidence threshold of 1 filters everything.
double sigmoid(double x) {
  return std::min(1.0 / (1.0 + std::exp(-x)), std::nextafter(1.0, 0.0));
}

BoundingBox clip_to(const BoundingBox& b, const ImageDims& dims) {
  return BoundingBox{
      std::clamp(b.x_min, 0.0, static_cast<double>(dims.width)),
      std::clamp(b.y_min, 0.0, static_cast<double>(dims.height)),
      std::clamp(b.x_max, 0.0, static_cast<double>(dims.width)),
      std::clamp(b.y_max, 0.0, static_cast<double>(dims.height)),
  };
}

bool det_before(const Detection& a, const Detection& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  if (!(a.box == b.box)) return box_less(a.box, b.box);
  if (a.class_id != b.class_id) return a.class_id < b.class_id;
  return a.image_id < b.image_id;
}

void check_finite(const RawTensor& t, const char* what) {
  for (const float v : t.values) {
    if (!std::isfinite(v)) {
      throw ValidationError(std::string(what) + " tensor holds a non-finite value");
    }
  }
}

}  // namespace

DecodeParams DecodeParams::yolo_defaults() {
  DecodeParams p;
  p.confidence_threshold = 0.4;
  return p;
}

DecodeParams DecodeParams::ssd_defaults() {
  DecodeParams p;
  p.confidence_threshold = 0.3;
  return p;
}

void sort_detections(std::vector<Detection>& dets) {
  std::sort(dets.begin(), dets.end(), det_before);
}

std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold) {
  for (const auto& d : dets) {
    if (d.image_id != dets.front().image_id ||
        d.class_id != dets.front().class_id) {
      throw ValidationError("nms input mixes images or classes");
    }
  }
  std::sort(dets.begin(), dets.end(),
            [](const Detection& a, const Detection& b) {
              if (a.confidence != b.confidence) {
                return a.confidence > b.confidence;
              }
              if (a.box.x_min != b.box.x_min) return a.box.x_min < b.box.x_min;
              return a.box.y_min < b.box.y_min;
            });
  std::vector<Detection> kept;
  std::vector<bool> removed(dets.size(), false);
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (removed[i]) continue;
    kept.push_back(dets[i]);
    for (std::size_t j = i + 1; j < dets.size(); ++j) {
      if (!removed[j] && iou(dets[i].box, dets[j].box) >= iou_threshold) {
        removed[j] = true;
      }
    }
  }
  return kept;
}

std::vector<Detection> per_class_nms(std::vector<Detection> dets,
                                     double iou_threshold) {
  std::map<std::pair<std::string, int>, std::vector<Detection>> groups;
  for (auto& d : dets) {
    groups[{d.image_id, d.class_id}].push_back(std::move(d));
  }
  std::vector<Detection> out;
  for (auto& [key, group] : groups) {
    auto survivors = nms(std::move(group), iou_threshold);
    out.insert(out.end(), std::make_move_iterator(survivors.begin()),
               std::make_move_iterator(survivors.end()));
  }
  sort_detections(out);
  return out;
}

std::vector<Detection> decode_yolo(std::span<const RawTensor> scales,
                                   const YoloAnchorConfig& cfg,
                                   const DecodeParams& params,
                                   const ImageDims& dims) {
  if (scales.size() != cfg.scales.size()) {
    throw ValidationError("expected " + std::to_string(cfg.scales.size()) +
                          " scale tensors, got " +
                          std::to_string(scales.size()));
  }
  int num_classes = -1;
  std::vector<Detection> dets;
  for (std::size_t si = 0; si < scales.size(); ++si) {
    const RawTensor& t = scales[si];
    const auto& scale = cfg.scales[si];
    if (scale.stride < 1 || cfg.input_size % scale.stride != 0) {
      throw ConfigError("input size is not divisible by stride " +
                        std::to_string(scale.stride));
    }
    const int s = cfg.input_size / scale.stride;
    if (t.layout != "A,H,W,C" || t.dims.size() != 4) {
      throw ValidationError("scale tensor must be layout A,H,W,C");
    }
    const int a_dim = t.dims[0];
    const int channels = t.dims[3];
    if (a_dim != static_cast<int>(scale.anchors.size()) || t.dims[1] != s ||
        t.dims[2] != s || channels < 6) {
      throw ValidationError(
          "scale tensor dims disagree with the anchor config (expected " +
          std::to_string(scale.anchors.size()) + "x" + std::to_string(s) +
          "x" + std::to_string(s) + "x(N+5))");
    }
    if (num_classes == -1) {
      num_classes = channels - 5;
    } else if (channels - 5 != num_classes) {
      throw ValidationError("scale tensors disagree on class count");
    }
    check_finite(t, "yolo");

    const auto value = [&](int a, int i, int j, int c) {
      return static_cast<double>(
          t.values[static_cast<std::size_t>(((a * s + i) * s + j) * channels +
                                            c)]);
    };

    for (int a = 0; a < a_dim; ++a) {
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) {
          const double objectness = sigmoid(value(a, i, j, 4));
          int best_class = 0;
          double best_prob = sigmoid(value(a, i, j, 5));
          for (int c = 1; c < num_classes; ++c) {
            const double prob = sigmoid(value(a, i, j, 5 + c));
            if (prob > best_prob) {
              best_prob = prob;
              best_class = c;
            }
          }
          const double confidence = objectness * best_prob;
          if (confidence < params.confidence_threshold) continue;

          const double cx =
              (j + 2 * sigmoid(value(a, i, j, 0)) - 0.5) * scale.stride;
          const double cy =
              (i + 2 * sigmoid(value(a, i, j, 1)) - 0.5) * scale.stride;
          const double sw = 2 * sigmoid(value(a, i, j, 2));
          const double sh = 2 * sigmoid(value(a, i, j, 3));
          const double w =
              scale.anchors[static_cast<std::size_t>(a)].first * sw * sw;
          const double h =
              scale.anchors[static_cast<std::size_t>(a)].second * sh * sh;

          Detection d;
          d.image_id = t.image_id;
          d.class_id = best_class;
          d.confidence = confidence;
          d.box = clip_to(
              BoundingBox{cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2},
              dims);
          dets.push_back(std::move(d));
        }
      }
    }
  }
  return per_class_nms(std::move(dets), params.nms_iou_threshold);
}

std::vector<Detection> decode_ssd(const RawTensor& locations,
                                  const RawTensor& scores,
                                  std::span<const PriorBox> priors,
                                  const DecodeParams& params,
                                  const ImageDims& dims) {
  const auto p_count = static_cast<std::int64_t>(priors.size());
  if (locations.layout != "P,4" || locations.dims.size() != 2 ||
      locations.dims[0] != p_count || locations.dims[1] != 4) {
    throw ValidationError("location tensor must be (num_priors, 4)");
  }
  if (scores.layout != "P,C" || scores.dims.size() != 2 ||
      scores.dims[0] != p_count || scores.dims[1] < 2) {
    throw ValidationError(
        "score tensor must be (num_priors, num_classes + 1)");
  }
  if (locations.image_id != scores.image_id) {
    throw ValidationError("location and score tensors name different images");
  }
  check_finite(locations, "location");
  check_finite(scores, "score");

  const int columns = scores.dims[1];
  std::vector<Detection> dets;
  std::vector<double> probs(static_cast<std::size_t>(columns));
  for (std::int64_t p = 0; p < p_count; ++p) {
    const float* srow = scores.values.data() + p * columns;
    double max_logit = srow[0];
    for (int c = 1; c < columns; ++c) {
      max_logit = std::max(max_logit, static_cast<double>(srow[c]));
    }
    double denom = 0;
    for (int c = 0; c < columns; ++c) {
      probs[static_cast<std::size_t>(c)] = std::exp(srow[c] - max_logit);
      denom += probs[static_cast<std::size_t>(c)];
    }

    bool box_ready = false;
    BoundingBox box;
    for (int c = 1; c < columns; ++c) {
      const double prob = probs[static_cast<std::size_t>(c)] / denom;
      if (prob < params.confidence_threshold) continue;
      if (!box_ready) {
        const float* loc = locations.values.data() + p * 4;
        const auto& prior = priors[static_cast<std::size_t>(p)].box;
        const double cx =
            prior.cx + loc[0] * params.ssd_center_variance * prior.w;
        const double cy =
            prior.cy + loc[1] * params.ssd_center_variance * prior.h;
        const double w = prior.w * std::exp(loc[2] * params.ssd_size_variance);
        const double h = prior.h * std::exp(loc[3] * params.ssd_size_variance);
        box = clip_to(BoundingBox{(cx - w / 2) * dims.width,
                                  (cy - h / 2) * dims.height,
                                  (cx + w / 2) * dims.width,
                                  (cy + h / 2) * dims.height},
                      dims);
        box_ready = true;
      }
      Detection d;
      d.image_id = scores.image_id;
      d.class_id = c - 1;
      d.confidence = prob;
      d.box = box;
      dets.push_back(std::move(d));
    }
  }
  return per_class_nms(std::move(dets), params.nms_iou_threshold);
}

std::string serialize_detections(std::span<const Detection> dets) {
  std::string out;
  for (const auto& d : dets) {
    nlohmann::json rec;
    rec["image"] = d.image_id;
    rec["class"] = d.class_id;
    rec["bbox"] = {d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max};
    rec["score"] = d.confidence;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

std::vector<Detection> parse_detections(std::string_view text) {
  std::vector<Detection> dets;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(lines[i]);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("line " + std::to_string(i + 1) + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("image") || !rec.contains("class") ||
        !rec.contains("bbox") || !rec.contains("score") ||
        !rec["bbox"].is_array() || rec["bbox"].size() != 4) {
      throw ParseError("line " + std::to_string(i + 1) +
                       ": detection record needs image/class/bbox[4]/score");
    }
    Detection d;
    d.image_id = rec["image"].get<std::string>();
    d.class_id = rec["class"].get<int>();
    d.box = BoundingBox{rec["bbox"][0].get<double>(),
                        rec["bbox"][1].get<double>(),
                        rec["bbox"][2].get<double>(),
                        rec["bbox"][3].get<double>()};
    d.confidence = rec["score"].get<double>();
    if (d.confidence < 0.0 || d.confidence > 1.0 || !d.box.valid()) {
      throw ParseError("line " + std::to_string(i + 1) +
                       ": detection fails invariants");
    }
    dets.push_back(std::move(d));
  }
  return dets;
}

void write_detections(std::span<const Detection> dets,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << serialize_detections(dets);
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_detections(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace beekit
