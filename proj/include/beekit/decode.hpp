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

// Raw head-tensor decoding: cell-grid regression for the YOLO head, prior
// regression with background softmax for the SSD head, confidence filtering,
// and greedy per-class NMS.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "beekit/anchors.hpp"
#include "beekit/geometry.hpp"
#include "beekit/tensor_io.hpp"

namespace beekit {

struct Detection {
  std::string image_id;
  int class_id = 0;
  BoundingBox box;
  double confidence = 0;
};

struct DecodeParams {
  double confidence_threshold = 0.4;
  double nms_iou_threshold = 0.45;
  double ssd_center_variance = 0.1;
  double ssd_size_variance = 0.2;

  static DecodeParams yolo_defaults();  // confidence 0.4
  static DecodeParams ssd_defaults();   // confidence 0.3
};

// Canonical order: confidence descending, then box lexicographic, then
// class, then image id. Makes output independent of production schedule.
void sort_detections(std::vector<Detection>& dets);

// Greedy suppression for detections of one image and one class: highest
// confidence first (ties broken toward smaller x_min, then y_min), survivors
// kill everything at IoU >= threshold. Mixed input is a caller error.
std::vector<Detection> nms(std::vector<Detection> dets, double iou_threshold);

// Groups by (image, class), suppresses each group, returns canonical order.
std::vector<Detection> per_class_nms(std::vector<Detection> dets,
                                     double iou_threshold);

// Per cell and anchor slot, with S = input/stride:
//   center = (cell + 2*sigmoid(t_xy) - 0.5) * stride
//   size   = anchor * (2*sigmoid(t_wh))^2
//   confidence = sigmoid(t_obj) * max_k sigmoid(t_class_k)
// Boxes are clipped to dims; detections below the confidence threshold are
// dropped, the rest pass per-class NMS. Tensors are layout "A,H,W,C" with
// C = num_classes + 5, one per configured scale, in scale order.
std::vector<Detection> decode_yolo(std::span<const RawTensor> scales,
                                   const YoloAnchorConfig& cfg,
                                   const DecodeParams& params,
                                   const ImageDims& dims);

// locations is layout "P,4" (per prior: dcx, dcy, dw, dh), scores is "P,C"
// with C = num_classes + 1 and the background at column 0:
//   cx = prior.cx + dcx * center_variance * prior.w   (cy analogous)
//   w  = prior.w * exp(dw * size_variance)            (h analogous)
// Scores pass a row softmax; every non-background column at or above the
// confidence threshold becomes a detection with class_id = column - 1.
std::vector<Detection> decode_ssd(const RawTensor& locations,
                                  const RawTensor& scores,
                                  std::span<const PriorBox> priors,
                                  const DecodeParams& params,
                                  const ImageDims& dims);

// One JSON record per line:
//   {"bbox":[x1,y1,x2,y2],"class":c,"image":"id","score":s}
std::string serialize_detections(std::span<const Detection> dets);
std::vector<Detection> parse_detections(std::string_view text);

void write_detections(std::span<const Detection> dets,
                      const std::filesystem::path& path);
std::vector<Detection> read_detections(const std::filesystem::path& path);

}  // namespace beekit
