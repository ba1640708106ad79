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

#include "beekit/geometry.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "beekit/errors.hpp"

namespace beekit {

double iou(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

std::pair<BoundingBox, ImageDims> rotate_box(const BoundingBox& box,
                                             int quarter_turns,
                                             const ImageDims& dims) {
  if (!box.inside(dims)) {
    throw ValidationError("rotate_box: box (" + std::to_string(box.x_min) +
                          "," + std::to_string(box.y_min) + "," +
                          std::to_string(box.x_max) + "," +
                          std::to_string(box.y_max) +
                          ") lies outside image dims " +
                          std::to_string(dims.width) + "x" +
                          std::to_string(dims.height));
  }
  const int k = ((quarter_turns % 4) + 4) % 4;
  const double w = dims.width;
  const double h = dims.height;

  // Map the two corners through the frame rotation, then re-sort min/max.
  auto map_point = [&](double x, double y) -> std::pair<double, double> {
    switch (k) {
      case 1:
        return {h - y, x};
      case 2:
        return {w - x, h - y};
      case 3:
        return {y, w - x};
      default:
        return {x, y};
    }
  };

  const auto [ax, ay] = map_point(box.x_min, box.y_min);
  const auto [bx, by] = map_point(box.x_max, box.y_max);

  BoundingBox out{std::min(ax, bx), std::min(ay, by), std::max(ax, bx),
                  std::max(ay, by)};
  const ImageDims out_dims =
      (k % 2 == 0) ? dims : ImageDims{dims.height, dims.width};
  return {out, out_dims};
}

NormCenterBox to_normalized(const BoundingBox& box, const ImageDims& dims) {
  if (!dims.valid()) {
    throw ValidationError("to_normalized: zero-sized image dims");
  }
  const double w = dims.width;
  const double h = dims.height;
  return NormCenterBox{(box.x_min + box.x_max) / 2.0 / w,
                       (box.y_min + box.y_max) / 2.0 / h, box.width() / w,
                       box.height() / h};
}

BoundingBox to_pixels(const NormCenterBox& box, const ImageDims& dims) {
  if (!dims.valid()) {
    throw ValidationError("to_pixels: zero-sized image dims");
  }
  const double w = dims.width;
  const double h = dims.height;
  return BoundingBox{(box.cx - box.w / 2.0) * w, (box.cy - box.h / 2.0) * h,
                     (box.cx + box.w / 2.0) * w, (box.cy + box.h / 2.0) * h};
}

bool box_less(const BoundingBox& a, const BoundingBox& b) {
  return std::tie(a.x_min, a.y_min, a.x_max, a.y_max) <
         std::tie(b.x_min, b.y_min, b.x_max, b.y_max);
}

}  // namespace beekit
