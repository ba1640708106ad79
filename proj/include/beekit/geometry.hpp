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

#include <utility>

namespace beekit {

/// Image size in whole pixels.
struct ImageDims {
  int width = 0;
  int height = 0;

  bool valid() const { return width >= 1 && height >= 1; }
  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

/// Axis-aligned box in continuous pixel corner coordinates. Origin is the
/// top-left image corner, x grows rightward, y grows downward. Coordinates
/// are continuous, so a box spanning the full frame of a WxH image is
/// exactly (0, 0, W, H).
struct BoundingBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  bool valid() const { return x_max >= x_min && y_max >= y_min; }
  bool inside(const ImageDims& dims) const {
    return x_min >= 0.0 && y_min >= 0.0 && x_max <= dims.width &&
           y_max <= dims.height;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Center-form box with all four fields expressed as fractions of the
/// image width/height.
struct NormCenterBox {
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;

  friend bool operator==(const NormCenterBox&, const NormCenterBox&) = default;
};

/// Intersection over union of two valid boxes. Total on valid boxes:
/// returns 0 when the union is empty (two degenerate boxes).
double iou(const BoundingBox& a, const BoundingBox& b);

/// Rotates a box by `quarter_turns` * 90 degrees clockwise together with
/// the image frame. Returns the rotated box and the rotated dims (width and
/// height swap for odd turn counts). Quarter-turn rotation of an
/// axis-aligned box is exact. `quarter_turns` is reduced modulo 4.
///
/// Throws ValidationError when the box does not lie within `dims`.
std::pair<BoundingBox, ImageDims> rotate_box(const BoundingBox& box,
                                             int quarter_turns,
                                             const ImageDims& dims);

/// Pixel corner box -> normalized center form. Throws ValidationError on
/// zero-sized dims. The box is expected to lie within `dims`.
NormCenterBox to_normalized(const BoundingBox& box, const ImageDims& dims);

/// Normalized center form -> pixel corner box. Inverse of to_normalized.
/// Throws ValidationError on zero-sized dims.
BoundingBox to_pixels(const NormCenterBox& box, const ImageDims& dims);

/// Lexicographic comparison (x_min, y_min, x_max, y_max); deterministic
/// tie-break for sorting detections with equal confidence.
bool box_less(const BoundingBox& a, const BoundingBox& b);

}  // namespace beekit
