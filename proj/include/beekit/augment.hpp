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

// Training-split expansion planning: 4 rotations x (1 original + 10 styled
// derivatives) per source image, with exact annotation transforms. The plan
// describes every derived image; pixel rendering is left to whatever image
// tool consumes the plan.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "beekit/dataset.hpp"
#include "beekit/geometry.hpp"

namespace beekit {

enum class AugStyle : int {
  kGaussianBlur = 0,
  kMotionBlur = 1,
  kAdditiveGaussianNoise = 2,
  kSaltPepper = 3,
  kHueShift = 4,
  kBrightnessShift = 5,
  kContrastShift = 6,
  kFogOverlay = 7,
  kRandomErase = 8,
  kTranslate = 9,
};

inline constexpr int kNumAugStyles = 10;

std::string_view style_slug(AugStyle s);
AugStyle style_from_slug(std::string_view slug);
bool geometry_affecting(AugStyle s);

// Style scalars drawn from the entry seed, in a fixed order. Geometry values
// are normalized to the output dims; pixel-space consumers scale them.
struct StyleParams {
  std::vector<std::pair<std::string, double>> values;

  double get(std::string_view key) const;
};

StyleParams style_parameters(AugStyle s, std::uint64_t seed);

struct AugPlanEntry {
  std::string output_id;
  std::string source_id;
  int quarter_turns = 0;
  std::optional<AugStyle> style;  // nullopt marks the unstyled derivative
  std::uint64_t seed = 0;
  ImageDims output_dims;
  std::vector<Annotation> annotations;
};

struct AugmentConfig {
  double retention_threshold = 0.3;
};

// Mixes the master seed with the entry coordinates; stable across runs,
// platforms, and generation order. Derivative index 0 is the unstyled entry,
// 1 through 10 the styled ones.
std::uint64_t entry_seed(std::uint64_t master_seed, std::string_view source_id,
                         int quarter_turns, int derivative_index);

// Shift every box by (dx, dy) pixels, clip to the frame, and drop boxes whose
// remaining area falls below retention * original area.
std::vector<Annotation> apply_translate(std::span<const Annotation> anns,
                                        const ImageDims& dims, double dx,
                                        double dy, double retention);

// Boxes keep their coordinates; a box loses the area it shares with the
// erased rectangle and is dropped below the retention fraction.
std::vector<Annotation> apply_erase(std::span<const Annotation> anns,
                                    const BoundingBox& erased,
                                    double retention);

// Rotation followed by the style's box transform where one exists.
std::vector<Annotation> transform_annotations(std::span<const Annotation> anns,
                                              const AugPlanEntry& entry,
                                              double retention_threshold = 0.3);

// 44 entries per source image, sorted by output_id, deterministic in
// master_seed. Annotations inside each entry are already transformed.
std::vector<AugPlanEntry> plan_expansion(std::span<const LabeledImage> train,
                                         std::uint64_t master_seed,
                                         const AugmentConfig& config = {});

// Same, but guards the split choice: only the train split may be expanded.
std::vector<AugPlanEntry> plan_split_expansion(const SplitDataset& ds,
                                               Split split,
                                               std::uint64_t master_seed,
                                               const AugmentConfig& config = {});

// Tab-separated plan records:
//   output_id source_id quarter_turns style_id seed w h annotation_path
std::string serialize_plan(std::span<const AugPlanEntry> plan);

// Writes plan.tsv plus annotations/<output_id>.txt per entry.
void save_plan(std::span<const AugPlanEntry> plan,
               const std::filesystem::path& out_dir);

}  // namespace beekit
