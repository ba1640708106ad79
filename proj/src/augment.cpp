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

#include "beekit/augment.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "beekit/errors.hpp"
#include "rng.hpp"

namespace beekit {

namespace {

constexpr std::array<std::string_view, kNumAugStyles> kSlugs{
    "gaussian-blur",    "motion-blur",   "additive-gaussian-noise",
    "salt-pepper",      "hue-shift",     "brightness-shift",
    "contrast-shift",   "fog-overlay",   "random-erase",
    "translate",
};

constexpr int kUnstyledIndex = 0;
constexpr int kPermutationIndex = 255;

ImageDims source_dims_of(const AugPlanEntry& entry) {
  if (entry.quarter_turns % 2 == 1) {
    return ImageDims{entry.output_dims.height, entry.output_dims.width};
  }
  return entry.output_dims;
}

BoundingBox erase_rect_from_params(const StyleParams& p,
                                   const ImageDims& dims) {
  const double x = p.get("x") * dims.width;
  const double y = p.get("y") * dims.height;
  const double w = p.get("w") * dims.width;
  const double h = p.get("h") * dims.height;
  return BoundingBox{x, y, x + w, y + h};
}

}  // namespace

std::string_view style_slug(AugStyle s) {
  return kSlugs[static_cast<std::size_t>(s)];
}

AugStyle style_from_slug(std::string_view slug) {
  for (int i = 0; i < kNumAugStyles; ++i) {
    if (kSlugs[static_cast<std::size_t>(i)] == slug) {
      return static_cast<AugStyle>(i);
    }
  }
  throw ValidationError("unknown augmentation style: " + std::string(slug));
}

bool geometry_affecting(AugStyle s) {
  return s == AugStyle::kRandomErase || s == AugStyle::kTranslate;
}

double StyleParams::get(std::string_view key) const {
  for (const auto& [k, v] : values) {
    if (k == key) return v;
  }
  throw ValidationError("style parameter not present: " + std::string(key));
}

StyleParams style_parameters(AugStyle s, std::uint64_t seed) {
  detail::Rng rng(seed);
  StyleParams p;
  switch (s) {
    case AugStyle::kGaussianBlur:
      p.values.emplace_back("sigma", rng.range(0.5, 3.0));
      break;
    case AugStyle::kMotionBlur:
      p.values.emplace_back("length",
                            static_cast<double>(3 + 2 * rng.index(7)));
      p.values.emplace_back("angle_deg", rng.range(0.0, 180.0));
      break;
    case AugStyle::kAdditiveGaussianNoise:
      p.values.emplace_back("stddev", rng.range(2.0, 12.0));
      break;
    case AugStyle::kSaltPepper:
      p.values.emplace_back("fraction", rng.range(0.002, 0.02));
      break;
    case AugStyle::kHueShift:
      p.values.emplace_back("delta_deg", rng.range(-18.0, 18.0));
      break;
    case AugStyle::kBrightnessShift:
      p.values.emplace_back("delta", rng.range(-0.2, 0.2));
      break;
    case AugStyle::kContrastShift:
      p.values.emplace_back("factor", rng.range(0.7, 1.3));
      break;
    case AugStyle::kFogOverlay:
      p.values.emplace_back("density", rng.range(0.1, 0.4));
      break;
    case AugStyle::kRandomErase: {
      const double w = rng.range(0.10, 0.25);
      const double h = rng.range(0.10, 0.25);
      p.values.emplace_back("x", rng.range(0.0, 1.0 - w));
      p.values.emplace_back("y", rng.range(0.0, 1.0 - h));
      p.values.emplace_back("w", w);
      p.values.emplace_back("h", h);
      break;
    }
    case AugStyle::kTranslate:
      p.values.emplace_back("dx", rng.range(-0.1, 0.1));
      p.values.emplace_back("dy", rng.range(-0.1, 0.1));
      break;
  }
  return p;
}

std::uint64_t entry_seed(std::uint64_t master_seed, std::string_view source_id,
                         int quarter_turns, int derivative_index) {
  // Avalanche fully between ingredients so the small integers cannot cancel
  // against each other.
  std::uint64_t state = master_seed;
  state = detail::splitmix64(state) ^ detail::fnv1a(source_id);
  state = detail::splitmix64(state) ^ static_cast<std::uint64_t>(quarter_turns);
  state = detail::splitmix64(state) ^
          static_cast<std::uint64_t>(derivative_index);
  return detail::splitmix64(state);
}

std::vector<Annotation> apply_translate(std::span<const Annotation> anns,
                                        const ImageDims& dims, double dx,
                                        double dy, double retention) {
  std::vector<Annotation> out;
  for (const auto& ann : anns) {
    const double original = ann.box.area();
    BoundingBox b{ann.box.x_min + dx, ann.box.y_min + dy, ann.box.x_max + dx,
                  ann.box.y_max + dy};
    b.x_min = std::clamp(b.x_min, 0.0, static_cast<double>(dims.width));
    b.x_max = std::clamp(b.x_max, 0.0, static_cast<double>(dims.width));
    b.y_min = std::clamp(b.y_min, 0.0, static_cast<double>(dims.height));
    b.y_max = std::clamp(b.y_max, 0.0, static_cast<double>(dims.height));
    if (original <= 0.0 || b.area() / original < retention) continue;
    out.push_back(Annotation{ann.class_id, b});
  }
  return out;
}

std::vector<Annotation> apply_erase(std::span<const Annotation> anns,
                                    const BoundingBox& erased,
                                    double retention) {
  std::vector<Annotation> out;
  for (const auto& ann : anns) {
    const double original = ann.box.area();
    if (original <= 0.0) continue;
    const double ix = std::max(
        0.0, std::min(ann.box.x_max, erased.x_max) -
                 std::max(ann.box.x_min, erased.x_min));
    const double iy = std::max(
        0.0, std::min(ann.box.y_max, erased.y_max) -
                 std::max(ann.box.y_min, erased.y_min));
    const double remaining = original - ix * iy;
    if (remaining / original < retention) continue;
    out.push_back(ann);
  }
  return out;
}

std::vector<Annotation> transform_annotations(std::span<const Annotation> anns,
                                              const AugPlanEntry& entry,
                                              double retention_threshold) {
  const ImageDims src_dims = source_dims_of(entry);
  std::vector<Annotation> rotated;
  rotated.reserve(anns.size());
  for (const auto& ann : anns) {
    const auto [box, dims] = rotate_box(ann.box, entry.quarter_turns, src_dims);
    if (!(dims == entry.output_dims)) {
      throw ValidationError("entry output dims disagree with rotation");
    }
    rotated.push_back(Annotation{ann.class_id, box});
  }
  if (!entry.style || !geometry_affecting(*entry.style)) return rotated;

  const StyleParams params = style_parameters(*entry.style, entry.seed);
  if (*entry.style == AugStyle::kTranslate) {
    return apply_translate(rotated, entry.output_dims,
                           params.get("dx") * entry.output_dims.width,
                           params.get("dy") * entry.output_dims.height,
                           retention_threshold);
  }
  return apply_erase(rotated,
                     erase_rect_from_params(params, entry.output_dims),
                     retention_threshold);
}

std::vector<AugPlanEntry> plan_expansion(std::span<const LabeledImage> train,
                                         std::uint64_t master_seed,
                                         const AugmentConfig& config) {
  std::vector<AugPlanEntry> plan;
  plan.reserve(train.size() * 44);
  for (const auto& img : train) {
    for (int k = 0; k < 4; ++k) {
      const ImageDims out_dims =
          k % 2 == 1 ? ImageDims{img.dims.height, img.dims.width} : img.dims;
      const std::string rot_prefix =
          img.image_id + "_r" + std::to_string(90 * k) + "_a";

      AugPlanEntry orig;
      orig.output_id = rot_prefix + "orig";
      orig.source_id = img.image_id;
      orig.quarter_turns = k;
      orig.style = std::nullopt;
      orig.seed = entry_seed(master_seed, img.image_id, k, kUnstyledIndex);
      orig.output_dims = out_dims;
      orig.annotations = transform_annotations(img.annotations, orig,
                                               config.retention_threshold);
      plan.push_back(std::move(orig));

      // Each derivative draws its style uniformly; drawing without
      // replacement keeps the ten output ids distinct.
      std::array<AugStyle, kNumAugStyles> styles;
      for (int i = 0; i < kNumAugStyles; ++i) {
        styles[static_cast<std::size_t>(i)] = static_cast<AugStyle>(i);
      }
      detail::Rng perm_rng(
          entry_seed(master_seed, img.image_id, k, kPermutationIndex));
      for (std::size_t i = styles.size(); i > 1; --i) {
        std::swap(styles[i - 1], styles[perm_rng.index(i)]);
      }

      for (int d = 1; d <= kNumAugStyles; ++d) {
        const AugStyle style = styles[static_cast<std::size_t>(d - 1)];
        AugPlanEntry entry;
        entry.output_id = rot_prefix + std::string(style_slug(style));
        entry.source_id = img.image_id;
        entry.quarter_turns = k;
        entry.style = style;
        entry.seed = entry_seed(master_seed, img.image_id, k, d);
        entry.output_dims = out_dims;
        entry.annotations = transform_annotations(img.annotations, entry,
                                                  config.retention_threshold);
        plan.push_back(std::move(entry));
      }
    }
  }
  std::sort(plan.begin(), plan.end(),
            [](const AugPlanEntry& a, const AugPlanEntry& b) {
              return a.output_id < b.output_id;
            });
  return plan;
}

std::vector<AugPlanEntry> plan_split_expansion(const SplitDataset& ds,
                                               Split split,
                                               std::uint64_t master_seed,
                                               const AugmentConfig& config) {
  if (split != Split::kTrain) {
    throw ValidationError(
        "only the train split may be expanded; got " +
        std::string(split_name(split)));
  }
  return plan_expansion(ds.train, master_seed, config);
}

std::string serialize_plan(std::span<const AugPlanEntry> plan) {
  std::string out;
  for (const auto& e : plan) {
    out += e.output_id;
    out += '\t';
    out += e.source_id;
    out += '\t';
    out += std::to_string(e.quarter_turns);
    out += '\t';
    out += e.style ? std::string(style_slug(*e.style)) : "orig";
    out += '\t';
    out += std::to_string(e.seed);
    out += '\t';
    out += std::to_string(e.output_dims.width);
    out += '\t';
    out += std::to_string(e.output_dims.height);
    out += '\t';
    out += "annotations/" + e.output_id + ".txt";
    out += '\n';
  }
  return out;
}

void save_plan(std::span<const AugPlanEntry> plan,
               const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "annotations");
  for (const auto& e : plan) {
    const fs::path p = out_dir / "annotations" / (e.output_id + ".txt");
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + p.string());
    f << serialize_annotations(e.annotations, e.output_dims);
  }
  const fs::path plan_path = out_dir / "plan.tsv";
  std::ofstream f(plan_path, std::ios::binary);
  if (!f) throw ValidationError("cannot write " + plan_path.string());
  f << serialize_plan(plan);
}

}  // namespace beekit
