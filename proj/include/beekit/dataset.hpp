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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "beekit/geometry.hpp"

namespace beekit {

/// The six annotated classes. Enumerator values are the stable 1-based ids;
/// annotation files store 0-based ids (value - 1), following the convention
/// of common box-labelling tools.
enum class BeeClass : int {
  kWorkerNoPollen = 1,
  kWorkerPollen = 2,
  kDrone = 3,
  kQueen = 4,
  kInfectedBee = 5,
  kVarroaMite = 6,
};

inline constexpr int kNumBeeClasses = 6;

/// 0-based id as stored in annotation files.
constexpr int file_id(BeeClass c) { return static_cast<int>(c) - 1; }

/// Inverse of file_id. `id` must be in [0, kNumBeeClasses).
BeeClass bee_class_from_file_id(int id);

std::string_view bee_class_name(BeeClass c);

/// The annotation remaps: the full six-class taxonomy plus the three
/// reduced class sets used for training and evaluation.
enum class VariantKind {
  kAllClasses,
  kBeesAndMites,   // classes 1-5 -> bees, 6 -> v_mite
  kHealthyAndIll,  // classes 1-4 -> healthy, 5 -> infected, 6 dropped
  kMitesOnly,      // class 6 -> v_mite, 1-5 dropped
};

class DatasetVariant {
 public:
  DatasetVariant() : kind_(VariantKind::kAllClasses) {}
  explicit DatasetVariant(VariantKind kind) : kind_(kind) {}

  VariantKind kind() const { return kind_; }

  /// Output class id for a source class, or nullopt when this variant
  /// drops the class.
  std::optional<int> map_class(BeeClass c) const;

  int num_classes() const;
  const std::vector<std::string>& class_names() const;
  const std::string& class_name(int output_id) const;

  /// CLI spelling: all-classes, bees-mites, healthy-ill, mites-only.
  std::string_view name() const;
  static DatasetVariant from_name(std::string_view name);

  friend bool operator==(const DatasetVariant&, const DatasetVariant&) =
      default;

 private:
  VariantKind kind_;
};

/// One ground-truth annotation. The class id lives in the id space of the
/// dataset's variant: 0-based file ids for the all-classes form, 0-based
/// output ids after a remap.
struct Annotation {
  int class_id = 0;
  BoundingBox box;

  friend bool operator==(const Annotation&, const Annotation&) = default;
};

struct LabeledImage {
  std::string image_id;
  ImageDims dims;
  std::vector<Annotation> annotations;
};

enum class Split { kTrain, kVal, kTest };

std::string_view split_name(Split s);
Split split_from_name(std::string_view name);

struct SplitDataset {
  std::vector<LabeledImage> train;
  std::vector<LabeledImage> val;
  std::vector<LabeledImage> test;
  DatasetVariant variant{};

  const std::vector<LabeledImage>& split(Split s) const;
  std::vector<LabeledImage>& split(Split s);
};

/// Instance counts per output class id plus the number of images counted.
struct ClassHistogram {
  std::map<int, std::int64_t> counts;
  std::int64_t images = 0;

  std::int64_t count(int class_id) const {
    auto it = counts.find(class_id);
    return it == counts.end() ? 0 : it->second;
  }
  std::int64_t total() const;
};

/// Parses one per-image annotation file: lines `class_id cx cy w h` with a
/// 0-based class id and normalized center-form coordinates. Returns pixel
/// corner boxes. Throws ParseError naming the offending line on malformed
/// fields, class ids outside [0, num_classes), coordinates outside [0,1],
/// zero-area boxes, or boxes extending past the image frame.
std::vector<Annotation> parse_annotation_file(std::string_view text,
                                              const ImageDims& dims,
                                              int num_classes = kNumBeeClasses);

/// Canonical serialization: one line per annotation, `class_id cx cy w h`
/// with six decimal places, single spaces, LF line endings. Parsing a
/// canonically formatted file and serializing the result is byte-identical.
std::string serialize_annotations(std::span<const Annotation> annotations,
                                  const ImageDims& dims);

/// Applies a variant's class mapping to an all-classes dataset. Dropped
/// annotations are removed; images left without annotations are retained
/// as negative examples, so per-split image counts never change. Box
/// geometry is untouched. Throws ValidationError when `ds` is not in
/// all-classes form.
SplitDataset remap(const SplitDataset& ds, const DatasetVariant& v);

ClassHistogram histogram(std::span<const LabeledImage> split);

struct AuditRule {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AuditReport {
  std::vector<AuditRule> rules;

  bool all_passed() const;
  int failures() const;
  std::string summary() const;
};

/// Cross-checks an all-classes dataset: remap count arithmetic for every
/// variant and split, split disjointness, box bounds, and (when given) a
/// per-class expectation table of grand totals keyed by source class.
/// Reports rule results; never throws on a failed rule.
AuditReport consistency_audit(
    const SplitDataset& all_classes,
    const std::map<BeeClass, std::int64_t>* expected_totals = nullptr);

/// Loads a dataset index: lines `image_id width height split
/// annotation_path`, the annotation path relative to the index file's
/// directory. Annotation files are parsed in the id space of `variant`.
/// Duplicate image ids are loaded as-is so the audit can flag them.
SplitDataset load_dataset(const std::filesystem::path& index_path,
                          const DatasetVariant& variant = DatasetVariant{});

/// Writes `index.txt` plus one annotation file per image under
/// `annotations/` in `out_dir`. Image ids are used as file names and must
/// be path-safe.
void save_dataset(const SplitDataset& ds, const std::filesystem::path& out_dir);

}  // namespace beekit
