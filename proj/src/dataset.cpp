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

#include "beekit/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "beekit/errors.hpp"
#include "beekit/format.hpp"
#include "text_util.hpp"

namespace beekit {

namespace {

// Fields are stored with 6 decimals, so an edge-touching box can land up to
// ~7.5e-7 of a dimension outside the frame after quantization. Accept that
// and clamp.
constexpr double kBoundsSlack = 2e-6;

const std::vector<std::string>& names_all() {
  static const std::vector<std::string> v{"worker_no_pollen", "worker_pollen",
                                          "drone", "queen", "infected_bee",
                                          "v_mite"};
  return v;
}
const std::vector<std::string>& names_bees_mites() {
  static const std::vector<std::string> v{"bees", "v_mite"};
  return v;
}
const std::vector<std::string>& names_healthy_ill() {
  static const std::vector<std::string> v{"healthy", "infected"};
  return v;
}
const std::vector<std::string>& names_mites_only() {
  static const std::vector<std::string> v{"v_mite"};
  return v;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw ParseError("not a regular file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw ParseError("read failed: " + path.string());
  return ss.str();
}

}  // namespace

BeeClass bee_class_from_file_id(int id) {
  if (id < 0 || id >= kNumBeeClasses) {
    throw ValidationError("unknown class id " + std::to_string(id));
  }
  return static_cast<BeeClass>(id + 1);
}

std::string_view bee_class_name(BeeClass c) {
  return names_all()[static_cast<std::size_t>(file_id(c))];
}

std::optional<int> DatasetVariant::map_class(BeeClass c) const {
  const int id = static_cast<int>(c);
  switch (kind_) {
    case VariantKind::kAllClasses:
      return id - 1;
    case VariantKind::kBeesAndMites:
      return id == 6 ? 1 : 0;
    case VariantKind::kHealthyAndIll:
      if (id == 6) return std::nullopt;
      return id == 5 ? 1 : 0;
    case VariantKind::kMitesOnly:
      if (id == 6) return 0;
      return std::nullopt;
  }
  return std::nullopt;
}

int DatasetVariant::num_classes() const {
  return static_cast<int>(class_names().size());
}

const std::vector<std::string>& DatasetVariant::class_names() const {
  switch (kind_) {
    case VariantKind::kAllClasses:
      return names_all();
    case VariantKind::kBeesAndMites:
      return names_bees_mites();
    case VariantKind::kHealthyAndIll:
      return names_healthy_ill();
    case VariantKind::kMitesOnly:
      return names_mites_only();
  }
  return names_all();
}

const std::string& DatasetVariant::class_name(int output_id) const {
  const auto& names = class_names();
  if (output_id < 0 || output_id >= static_cast<int>(names.size())) {
    throw ValidationError("class id " + std::to_string(output_id) +
                          " outside variant " + std::string(name()));
  }
  return names[static_cast<std::size_t>(output_id)];
}

std::string_view DatasetVariant::name() const {
  switch (kind_) {
    case VariantKind::kAllClasses:
      return "all-classes";
    case VariantKind::kBeesAndMites:
      return "bees-mites";
    case VariantKind::kHealthyAndIll:
      return "healthy-ill";
    case VariantKind::kMitesOnly:
      return "mites-only";
  }
  return "all-classes";
}

DatasetVariant DatasetVariant::from_name(std::string_view name) {
  if (name == "all-classes") return DatasetVariant(VariantKind::kAllClasses);
  if (name == "bees-mites") return DatasetVariant(VariantKind::kBeesAndMites);
  if (name == "healthy-ill")
    return DatasetVariant(VariantKind::kHealthyAndIll);
  if (name == "mites-only") return DatasetVariant(VariantKind::kMitesOnly);
  throw ValidationError("unknown dataset variant: " + std::string(name));
}

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

Split split_from_name(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ValidationError("unknown split: " + std::string(name));
}

const std::vector<LabeledImage>& SplitDataset::split(Split s) const {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kVal:
      return val;
    case Split::kTest:
      return test;
  }
  return train;
}

std::vector<LabeledImage>& SplitDataset::split(Split s) {
  switch (s) {
    case Split::kTrain:
      return train;
    case Split::kVal:
      return val;
    case Split::kTest:
      return test;
  }
  return train;
}

std::int64_t ClassHistogram::total() const {
  std::int64_t sum = 0;
  for (const auto& [id, n] : counts) sum += n;
  return sum;
}

std::vector<Annotation> parse_annotation_file(std::string_view text,
                                              const ImageDims& dims,
                                              int num_classes) {
  if (!dims.valid()) {
    throw ValidationError("annotation parse: zero-sized image dims");
  }
  std::vector<Annotation> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line_no = std::to_string(i + 1);
    const auto fields = detail::split_fields(lines[i]);
    if (fields.size() != 5) {
      throw ParseError("line " + line_no + ": expected 5 fields, got " +
                       std::to_string(fields.size()));
    }
    const auto id = detail::parse_int(fields[0]);
    if (!id) {
      throw ParseError("line " + line_no + ": bad class id '" +
                       std::string(fields[0]) + "'");
    }
    if (*id < 0 || *id >= num_classes) {
      throw ParseError("line " + line_no + ": unknown class id " +
                       std::to_string(*id));
    }
    double coords[4];
    for (int f = 0; f < 4; ++f) {
      const auto v = detail::parse_double(fields[f + 1]);
      if (!v) {
        throw ParseError("line " + line_no + ": bad number '" +
                         std::string(fields[f + 1]) + "'");
      }
      if (*v < 0.0 || *v > 1.0) {
        throw ParseError("line " + line_no + ": coordinate " +
                         std::string(fields[f + 1]) + " outside [0,1]");
      }
      coords[f] = *v;
    }
    const NormCenterBox norm{coords[0], coords[1], coords[2], coords[3]};
    if (norm.w <= 0.0 || norm.h <= 0.0) {
      throw ParseError("line " + line_no + ": zero-area box");
    }
    BoundingBox box = to_pixels(norm, dims);
    if (box.x_min < -kBoundsSlack * dims.width ||
        box.y_min < -kBoundsSlack * dims.height ||
        box.x_max > dims.width * (1.0 + kBoundsSlack) ||
        box.y_max > dims.height * (1.0 + kBoundsSlack)) {
      throw ParseError("line " + line_no + ": box extends outside the image");
    }
    box.x_min = std::max(box.x_min, 0.0);
    box.y_min = std::max(box.y_min, 0.0);
    box.x_max = std::min(box.x_max, static_cast<double>(dims.width));
    box.y_max = std::min(box.y_max, static_cast<double>(dims.height));
    out.push_back(Annotation{static_cast<int>(*id), box});
  }
  return out;
}

std::string serialize_annotations(std::span<const Annotation> annotations,
                                  const ImageDims& dims) {
  std::string out;
  for (const auto& ann : annotations) {
    const NormCenterBox n = to_normalized(ann.box, dims);
    out += std::to_string(ann.class_id);
    out += ' ';
    out += format_fixed(n.cx, 6);
    out += ' ';
    out += format_fixed(n.cy, 6);
    out += ' ';
    out += format_fixed(n.w, 6);
    out += ' ';
    out += format_fixed(n.h, 6);
    out += '\n';
  }
  return out;
}

SplitDataset remap(const SplitDataset& ds, const DatasetVariant& v) {
  if (ds.variant.kind() != VariantKind::kAllClasses) {
    throw ValidationError("remap expects an all-classes dataset, got " +
                          std::string(ds.variant.name()));
  }
  SplitDataset out;
  out.variant = v;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    auto& dst = out.split(s);
    dst.reserve(ds.split(s).size());
    for (const auto& img : ds.split(s)) {
      LabeledImage mapped{img.image_id, img.dims, {}};
      mapped.annotations.reserve(img.annotations.size());
      for (const auto& ann : img.annotations) {
        const auto mapped_id = v.map_class(bee_class_from_file_id(ann.class_id));
        if (mapped_id) {
          mapped.annotations.push_back(Annotation{*mapped_id, ann.box});
        }
      }
      dst.push_back(std::move(mapped));
    }
  }
  return out;
}

ClassHistogram histogram(std::span<const LabeledImage> split) {
  ClassHistogram h;
  h.images = static_cast<std::int64_t>(split.size());
  for (const auto& img : split) {
    for (const auto& ann : img.annotations) ++h.counts[ann.class_id];
  }
  return h;
}

bool AuditReport::all_passed() const {
  return std::all_of(rules.begin(), rules.end(),
                     [](const AuditRule& r) { return r.passed; });
}

int AuditReport::failures() const {
  return static_cast<int>(std::count_if(
      rules.begin(), rules.end(), [](const AuditRule& r) { return !r.passed; }));
}

std::string AuditReport::summary() const {
  std::string out;
  for (const auto& r : rules) {
    out += r.passed ? "[ OK ] " : "[FAIL] ";
    out += r.name;
    if (!r.detail.empty()) {
      out += ": ";
      out += r.detail;
    }
    out += '\n';
  }
  out += std::to_string(rules.size() - static_cast<std::size_t>(failures()));
  out += '/';
  out += std::to_string(rules.size());
  out += " rules passed\n";
  return out;
}

AuditReport consistency_audit(
    const SplitDataset& all_classes,
    const std::map<BeeClass, std::int64_t>* expected_totals) {
  AuditReport report;

  // (a) Remapped per-split counts must equal sums of constituent source
  // class counts.
  for (VariantKind kind : {VariantKind::kBeesAndMites,
                           VariantKind::kHealthyAndIll,
                           VariantKind::kMitesOnly}) {
    const DatasetVariant v(kind);
    const SplitDataset mapped = remap(all_classes, v);
    for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
      const ClassHistogram source = histogram(all_classes.split(s));
      const ClassHistogram got = histogram(mapped.split(s));
      bool ok = true;
      std::string detail;
      for (int out_id = 0; out_id < v.num_classes(); ++out_id) {
        std::int64_t expected = 0;
        for (int src = 0; src < kNumBeeClasses; ++src) {
          if (v.map_class(bee_class_from_file_id(src)) == out_id) {
            expected += source.count(src);
          }
        }
        if (got.count(out_id) != expected) {
          ok = false;
          detail += v.class_name(out_id) + "=" +
                    std::to_string(got.count(out_id)) + " vs sum " +
                    std::to_string(expected) + "; ";
        }
      }
      report.rules.push_back(
          AuditRule{"variant-count[" + std::string(v.name()) + "," +
                        std::string(split_name(s)) + "]",
                    ok, detail});
    }
  }

  // (b) Split disjointness and per-split uniqueness.
  {
    std::map<std::string, std::vector<std::string>> owners;
    for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
      for (const auto& img : all_classes.split(s)) {
        owners[img.image_id].push_back(std::string(split_name(s)));
      }
    }
    std::string detail;
    for (const auto& [id, where] : owners) {
      if (where.size() > 1) {
        detail += id + " in {";
        for (std::size_t i = 0; i < where.size(); ++i) {
          if (i) detail += ',';
          detail += where[i];
        }
        detail += "}; ";
      }
    }
    report.rules.push_back(
        AuditRule{"split-disjointness", detail.empty(), detail});
  }

  // (c) Every box in bounds with positive area.
  {
    std::string detail;
    for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
      for (const auto& img : all_classes.split(s)) {
        for (const auto& ann : img.annotations) {
          if (!ann.box.inside(img.dims) || ann.box.area() <= 0.0) {
            detail += img.image_id + "; ";
            break;
          }
        }
      }
    }
    report.rules.push_back(AuditRule{"box-bounds", detail.empty(), detail});
  }

  // (d) Grand totals vs a supplied expectation table.
  if (expected_totals) {
    ClassHistogram all;
    for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
      const ClassHistogram h = histogram(all_classes.split(s));
      for (const auto& [id, n] : h.counts) all.counts[id] += n;
    }
    for (const auto& [cls, expected] : *expected_totals) {
      const std::int64_t actual = all.count(file_id(cls));
      const bool ok = actual == expected;
      std::string detail;
      if (!ok) {
        detail = "expected " + std::to_string(expected) + ", found " +
                 std::to_string(actual) + " (difference " +
                 std::to_string(expected - actual) + ")";
      }
      report.rules.push_back(AuditRule{
          "expected-total[" + std::string(bee_class_name(cls)) + "]", ok,
          detail});
    }
  }

  return report;
}

SplitDataset load_dataset(const std::filesystem::path& index_path,
                          const DatasetVariant& variant) {
  const std::string text = read_text_file(index_path);
  const auto base = index_path.parent_path();

  SplitDataset ds;
  ds.variant = variant;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto line_no = std::to_string(i + 1);
    const auto tokens = detail::tokenize(lines[i]);
    if (tokens.size() != 5) {
      throw ParseError(index_path.string() + " line " + line_no +
                       ": expected `image_id width height split path`");
    }
    const auto w = detail::parse_int(tokens[1]);
    const auto h = detail::parse_int(tokens[2]);
    if (!w || !h || *w < 1 || *h < 1) {
      throw ParseError(index_path.string() + " line " + line_no +
                       ": bad image dims");
    }
    Split s;
    try {
      s = split_from_name(tokens[3]);
    } catch (const ValidationError& e) {
      throw ParseError(index_path.string() + " line " + line_no + ": " +
                       e.what());
    }
    LabeledImage img;
    img.image_id = std::string(tokens[0]);
    img.dims = ImageDims{static_cast<int>(*w), static_cast<int>(*h)};
    const auto ann_path = base / std::filesystem::path(std::string(tokens[4]));
    const std::string ann_text = read_text_file(ann_path);
    try {
      img.annotations =
          parse_annotation_file(ann_text, img.dims, variant.num_classes());
    } catch (const ParseError& e) {
      throw ParseError(ann_path.string() + ": " + e.what());
    }
    ds.split(s).push_back(std::move(img));
  }
  return ds;
}

void save_dataset(const SplitDataset& ds,
                  const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "annotations");

  std::string index;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    for (const auto& img : ds.split(s)) {
      const std::string rel = "annotations/" + img.image_id + ".txt";
      index += img.image_id + " " + std::to_string(img.dims.width) + " " +
               std::to_string(img.dims.height) + " " +
               std::string(split_name(s)) + " " + rel + "\n";
      std::ofstream ann(out_dir / rel, std::ios::binary);
      if (!ann) {
        throw ValidationError("cannot write " + (out_dir / rel).string());
      }
      ann << serialize_annotations(img.annotations, img.dims);
    }
  }
  std::ofstream out(out_dir / "index.txt", std::ios::binary);
  if (!out) {
    throw ValidationError("cannot write " + (out_dir / "index.txt").string());
  }
  out << index;
}

}  // namespace beekit
