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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <set>

#include "beekit/augment.hpp"
#include "beekit/errors.hpp"
#include "support/synthetic.hpp"

using beekit::Annotation;
using beekit::AugPlanEntry;
using beekit::AugStyle;
using beekit::BoundingBox;
using beekit::ImageDims;
using beekit::Split;

namespace fs = std::filesystem;

namespace {

std::map<int, std::int64_t> plan_class_counts(
    const std::vector<AugPlanEntry>& plan) {
  std::map<int, std::int64_t> counts;
  for (const auto& e : plan) {
    for (const auto& ann : e.annotations) ++counts[ann.class_id];
  }
  return counts;
}

}  // namespace

TEST_CASE("style slugs round-trip and geometry flags are fixed") {
  for (int i = 0; i < beekit::kNumAugStyles; ++i) {
    const auto s = static_cast<AugStyle>(i);
    CHECK(beekit::style_from_slug(beekit::style_slug(s)) == s);
  }
  CHECK(beekit::geometry_affecting(AugStyle::kRandomErase));
  CHECK(beekit::geometry_affecting(AugStyle::kTranslate));
  CHECK_FALSE(beekit::geometry_affecting(AugStyle::kGaussianBlur));
  CHECK_FALSE(beekit::geometry_affecting(AugStyle::kFogOverlay));
  CHECK_THROWS_AS(beekit::style_from_slug("sharpen"),
                  beekit::ValidationError);
}

TEST_CASE("style parameters are deterministic and in range") {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    const auto a = beekit::style_parameters(AugStyle::kTranslate, seed);
    const auto b = beekit::style_parameters(AugStyle::kTranslate, seed);
    CHECK(a.values == b.values);
    CHECK(a.get("dx") >= -0.1);
    CHECK(a.get("dx") <= 0.1);
    CHECK(a.get("dy") >= -0.1);
    CHECK(a.get("dy") <= 0.1);

    const auto e = beekit::style_parameters(AugStyle::kRandomErase, seed);
    CHECK(e.get("w") >= 0.10);
    CHECK(e.get("w") <= 0.25);
    CHECK(e.get("h") >= 0.10);
    CHECK(e.get("h") <= 0.25);
    CHECK(e.get("x") >= 0.0);
    CHECK(e.get("x") + e.get("w") <= 1.0);
    CHECK(e.get("y") >= 0.0);
    CHECK(e.get("y") + e.get("h") <= 1.0);
  }
  CHECK_THROWS_AS(
      beekit::style_parameters(AugStyle::kGaussianBlur, 1).get("dx"),
      beekit::ValidationError);
}

TEST_CASE("entry seeds differ across coordinates") {
  std::set<std::uint64_t> seen;
  for (int k = 0; k < 4; ++k) {
    for (int d = 0; d <= 10; ++d) {
      seen.insert(beekit::entry_seed(42, "img_0001", k, d));
      seen.insert(beekit::entry_seed(42, "img_0002", k, d));
      seen.insert(beekit::entry_seed(43, "img_0001", k, d));
    }
  }
  CHECK(seen.size() == 4 * 11 * 3);
  CHECK(beekit::entry_seed(42, "x", 1, 2) == beekit::entry_seed(42, "x", 1, 2));
}

TEST_CASE("apply_translate clips and drops") {
  const ImageDims dims{640, 640};
  const std::vector<Annotation> edge{{0, BoundingBox{630, 0, 640, 10}}};

  // Shifted fully off-frame: clipped area 0, dropped.
  CHECK(beekit::apply_translate(edge, dims, 10.0, 0.0, 0.3).empty());

  // Partial clip above the threshold keeps the clipped box.
  const std::vector<Annotation> inner{{2, BoundingBox{0, 0, 10, 10}}};
  const auto kept = beekit::apply_translate(inner, dims, -2.0, 0.0, 0.3);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].class_id == 2);
  CHECK(kept[0].box == BoundingBox{0, 0, 8, 10});

  // Clip below the threshold drops.
  CHECK(beekit::apply_translate(inner, dims, -8.0, 0.0, 0.3).empty());
  // Exactly at the threshold keeps.
  const auto at = beekit::apply_translate(inner, dims, -7.0, 0.0, 0.3);
  CHECK(at.size() == 1);
}

TEST_CASE("apply_erase drops by remaining-area fraction, keeps coordinates") {
  const std::vector<Annotation> anns{{1, BoundingBox{0, 0, 10, 10}}};

  const auto kept =
      beekit::apply_erase(anns, BoundingBox{0, 0, 10, 5}, 0.3);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].box == BoundingBox{0, 0, 10, 10});

  CHECK(beekit::apply_erase(anns, BoundingBox{0, 0, 10, 8}, 0.3).empty());
  CHECK(beekit::apply_erase(anns, BoundingBox{20, 20, 30, 30}, 0.3).size() ==
        1);
}

TEST_CASE("transform_annotations leaves boxes alone for non-geometric styles") {
  const std::vector<Annotation> anns{{0, BoundingBox{10, 20, 30, 60}},
                                     {3, BoundingBox{50, 50, 90, 80}}};
  for (int k = 0; k < 4; ++k) {
    AugPlanEntry plain;
    plain.quarter_turns = k;
    plain.style = std::nullopt;
    plain.output_dims = k % 2 == 1 ? ImageDims{200, 100} : ImageDims{100, 200};

    AugPlanEntry blurred = plain;
    blurred.style = AugStyle::kGaussianBlur;
    blurred.seed = 777;

    const auto a = beekit::transform_annotations(anns, plain);
    const auto b = beekit::transform_annotations(anns, blurred);
    REQUIRE(a.size() == anns.size());
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].box == b[i].box);
      CHECK(a[i].class_id == b[i].class_id);
    }
  }
}

TEST_CASE("180 degree rotation fixes a center-symmetric box") {
  AugPlanEntry entry;
  entry.quarter_turns = 2;
  entry.output_dims = ImageDims{100, 200};
  const std::vector<Annotation> anns{{0, BoundingBox{40, 90, 60, 110}}};
  const auto out = beekit::transform_annotations(anns, entry);
  REQUIRE(out.size() == 1);
  CHECK(out[0].box.x_min == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(out[0].box.y_min == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(out[0].box.x_max == doctest::Approx(60.0).epsilon(1e-12));
  CHECK(out[0].box.y_max == doctest::Approx(110.0).epsilon(1e-12));
}

TEST_CASE("one source image yields 44 entries, 4 of them unstyled") {
  std::vector<beekit::LabeledImage> train(1);
  train[0].image_id = "solo";
  train[0].dims = ImageDims{640, 480};
  train[0].annotations = {{0, BoundingBox{100, 100, 300, 250}}};

  const auto plan = beekit::plan_expansion(train, 7);
  CHECK(plan.size() == 44);
  int unstyled = 0;
  for (const auto& e : plan) unstyled += !e.style.has_value();
  CHECK(unstyled == 4);

  const std::regex id_form(
      "solo_r(0|90|180|270)_a([a-z]+(-[a-z]+)*|orig)");
  for (const auto& e : plan) {
    CHECK(std::regex_match(e.output_id, id_form));
  }
  CHECK(std::is_sorted(plan.begin(), plan.end(),
                       [](const AugPlanEntry& a, const AugPlanEntry& b) {
                         return a.output_id < b.output_id;
                       }));
}

TEST_CASE("each rotation of each source draws all ten styles") {
  const auto ds = testsupport::make_random_dataset(5, 6, 0, 0);
  const auto plan = beekit::plan_expansion(ds.train, 99);
  std::map<std::pair<std::string, int>, std::set<AugStyle>> styles;
  for (const auto& e : plan) {
    if (e.style) styles[{e.source_id, e.quarter_turns}].insert(*e.style);
  }
  CHECK(styles.size() == 6 * 4);
  for (const auto& [key, set] : styles) {
    CHECK(set.size() == beekit::kNumAugStyles);
  }
}

TEST_CASE("style assignment is close to uniform across sources") {
  const std::uint64_t master = 2718;
  const auto ds = testsupport::make_random_dataset(6, 40, 0, 0);
  const auto plan = beekit::plan_expansion(ds.train, master);
  // The style drawn for derivative slot 1 of each (source, rotation) should
  // be uniform over the ten styles. 160 draws, 16 expected per style.
  std::map<AugStyle, int> slot_counts;
  for (const auto& e : plan) {
    if (!e.style) continue;
    if (e.seed == beekit::entry_seed(master, e.source_id, e.quarter_turns, 1)) {
      ++slot_counts[*e.style];
    }
  }
  int total = 0;
  for (const auto& [style, n] : slot_counts) {
    CHECK(n < 48);
    total += n;
  }
  CHECK(total == 40 * 4);
  CHECK(slot_counts.size() == beekit::kNumAugStyles);
}

TEST_CASE("plans are deterministic in the master seed") {
  const auto ds = testsupport::make_random_dataset(8, 10, 0, 0);
  const auto a = beekit::plan_expansion(ds.train, 31337);
  const auto b = beekit::plan_expansion(ds.train, 31337);
  CHECK(beekit::serialize_plan(a) == beekit::serialize_plan(b));
  const auto c = beekit::plan_expansion(ds.train, 31338);
  CHECK(beekit::serialize_plan(a) != beekit::serialize_plan(c));
}

TEST_CASE("every planned box lies inside the output dims") {
  const auto ds = testsupport::make_random_dataset(13, 25, 0, 0);
  const auto plan = beekit::plan_expansion(ds.train, 4);
  CHECK(plan.size() == 25 * 44);
  for (const auto& e : plan) {
    for (const auto& ann : e.annotations) {
      CHECK(ann.box.inside(e.output_dims));
      CHECK(ann.box.area() > 0.0);
    }
  }
}

TEST_CASE("unstyled zero-rotation entries reproduce the source annotations") {
  const auto ds = testsupport::make_random_dataset(21, 15, 0, 0);
  const auto plan = beekit::plan_expansion(ds.train, 55);
  std::map<std::string, const AugPlanEntry*> originals;
  for (const auto& e : plan) {
    if (!e.style && e.quarter_turns == 0) originals[e.source_id] = &e;
  }
  REQUIRE(originals.size() == ds.train.size());
  for (const auto& img : ds.train) {
    const auto* e = originals.at(img.image_id);
    REQUIRE(e->annotations.size() == img.annotations.size());
    for (std::size_t i = 0; i < img.annotations.size(); ++i) {
      CHECK(e->annotations[i].class_id == img.annotations[i].class_id);
      CHECK(e->annotations[i].box == img.annotations[i].box);
    }
  }
}

TEST_CASE("reference corpus expands to the published tallies") {
  const auto ds = testsupport::make_reference_dataset();

  const auto bees = beekit::remap(
      ds, beekit::DatasetVariant(beekit::VariantKind::kBeesAndMites));
  const auto bees_plan = beekit::plan_split_expansion(bees, Split::kTrain, 1);
  CHECK(bees_plan.size() == 24684);
  const auto bees_counts = plan_class_counts(bees_plan);
  CHECK(bees_counts.at(0) == 50512);
  CHECK(bees_counts.at(1) == 11000);

  const auto health = beekit::remap(
      ds, beekit::DatasetVariant(beekit::VariantKind::kHealthyAndIll));
  const auto health_counts =
      plan_class_counts(beekit::plan_split_expansion(health, Split::kTrain, 1));
  CHECK(health_counts.at(0) == 42064);
  CHECK(health_counts.at(1) == 8448);

  const auto mites = beekit::remap(
      ds, beekit::DatasetVariant(beekit::VariantKind::kMitesOnly));
  const auto mites_counts =
      plan_class_counts(beekit::plan_split_expansion(mites, Split::kTrain, 1));
  CHECK(mites_counts.at(0) == 11000);
}

TEST_CASE("only the train split may be expanded") {
  const auto ds = testsupport::make_random_dataset(3, 4, 4, 4);
  CHECK_THROWS_AS(beekit::plan_split_expansion(ds, Split::kVal, 1),
                  beekit::ValidationError);
  CHECK_THROWS_AS(beekit::plan_split_expansion(ds, Split::kTest, 1),
                  beekit::ValidationError);
  CHECK(beekit::plan_split_expansion(ds, Split::kTrain, 1).size() == 4 * 44);
}

TEST_CASE("serialized plan rows have the documented eight columns") {
  const auto ds = testsupport::make_random_dataset(17, 2, 0, 0);
  const auto plan = beekit::plan_expansion(ds.train, 12);
  const std::string text = beekit::serialize_plan(plan);
  std::istringstream in(text);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::size_t tabs = 0;
    for (const char c : line) tabs += c == '\t';
    CHECK(tabs == 7);
    CHECK(line.find("annotations/") != std::string::npos);
  }
  CHECK(rows == plan.size());
}

TEST_CASE("save_plan writes parseable annotation files") {
  const auto dir =
      fs::temp_directory_path() / "beekit_augment_save";
  fs::remove_all(dir);
  const auto ds = testsupport::make_random_dataset(29, 3, 0, 0);
  const auto plan = beekit::plan_expansion(ds.train, 8);
  beekit::save_plan(plan, dir);

  CHECK(fs::exists(dir / "plan.tsv"));
  for (const auto& e : plan) {
    const fs::path p = dir / "annotations" / (e.output_id + ".txt");
    REQUIRE(fs::exists(p));
    std::ifstream f(p, std::ios::binary);
    const std::string text((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
    CHECK(text == beekit::serialize_annotations(e.annotations, e.output_dims));
    const auto parsed = beekit::parse_annotation_file(text, e.output_dims);
    CHECK(parsed.size() == e.annotations.size());
  }
  fs::remove_all(dir);
}
