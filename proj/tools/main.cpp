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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "beekit/anchors.hpp"
#include "beekit/augment.hpp"
#include "beekit/dataset.hpp"
#include "beekit/decode.hpp"
#include "beekit/errors.hpp"
#include "beekit/metrics.hpp"
#include "beekit/report.hpp"
#include "beekit/tensor_io.hpp"

namespace {

using beekit::ConfigError;
using beekit::ParseError;
using beekit::ValidationError;

struct CommonOpts {
  std::string data;
  std::string variant;
  std::string split = "test";
  std::string out;
  std::uint64_t seed = 2026;
  double conf = -1.0;
  double nms_iou = 0.45;
  std::string ap_method = "all-points";
  int threads = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("cannot write " + path.string());
}

beekit::DatasetVariant variant_or(const std::string& name,
                                  beekit::VariantKind fallback) {
  if (name.empty()) return beekit::DatasetVariant(fallback);
  return beekit::DatasetVariant::from_name(name);
}

beekit::SplitDataset load_variant_dataset(const CommonOpts& opts) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  auto ds = beekit::load_dataset(opts.data);
  const auto variant =
      variant_or(opts.variant, beekit::VariantKind::kAllClasses);
  if (variant.kind() != beekit::VariantKind::kAllClasses)
    ds = beekit::remap(ds, variant);
  return ds;
}

std::vector<beekit::GroundTruth> flatten_split(const beekit::SplitDataset& ds,
                                               beekit::Split split) {
  std::vector<beekit::GroundTruth> gts;
  for (const auto& img : ds.split(split)) {
    for (const auto& ann : img.annotations) {
      beekit::GroundTruth gt;
      gt.image_id = img.image_id;
      gt.class_id = ann.class_id;
      gt.box = ann.box;
      gts.push_back(std::move(gt));
    }
  }
  return gts;
}

int run_stats(const CommonOpts& opts) {
  const auto ds = load_variant_dataset(opts);
  const auto names = ds.variant.class_names();
  std::int64_t total_images = 0;
  std::int64_t total_objects = 0;
  for (auto split :
       {beekit::Split::kTrain, beekit::Split::kVal, beekit::Split::kTest}) {
    const auto hist = beekit::histogram(ds.split(split));
    std::cout << beekit::split_name(split) << ": " << hist.images
              << " images, " << hist.total() << " objects\n";
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::cout << "  " << names[c] << ": "
                << hist.count(static_cast<int>(c)) << "\n";
    }
    total_images += hist.images;
    total_objects += hist.total();
  }
  std::cout << "total: " << total_images << " images, " << total_objects
            << " objects\n";
  return 0;
}

int run_audit(const CommonOpts& opts, const std::string& expect_path) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  const auto ds = beekit::load_dataset(opts.data);
  std::optional<std::map<beekit::BeeClass, std::int64_t>> expected;
  if (!expect_path.empty()) {
    expected.emplace();
    std::istringstream in(read_file(expect_path));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      std::istringstream row(line);
      std::string name;
      std::int64_t count = 0;
      if (!(row >> name >> count)) {
        throw ParseError(expect_path + " line " + std::to_string(line_no) +
                         ": expected `class_name count`");
      }
      bool known = false;
      for (int id = 0; id < beekit::kNumBeeClasses; ++id) {
        const auto cls = beekit::bee_class_from_file_id(id);
        if (beekit::bee_class_name(cls) == name) {
          (*expected)[cls] = count;
          known = true;
          break;
        }
      }
      if (!known) {
        throw ParseError(expect_path + " line " + std::to_string(line_no) +
                         ": unknown class " + name);
      }
    }
  }
  const auto report =
      beekit::consistency_audit(ds, expected ? &*expected : nullptr);
  std::cout << report.summary();
  return report.all_passed() ? 0 : 1;
}

int run_remap(const CommonOpts& opts) {
  if (opts.variant.empty()) throw ConfigError("--variant is required");
  if (opts.out.empty()) throw ConfigError("--out is required");
  const auto ds = load_variant_dataset(opts);
  beekit::save_dataset(ds, opts.out);
  std::cout << "wrote " << ds.variant.name() << " dataset to " << opts.out
            << "\n";
  return 0;
}

int run_augment(const CommonOpts& opts) {
  if (opts.data.empty()) throw ConfigError("--data is required");
  if (opts.out.empty()) throw ConfigError("--out is required");
  const auto ds = beekit::load_dataset(opts.data);
  const auto plan =
      beekit::plan_split_expansion(ds, beekit::Split::kTrain, opts.seed);
  beekit::save_plan(plan, opts.out);
  std::cout << "planned " << plan.size() << " augmented images from "
            << ds.train.size() << " train images (seed " << opts.seed
            << ")\n";
  return 0;
}

std::vector<beekit::SsdLayerConfig> ssd_layers_for(
    const std::string& family, const std::string& config_path) {
  if (!config_path.empty())
    return beekit::parse_ssd_layer_config(read_file(config_path));
  if (family == "ssd-vgg") return beekit::vgg300_layers();
  if (family == "ssd-mobilenet") return beekit::mobilenet300_layers();
  throw ConfigError("unknown ssd family: " + family);
}

int run_priors(const CommonOpts& opts, const std::string& family,
               const std::string& config_path, int input_size,
               int num_classes, bool mite_fit) {
  if (family == "yolo") {
    auto cfg = beekit::YoloAnchorConfig::defaults();
    if (input_size > 0) cfg.input_size = input_size;
    const auto shapes = beekit::yolo_grid_shapes(cfg, num_classes);
    for (std::size_t i = 0; i < shapes.size(); ++i) {
      const auto& s = shapes[i];
      std::cout << "stride " << cfg.scales[i].stride << ": " << s[0] << "x"
                << s[1] << "x" << s[2] << "x" << s[3] << "\n";
    }
    std::cout << "total predictions: " << beekit::yolo_total_predictions(cfg)
              << "\n";
    return 0;
  }
  const auto layers = ssd_layers_for(family, config_path);
  const int input = input_size > 0 ? input_size : 300;
  const auto priors = beekit::ssd_priors(layers, input);
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    std::cout << "layer " << i << ": fm " << l.feature_map_size << ", "
              << l.boxes_per_cell << " per cell, "
              << l.feature_map_size * l.feature_map_size * l.boxes_per_cell
              << " priors\n";
  }
  std::cout << "total priors: " << priors.size() << "\n";
  if (mite_fit) {
    const auto fits = beekit::mite_anchor_fit(priors, input);
    for (const auto& fit : fits) {
      std::ostringstream row;
      row.setf(std::ios::fixed);
      row.precision(3);
      row << "mite " << fit.mite_px << "px: best iou " << fit.best_iou
          << " at layer " << fit.best_layer;
      std::cout << row.str() << "\n";
    }
  }
  if (!opts.out.empty()) {
    write_file(opts.out, beekit::serialize_ssd_layer_config(layers));
    std::cout << "wrote layer config to " << opts.out << "\n";
  }
  return 0;
}

int run_decode(const CommonOpts& opts, const std::string& family,
               const std::string& config_path, int input_size, int width,
               int height, const std::vector<std::string>& tensor_paths,
               const std::string& locations_path,
               const std::string& scores_path) {
  if (opts.out.empty()) throw ConfigError("--out is required");
  if (width <= 0 || height <= 0)
    throw ConfigError("--width and --height must be positive");
  const beekit::ImageDims dims{width, height};
  std::vector<beekit::Detection> dets;
  if (family == "yolo") {
    if (tensor_paths.size() != 3)
      throw ConfigError("yolo decoding expects --tensors with three files");
    auto params = beekit::DecodeParams::yolo_defaults();
    if (opts.conf >= 0.0) params.confidence_threshold = opts.conf;
    params.nms_iou_threshold = opts.nms_iou;
    auto cfg = beekit::YoloAnchorConfig::defaults();
    if (input_size > 0) cfg.input_size = input_size;
    std::vector<beekit::RawTensor> tensors;
    tensors.reserve(tensor_paths.size());
    for (const auto& path : tensor_paths)
      tensors.push_back(beekit::read_rten(path));
    dets = beekit::decode_yolo(tensors, cfg, params, dims);
  } else {
    if (locations_path.empty() || scores_path.empty())
      throw ConfigError("ssd decoding expects --locations and --scores");
    auto params = beekit::DecodeParams::ssd_defaults();
    if (opts.conf >= 0.0) params.confidence_threshold = opts.conf;
    params.nms_iou_threshold = opts.nms_iou;
    const auto layers = ssd_layers_for(family, config_path);
    const int input = input_size > 0 ? input_size : 300;
    const auto priors = beekit::ssd_priors(layers, input);
    const auto locations = beekit::read_rten(locations_path);
    const auto scores = beekit::read_rten(scores_path);
    dets = beekit::decode_ssd(locations, scores, priors, params, dims);
  }
  beekit::write_detections(dets, opts.out);
  std::cout << dets.size() << " detections -> " << opts.out << "\n";
  return 0;
}

int run_eval(const CommonOpts& opts, const std::string& dets_path,
             const std::string& arch, double match_iou,
             const std::string& record_path, const std::string& pr_csv_dir,
             bool with_infestation) {
  if (opts.variant.empty()) throw ConfigError("--variant is required");
  if (dets_path.empty()) throw ConfigError("--dets is required");
  const auto ds = load_variant_dataset(opts);
  const auto split = beekit::split_from_name(opts.split);
  const auto gts = flatten_split(ds, split);
  const auto dets = beekit::read_detections(dets_path);

  beekit::EvalParams params;
  params.match_iou = match_iou;
  params.ap_method = beekit::ap_method_from_name(opts.ap_method);
  params.threads = opts.threads;
  const auto report =
      beekit::evaluate(dets, gts, ds.variant.num_classes(), params);

  beekit::RunConfig config;
  config.variant = ds.variant;
  config.architecture = arch;
  config.confidence_threshold = opts.conf >= 0.0 ? opts.conf : 0.4;
  config.nms_iou_threshold = opts.nms_iou;
  config.ap_method = params.ap_method;
  config.dataset_path = opts.data;
  config.detections_path = dets_path;
  config.validate();

  std::cout << beekit::render_table(report, config);
  if (with_infestation) {
    std::cout << "\n" << beekit::render_infestation(
        beekit::infestation(dets, ds.variant));
  }
  if (!record_path.empty())
    write_file(record_path, beekit::run_record(report, config));
  if (!pr_csv_dir.empty()) {
    const auto names = ds.variant.class_names();
    for (std::size_t c = 0; c < names.size(); ++c) {
      std::vector<beekit::Detection> class_dets;
      std::vector<beekit::GroundTruth> class_gts;
      for (const auto& d : dets)
        if (d.class_id == static_cast<int>(c)) class_dets.push_back(d);
      for (const auto& g : gts)
        if (g.class_id == static_cast<int>(c)) class_gts.push_back(g);
      const auto points =
          beekit::pr_curve(class_dets, class_gts, match_iou, opts.threads);
      const auto path = std::filesystem::path(pr_csv_dir) /
                        ("pr_" + std::string(names[c]) + ".csv");
      write_file(path, beekit::serialize_pr_curve(points));
    }
  }
  return 0;
}

int run_app(int argc, char** argv) {
  CLI::App app{"honey bee and varroa mite detection pipeline toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts opts;
  app.add_option("--data", opts.data, "dataset index file");
  app.add_option("--variant", opts.variant,
                 "all-classes, bees-mites, healthy-ill or mites-only");
  app.add_option("--split", opts.split, "train, val or test");
  app.add_option("--out", opts.out, "output file or directory");
  app.add_option("--seed", opts.seed, "master seed for planning");
  app.add_option("--conf", opts.conf, "confidence threshold");
  app.add_option("--nms-iou", opts.nms_iou, "NMS IoU threshold");
  app.add_option("--ap-method", opts.ap_method, "all-points or 11-point");
  app.add_option("--threads", opts.threads, "worker threads for evaluation");

  auto* stats = app.add_subcommand(
      "stats", "per-split image and class counts for a variant");

  std::string expect_path;
  auto* audit = app.add_subcommand(
      "audit", "consistency rules over an all-classes dataset");
  audit->add_option("--expect", expect_path,
                    "file of `class_name count` totals to check");

  auto* remap =
      app.add_subcommand("remap", "write a dataset remapped to a variant");

  auto* augment = app.add_subcommand(
      "augment", "plan the deterministic train-split expansion");

  std::string family;
  std::string layer_config;
  int input_size = 0;
  int num_classes = 2;
  bool mite_fit = false;
  auto* priors =
      app.add_subcommand("priors", "anchor and prior-box geometry");
  priors->add_option("--family", family, "yolo, ssd-vgg or ssd-mobilenet")
      ->required();
  priors->add_option("--config", layer_config, "ssd layer config file");
  priors->add_option("--input", input_size, "input resolution");
  priors->add_option("--classes", num_classes, "classes for yolo shapes");
  priors->add_flag("--mite-fit", mite_fit,
                   "report best prior IoU for mite-sized boxes");

  std::vector<std::string> tensor_paths;
  std::string locations_path;
  std::string scores_path;
  int width = 0;
  int height = 0;
  auto* decode = app.add_subcommand(
      "decode", "raw tensors to thresholded, suppressed detections");
  decode->add_option("--family", family, "yolo, ssd-vgg or ssd-mobilenet")
      ->required();
  decode->add_option("--config", layer_config, "ssd layer config file");
  decode->add_option("--input", input_size, "network input resolution");
  decode->add_option("--tensors", tensor_paths, "yolo head tensors")
      ->expected(3);
  decode->add_option("--locations", locations_path, "ssd location tensor");
  decode->add_option("--scores", scores_path, "ssd score tensor");
  decode->add_option("--width", width, "source image width")->required();
  decode->add_option("--height", height, "source image height")->required();

  std::string dets_path;
  std::string arch;
  std::string record_path;
  std::string pr_csv_dir;
  double match_iou = 0.5;
  auto* eval =
      app.add_subcommand("eval", "score detections against a split");
  eval->add_option("--dets", dets_path, "detections file")->required();
  eval->add_option("--arch", arch, "architecture tag for the record");
  eval->add_option("--match-iou", match_iou, "matching IoU threshold");
  eval->add_option("--record", record_path, "write a JSON run record");
  eval->add_option("--pr-csv", pr_csv_dir, "write per-class PR curves here");

  auto* report = app.add_subcommand(
      "report", "eval table plus the variant's infestation summary");
  report->add_option("--dets", dets_path, "detections file")->required();
  report->add_option("--arch", arch, "architecture tag for the record");
  report->add_option("--match-iou", match_iou, "matching IoU threshold");
  report->add_option("--record", record_path, "write a JSON run record");
  report->add_option("--pr-csv", pr_csv_dir,
                     "write per-class PR curves here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (stats->parsed()) return run_stats(opts);
  if (audit->parsed()) return run_audit(opts, expect_path);
  if (remap->parsed()) return run_remap(opts);
  if (augment->parsed()) return run_augment(opts);
  if (priors->parsed())
    return run_priors(opts, family, layer_config, input_size, num_classes,
                      mite_fit);
  if (decode->parsed())
    return run_decode(opts, family, layer_config, input_size, width, height,
                      tensor_paths, locations_path, scores_path);
  if (eval->parsed())
    return run_eval(opts, dets_path, arch, match_iou, record_path,
                    pr_csv_dir, false);
  if (report->parsed())
    return run_eval(opts, dets_path, arch, match_iou, record_path,
                    pr_csv_dir, true);
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_app(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
