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

#include "beekit/report.hpp"

#include <algorithm>
#include <array>
#include <string>

#include <nlohmann/json.hpp>

#include "beekit/errors.hpp"
#include "beekit/format.hpp"

namespace beekit {

namespace {

std::string cell(double value) {
  return format_fixed(round_half_up(value, 3), 3);
}

void require_complete(const EvalReport& report, const RunConfig& config) {
  const std::size_t expected =
      static_cast<std::size_t>(config.variant.num_classes());
  if (report.classes.size() != expected) {
    throw ValidationError("report covers " +
                          std::to_string(report.classes.size()) +
                          " classes, variant has " + std::to_string(expected));
  }
}

}  // namespace

std::string_view ap_method_name(ApMethod method) {
  switch (method) {
    case ApMethod::kAllPoints:
      return "all-points";
    case ApMethod::kElevenPoint:
      return "11-point";
  }
  throw ConfigError("unknown ap method");
}

ApMethod ap_method_from_name(std::string_view name) {
  if (name == "all-points") return ApMethod::kAllPoints;
  if (name == "11-point") return ApMethod::kElevenPoint;
  throw ConfigError("unknown ap method: " + std::string(name));
}

void RunConfig::validate() const {
  if (confidence_threshold < 0.0 || confidence_threshold > 1.0) {
    throw ConfigError("confidence threshold must lie in [0, 1]");
  }
  if (nms_iou_threshold < 0.0 || nms_iou_threshold > 1.0) {
    throw ConfigError("nms iou threshold must lie in [0, 1]");
  }
}

std::string render_table(const EvalReport& report, const RunConfig& config) {
  config.validate();
  require_complete(report, config);

  std::vector<std::array<std::string, 6>> rows;
  rows.push_back({"class", "mAP[0.5]", "mAP[0.5:0.95]", "F1", "precision",
                  "recall"});
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    const ClassEval& c = report.classes[i];
    rows.push_back({config.variant.class_name(static_cast<int>(i)),
                    cell(c.ap50), cell(c.ap_range), cell(c.f1),
                    cell(c.precision), cell(c.recall)});
  }
  if (report.classes.size() > 1) {
    const MacroEval& m = report.macro;
    rows.push_back({"average", cell(m.map50), cell(m.map_range), cell(m.f1),
                    cell(m.precision), cell(m.recall)});
  }

  std::array<std::size_t, 6> widths{};
  for (const auto& row : rows) {
    for (std::size_t col = 0; col < row.size(); ++col) {
      widths[col] = std::max(widths[col], row[col].size());
    }
  }

  std::string out = "variant: ";
  out += config.variant.name();
  if (!config.architecture.empty()) {
    out += "  architecture: ";
    out += config.architecture;
  }
  out += "  conf: ";
  out += format_fixed(config.confidence_threshold, 2);
  out += "  nms-iou: ";
  out += format_fixed(config.nms_iou_threshold, 2);
  out += "  ap: ";
  out += ap_method_name(config.ap_method);
  out += '\n';

  for (const auto& row : rows) {
    for (std::size_t col = 0; col < row.size(); ++col) {
      out += row[col];
      if (col + 1 < row.size()) {
        out.append(widths[col] - row[col].size() + 2, ' ');
      }
    }
    out += '\n';
  }
  return out;
}

std::string run_record(const EvalReport& report, const RunConfig& config) {
  config.validate();
  require_complete(report, config);

  nlohmann::json record;
  record["config"] = {
      {"variant", std::string(config.variant.name())},
      {"architecture", config.architecture},
      {"confidence_threshold", config.confidence_threshold},
      {"nms_iou_threshold", config.nms_iou_threshold},
      {"ap_method", std::string(ap_method_name(config.ap_method))},
      {"dataset", config.dataset_path},
      {"detections", config.detections_path},
  };

  nlohmann::json classes = nlohmann::json::array();
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    const ClassEval& c = report.classes[i];
    classes.push_back({
        {"name", config.variant.class_name(static_cast<int>(i))},
        {"gt", c.gt_count},
        {"tp", c.counts.tp},
        {"fp", c.counts.fp},
        {"fn", c.counts.fn},
        {"precision", c.precision},
        {"recall", c.recall},
        {"f1", c.f1},
        {"ap50", c.ap50},
        {"ap_range", c.ap_range},
    });
  }
  record["classes"] = classes;

  if (report.classes.size() > 1) {
    record["average"] = {
        {"precision", report.macro.precision}, {"recall", report.macro.recall},
        {"f1", report.macro.f1},               {"map50", report.macro.map50},
        {"map_range", report.macro.map_range},
    };
  }
  return record.dump(2) + "\n";
}

InfestationSummary infestation(const std::vector<Detection>& detections,
                               const DatasetVariant& variant) {
  if (variant.kind() == VariantKind::kAllClasses) {
    throw ValidationError(
        "infestation summary requires a reduced dataset variant");
  }
  InfestationSummary summary;
  summary.variant = variant;
  summary.class_counts.assign(
      static_cast<std::size_t>(variant.num_classes()), 0);
  for (const auto& d : detections) {
    if (d.class_id < 0 ||
        d.class_id >= static_cast<int>(summary.class_counts.size())) {
      throw ValidationError("detection class id out of range for variant: " +
                            std::to_string(d.class_id));
    }
    ++summary.class_counts[static_cast<std::size_t>(d.class_id)];
  }

  switch (variant.kind()) {
    case VariantKind::kHealthyAndIll: {
      const std::int64_t total =
          summary.class_counts[0] + summary.class_counts[1];
      if (total > 0) {
        summary.ratio = static_cast<double>(summary.class_counts[1]) /
                        static_cast<double>(total);
      }
      break;
    }
    case VariantKind::kBeesAndMites: {
      if (summary.class_counts[0] > 0) {
        summary.ratio = static_cast<double>(summary.class_counts[1]) /
                        static_cast<double>(summary.class_counts[0]);
      }
      break;
    }
    case VariantKind::kMitesOnly:
      break;
    case VariantKind::kAllClasses:
      break;
  }
  return summary;
}

std::string render_infestation(const InfestationSummary& summary) {
  const auto& names = summary.variant.class_names();
  if (summary.class_counts.size() != names.size()) {
    throw ValidationError("summary counts do not match the variant classes");
  }
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    out += names[i];
    out += ": ";
    out += std::to_string(summary.class_counts[i]);
    out += '\n';
  }
  const auto ratio_text = [&] {
    return summary.ratio.has_value()
               ? format_fixed(round_half_up(*summary.ratio, 4), 4)
               : std::string("n/a");
  };
  switch (summary.variant.kind()) {
    case VariantKind::kHealthyAndIll:
      out += "infected share: " + ratio_text() + '\n';
      break;
    case VariantKind::kBeesAndMites:
      out += "mites per bee: " + ratio_text() + '\n';
      break;
    default:
      break;
  }
  return out;
}

}  // namespace beekit
