#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scs/box.hpp"
#include "scs/detector.hpp"
#include "scs/viewpoint.hpp"

namespace scs {

// Per-detection outcome at one IoU threshold. Vectors over detections are in
// input order.
struct MatchResult {
  std::vector<bool> true_positive;
  std::vector<double> confidence;
  // Per ground-truth box.
  std::vector<bool> gt_matched;

  std::size_t tp_count() const;
  std::size_t gt_count() const { return gt_matched.size(); }
  // Pools another image's matches after this one's.
  void append(const MatchResult& other);
};

// Detections in descending confidence (stable, so ties keep input order); each
// takes the unmatched ground truth with the highest IoU >= threshold, the
// lowest index winning IoU ties, else counts as a false positive.
MatchResult match_greedy(std::span<const Box> gt, std::span<const DetectionBox> det,
                         double iou_threshold);

inline constexpr int kRecallPoints = 101;

// 101-point interpolated AP. nullopt when there is neither ground truth nor a
// detection; 0 when detections exist without ground truth.
std::optional<double> average_precision(const MatchResult& matches, std::size_t gt_count);
std::optional<double> average_precision(const MatchResult& matches);

// 0.50, 0.55, ..., 0.95
std::array<double, 10> coco_iou_thresholds();

struct CellScore {
  std::optional<double> map50;
  std::optional<double> map50_95;
  std::size_t images = 0;
  std::size_t gt_boxes = 0;
};

// Columns: close, mid, far, overall.
inline constexpr std::size_t kReportColumns = 4;

struct EvalRow {
  std::string label;
  std::array<CellScore, kReportColumns> cells;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::string model_tag;
  std::string config_digest;

  const EvalRow& row(std::string_view label) const;
};

// Scores one pool of images at every COCO threshold.
CellScore score_images(std::span<const Observation* const> images,
                       std::span<const DetectionSet* const> detections);

// One row per partition. Detections pool per (partition, radius class); the
// overall column is the image-weighted mean of the class cells. Throws
// ValidationError listing image ids that have no detection set.
EvalReport evaluate(std::span<const Partition> partitions, std::span<const DetectionSet> detections);

// V1..Vk and Vd.
EvalReport evaluate(const Dataset& dataset, std::span<const DetectionSet> detections);

// Aligned text table: one row per partition, mAP50 and mAP50:95 per column.
std::string format_report_table(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace scs
