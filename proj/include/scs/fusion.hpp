#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scs/detector.hpp"

namespace scs {

struct Dataset;

enum class MergeRule { ConfidenceWeightedAverage, HighestConfidence };

struct FusionConfig {
  double iou_group_threshold = 0.5;
  int min_votes = 2;
  MergeRule merge_rule = MergeRule::ConfidenceWeightedAverage;

  bool operator==(const FusionConfig&) const = default;
};

// Throws ValidationError; k is the number of views being fused (0 skips the
// min_votes <= k check).
void validate(const FusionConfig& cfg, int k = 0);

std::string_view to_string(MergeRule rule);
MergeRule parse_merge_rule(std::string_view s);

// Boxes are compared in each view's own image plane (identity registration).
// Greedy grouping in descending confidence: each ungrouped box seeds a group
// and pulls in at most one ungrouped box per other view with IoU >= threshold
// against the seed. Each group emits one box with the group's mean confidence.
DetectionSet fuse_merge(std::span<const DetectionSet> views, const FusionConfig& cfg);

// As fuse_merge, dropping groups backed by fewer than min_votes distinct views.
DetectionSet fuse_vote(std::span<const DetectionSet> views, const FusionConfig& cfg);

enum class FusionMode { Merge, Vote };

// Fuses every cluster's per-view sets. The fused set is keyed by the central
// satellite's image id, the satellite that gathers the other views.
std::vector<DetectionSet> fuse_dataset(const Dataset& dataset, std::span<const DetectionSet> detections,
                                       FusionMode mode, const FusionConfig& cfg);

enum class CommStrategy { Selection, EarlyFusion };

std::string_view to_string(CommStrategy s);

inline constexpr double kDefaultReactionBudgetMs = 64.1;

struct CommCostReport {
  CommStrategy strategy = CommStrategy::Selection;
  std::uint64_t bytes_per_cluster = 0;
  double link_gbps = 1.0;
  double transfer_ms = 0.0;
  double budget_ms = kDefaultReactionBudgetMs;
  bool within_budget = true;
};

// Selection moves k score messages; early fusion ships (k - 1) full images to
// one satellite. transfer_ms = bytes * 8 / (link_gbps * 1e9) * 1e3.
CommCostReport comm_cost(CommStrategy strategy, int k, std::uint64_t image_bytes,
                         std::uint64_t message_bytes, double link_gbps,
                         double budget_ms = kDefaultReactionBudgetMs);

// Time for an object closing at speed_km_s to cover distance_km, in ms.
double reaction_budget_ms(double distance_km, double speed_km_s);

}  // namespace scs
