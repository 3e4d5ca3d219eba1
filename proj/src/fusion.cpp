#include "scs/fusion.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "scs/cluster.hpp"
#include "scs/error.hpp"

namespace scs {

void validate(const FusionConfig& cfg, int k) {
  if (!(cfg.iou_group_threshold >= 0.0 && cfg.iou_group_threshold <= 1.0)) {
    throw ValidationError("fusion config: iou_group_threshold outside [0, 1]");
  }
  if (cfg.min_votes < 1) throw ValidationError("fusion config: min_votes must be >= 1");
  if (k > 0 && cfg.min_votes > k) throw ValidationError("fusion config: min_votes exceeds cluster size");
}

std::string_view to_string(MergeRule rule) {
  return rule == MergeRule::HighestConfidence ? "highest_confidence" : "confidence_weighted_average";
}

MergeRule parse_merge_rule(std::string_view s) {
  if (s == "highest_confidence") return MergeRule::HighestConfidence;
  if (s == "confidence_weighted_average") return MergeRule::ConfidenceWeightedAverage;
  throw ValidationError("unknown merge_rule '" + std::string(s) + "'");
}

namespace {

struct Member {
  std::size_t view;
  const DetectionBox* box;
};

struct Group {
  std::vector<Member> members;
  std::size_t distinct_views() const { return members.size(); }  // one member per view
};

std::vector<Group> group_boxes(std::span<const DetectionSet> views, double threshold) {
  std::vector<Member> all;
  for (std::size_t v = 0; v < views.size(); ++v) {
    for (const auto& b : views[v].boxes) all.push_back({v, &b});
  }
  std::stable_sort(all.begin(), all.end(), [](const Member& a, const Member& b) {
    return a.box->confidence > b.box->confidence;
  });

  std::vector<bool> used(all.size(), false);
  std::vector<Group> groups;
  for (std::size_t s = 0; s < all.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    Group g;
    g.members.push_back(all[s]);
    const Box seed = all[s].box->geometry();
    for (std::size_t v = 0; v < views.size(); ++v) {
      if (v == all[s].view) continue;
      double best = -1.0;
      std::size_t best_i = all.size();
      for (std::size_t i = s + 1; i < all.size(); ++i) {
        if (used[i] || all[i].view != v) continue;
        const double o = iou(seed, all[i].box->geometry());
        if (o >= threshold && o > best) {
          best = o;
          best_i = i;
        }
      }
      if (best_i < all.size()) {
        used[best_i] = true;
        g.members.push_back(all[best_i]);
      }
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

DetectionBox combine(const Group& g, MergeRule rule) {
  const DetectionBox& seed = *g.members.front().box;
  if (g.members.size() == 1) return seed;

  // Averages are taken as offsets from the seed so identical members merge
  // back to the seed exactly.
  DetectionBox out = seed;
  double conf_sum = 0.0, conf_dev = 0.0;
  for (const auto& m : g.members) {
    conf_sum += m.box->confidence;
    conf_dev += m.box->confidence - seed.confidence;
  }
  out.confidence = seed.confidence + conf_dev / static_cast<double>(g.members.size());
  if (rule == MergeRule::HighestConfidence) return out;

  const bool weighted = conf_sum > 0.0;
  double wsum = 0.0, cx = 0.0, cy = 0.0, w = 0.0, h = 0.0;
  for (const auto& m : g.members) {
    const double wt = weighted ? m.box->confidence : 1.0;
    wsum += wt;
    cx += wt * (m.box->cx - seed.cx);
    cy += wt * (m.box->cy - seed.cy);
    w += wt * (m.box->w - seed.w);
    h += wt * (m.box->h - seed.h);
  }
  out.cx = seed.cx + cx / wsum;
  out.cy = seed.cy + cy / wsum;
  out.w = seed.w + w / wsum;
  out.h = seed.h + h / wsum;
  return out;
}

DetectionSet fuse(std::span<const DetectionSet> views, const FusionConfig& cfg, int min_votes) {
  validate(cfg);
  DetectionSet out;
  if (!views.empty()) {
    out.image_id = views.front().image_id;
    out.source = views.front().source;
    out.model_tag = views.front().model_tag;
  }
  for (const auto& g : group_boxes(views, cfg.iou_group_threshold)) {
    if (static_cast<int>(g.distinct_views()) < min_votes) continue;
    out.boxes.push_back(combine(g, cfg.merge_rule));
  }
  return out;
}

}  // namespace

DetectionSet fuse_merge(std::span<const DetectionSet> views, const FusionConfig& cfg) {
  return fuse(views, cfg, 1);
}

DetectionSet fuse_vote(std::span<const DetectionSet> views, const FusionConfig& cfg) {
  return fuse(views, cfg, cfg.min_votes);
}

std::vector<DetectionSet> fuse_dataset(const Dataset& dataset, std::span<const DetectionSet> detections,
                                       FusionMode mode, const FusionConfig& cfg) {
  validate(cfg, dataset.config.k());
  std::map<std::string, const DetectionSet*, std::less<>> by_id;
  for (const auto& d : detections) by_id[d.image_id] = &d;

  std::vector<DetectionSet> out;
  out.reserve(dataset.scenes.size());
  for (const auto& scene : dataset.scenes) {
    std::vector<DetectionSet> views;
    for (const auto& v : scene.views) {
      const auto it = by_id.find(v.image_id);
      if (it == by_id.end()) throw ValidationError("missing detection set for " + v.image_id);
      views.push_back(*it->second);
    }
    // views[0] is the central image, so the fused set takes its id.
    DetectionSet fused = mode == FusionMode::Merge ? fuse_merge(views, cfg) : fuse_vote(views, cfg);
    fused.model_tag += mode == FusionMode::Merge ? "+merge" : "+vote";
    out.push_back(std::move(fused));
  }
  return out;
}

std::string_view to_string(CommStrategy s) {
  return s == CommStrategy::Selection ? "selection" : "early_fusion";
}

CommCostReport comm_cost(CommStrategy strategy, int k, std::uint64_t image_bytes,
                         std::uint64_t message_bytes, double link_gbps, double budget_ms) {
  if (k < 1 || image_bytes == 0 || message_bytes == 0 || !(link_gbps > 0.0) || !(budget_ms > 0.0)) {
    throw ValidationError("comm_cost: sizes, k, rate and budget must be positive");
  }
  CommCostReport r;
  r.strategy = strategy;
  r.link_gbps = link_gbps;
  r.budget_ms = budget_ms;
  const auto kk = static_cast<std::uint64_t>(k);
  r.bytes_per_cluster = strategy == CommStrategy::Selection ? kk * message_bytes : (kk - 1) * image_bytes;
  r.transfer_ms = static_cast<double>(r.bytes_per_cluster) * 8.0 / (link_gbps * 1e9) * 1e3;
  r.within_budget = r.transfer_ms <= r.budget_ms;
  return r;
}

double reaction_budget_ms(double distance_km, double speed_km_s) {
  if (!(distance_km > 0.0) || !(speed_km_s > 0.0)) {
    throw ValidationError("reaction_budget: distance and speed must be positive");
  }
  return distance_km / speed_km_s * 1e3;
}

}  // namespace scs
