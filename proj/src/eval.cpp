#include "scs/eval.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <numeric>

#include "json.hpp"

#include "scs/cluster.hpp"
#include "scs/error.hpp"

namespace scs {

std::size_t MatchResult::tp_count() const {
  return static_cast<std::size_t>(std::count(true_positive.begin(), true_positive.end(), true));
}

void MatchResult::append(const MatchResult& other) {
  true_positive.insert(true_positive.end(), other.true_positive.begin(), other.true_positive.end());
  confidence.insert(confidence.end(), other.confidence.begin(), other.confidence.end());
  gt_matched.insert(gt_matched.end(), other.gt_matched.begin(), other.gt_matched.end());
}

namespace {

std::vector<std::size_t> by_descending_confidence(std::span<const double> conf) {
  std::vector<std::size_t> order(conf.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return conf[a] > conf[b]; });
  return order;
}

}  // namespace

MatchResult match_greedy(std::span<const Box> gt, std::span<const DetectionBox> det,
                         double iou_threshold) {
  MatchResult m;
  m.true_positive.assign(det.size(), false);
  m.gt_matched.assign(gt.size(), false);
  m.confidence.reserve(det.size());
  for (const auto& d : det) m.confidence.push_back(d.confidence);

  for (std::size_t i : by_descending_confidence(m.confidence)) {
    const Box db = det[i].geometry();
    double best = -1.0;
    std::size_t best_gt = gt.size();
    for (std::size_t g = 0; g < gt.size(); ++g) {
      if (m.gt_matched[g]) continue;
      const double v = iou(db, gt[g]);
      if (v >= iou_threshold && v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt < gt.size()) {
      m.gt_matched[best_gt] = true;
      m.true_positive[i] = true;
    }
  }
  return m;
}

std::optional<double> average_precision(const MatchResult& matches, std::size_t gt_count) {
  const std::size_t n = matches.true_positive.size();
  if (gt_count == 0) return n == 0 ? std::nullopt : std::optional<double>(0.0);
  if (n == 0) return 0.0;

  const auto order = by_descending_confidence(matches.confidence);
  std::vector<double> recall(n), precision(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (matches.true_positive[order[i]]) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Envelope: best precision at this recall or any higher one.
  for (std::size_t i = n - 1; i-- > 0;) precision[i] = std::max(precision[i], precision[i + 1]);

  double sum = 0.0;
  for (int r = 0; r < kRecallPoints; ++r) {
    const double level = static_cast<double>(r) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), level);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallPoints;
}

std::optional<double> average_precision(const MatchResult& matches) {
  return average_precision(matches, matches.gt_count());
}

std::array<double, 10> coco_iou_thresholds() {
  std::array<double, 10> t{};
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.5 + 0.05 * static_cast<double>(i);
  return t;
}

CellScore score_images(std::span<const Observation* const> images,
                       std::span<const DetectionSet* const> detections) {
  CellScore cell;
  cell.images = images.size();
  const auto thresholds = coco_iou_thresholds();
  std::array<MatchResult, 10> pooled;
  for (std::size_t i = 0; i < images.size(); ++i) {
    std::vector<Box> gt;
    for (const auto& e : images[i]->entries) gt.push_back(e.box.geometry());
    cell.gt_boxes += gt.size();
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      pooled[t].append(match_greedy(gt, detections[i]->boxes, thresholds[t]));
    }
  }
  const auto ap50 = average_precision(pooled[0]);
  if (!ap50) return cell;
  double sum = 0.0;
  for (const auto& m : pooled) sum += *average_precision(m);
  cell.map50 = ap50;
  cell.map50_95 = sum / static_cast<double>(pooled.size());
  return cell;
}

EvalReport evaluate(std::span<const Partition> partitions, std::span<const DetectionSet> detections) {
  std::map<std::string, const DetectionSet*, std::less<>> by_id;
  for (const auto& d : detections) by_id[d.image_id] = &d;

  std::vector<std::string> missing;
  for (const auto& part : partitions) {
    for (const auto* obs : part.images) {
      if (!by_id.contains(obs->image_id)) missing.push_back(obs->image_id);
    }
  }
  if (!missing.empty()) {
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::string msg = "missing detection sets for " + std::to_string(missing.size()) + " image(s):";
    for (const auto& id : missing) msg += " " + id;
    throw ValidationError(msg);
  }

  EvalReport report;
  for (const auto& part : partitions) {
    EvalRow row;
    row.label = part.label;
    for (auto cls : kRadiusClasses) {
      std::vector<const Observation*> imgs;
      std::vector<const DetectionSet*> dets;
      for (const auto* obs : part.images) {
        if (obs->radius_class != cls) continue;
        imgs.push_back(obs);
        dets.push_back(by_id.find(obs->image_id)->second);
      }
      row.cells[static_cast<std::size_t>(cls)] = score_images(imgs, dets);
    }

    CellScore overall;
    double w50 = 0.0, w5095 = 0.0, weight = 0.0;
    for (std::size_t c = 0; c < kRadiusClasses.size(); ++c) {
      const auto& cell = row.cells[c];
      overall.images += cell.images;
      overall.gt_boxes += cell.gt_boxes;
      if (!cell.map50) continue;
      const auto n = static_cast<double>(cell.images);
      w50 += n * *cell.map50;
      w5095 += n * *cell.map50_95;
      weight += n;
    }
    if (weight > 0.0) {
      overall.map50 = w50 / weight;
      overall.map50_95 = w5095 / weight;
    }
    row.cells[kReportColumns - 1] = overall;
    report.rows.push_back(std::move(row));
  }
  return report;
}

EvalReport evaluate(const Dataset& dataset, std::span<const DetectionSet> detections) {
  const auto parts = standard_partitions(dataset);
  return evaluate(parts, detections);
}

const EvalRow& EvalReport::row(std::string_view label) const {
  for (const auto& r : rows) {
    if (r.label == label) return r;
  }
  throw Error("eval report has no row " + std::string(label));
}

namespace {

constexpr std::array<const char*, kReportColumns> kColumnNames = {"Close", "Mid", "Far", "Overall"};

std::string cell_text(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", *v);
  return buf;
}

}  // namespace

std::string format_report_table(const EvalReport& report) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-10s", "Viewpoint");
  out += buf;
  for (const char* name : kColumnNames) {
    std::snprintf(buf, sizeof(buf), " | %-17s", name);
    out += buf;
  }
  out += "\n";
  std::snprintf(buf, sizeof(buf), "%-10s", "");
  out += buf;
  for (std::size_t c = 0; c < kReportColumns; ++c) {
    std::snprintf(buf, sizeof(buf), " | %-8s %-8s", "mAP50", "mAP50:95");
    out += buf;
  }
  out += "\n";
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%-10s", row.label.c_str());
    out += buf;
    for (const auto& cell : row.cells) {
      std::snprintf(buf, sizeof(buf), " | %-8s %-8s", cell_text(cell.map50).c_str(),
                    cell_text(cell.map50_95).c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string report_to_json(const EvalReport& report) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["model_tag"] = report.model_tag;
  j["config_digest"] = report.config_digest;
  j["ap_interpolation"] = "101-point";
  j["iou_thresholds"] = coco_iou_thresholds();
  ordered_json rows = ordered_json::array();
  for (const auto& row : report.rows) {
    ordered_json r;
    r["viewpoint"] = row.label;
    for (std::size_t c = 0; c < kReportColumns; ++c) {
      const auto& cell = row.cells[c];
      ordered_json jc;
      jc["mAP50"] = cell.map50 ? ordered_json(*cell.map50) : ordered_json(nullptr);
      jc["mAP50_95"] = cell.map50_95 ? ordered_json(*cell.map50_95) : ordered_json(nullptr);
      jc["images"] = cell.images;
      jc["gt_boxes"] = cell.gt_boxes;
      std::string key = kColumnNames[c];
      std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
      r[key] = jc;
    }
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace scs
