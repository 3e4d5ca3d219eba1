#include "scs/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "scs/cluster.hpp"
#include "scs/error.hpp"
#include "scs/text.hpp"

namespace scs {
namespace {

// False-positive boxes: square, side uniform in this range (px).
constexpr double kFpMinSidePx = 2.0;
constexpr double kFpMaxSidePx = 12.0;
constexpr double kFpMinConf = 0.05;
constexpr double kFpMaxConf = 0.55;
// Jittered sizes never shrink below this fraction of the true size.
constexpr double kMinSizeScale = 0.05;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

DetectorModel noiseless_detector_model() {
  DetectorModel m;
  m.p_max = 1.0;
  m.area_half_px2 = 0.0;
  m.area_slope = 0.0;
  m.center_jitter_frac = 0.0;
  m.size_jitter_frac = 0.0;
  m.fp_rate_per_image = 0.0;
  m.conf_noise_sigma = 0.0;
  m.tag = "noiseless";
  return m;
}

void validate(const DetectorModel& m) {
  auto nonneg = [](double v, const char* name) {
    if (!(v >= 0.0)) throw ValidationError(std::string("detector model: ") + name + " must be >= 0");
  };
  nonneg(m.p_max, "p_max");
  if (m.p_max > 1.0) throw ValidationError("detector model: p_max must be <= 1");
  nonneg(m.area_half_px2, "area_half_px2");
  nonneg(m.area_slope, "area_slope");
  nonneg(m.center_jitter_frac, "center_jitter_frac");
  nonneg(m.size_jitter_frac, "size_jitter_frac");
  nonneg(m.fp_rate_per_image, "fp_rate_per_image");
  nonneg(m.conf_noise_sigma, "conf_noise_sigma");
}

double detectability(const DetectorModel& model, double area_px2) {
  if (model.area_slope == 0.0) return area_px2 >= model.area_half_px2 ? 1.0 : 0.0;
  return 1.0 / (1.0 + std::exp(-(area_px2 - model.area_half_px2) / model.area_slope));
}

double detection_probability(const DetectorModel& model, double area_px2) {
  return model.p_max * detectability(model, area_px2);
}

DetectionSet synth_detect(const DetectorModel& model, const Observation& obs) {
  Rng rng(derive_seed(model.seed, obs.image_id));
  return synth_detect(model, obs, rng);
}

DetectionSet synth_detect(const DetectorModel& model, const Observation& obs, Rng& rng) {
  DetectionSet set;
  set.image_id = obs.image_id;
  set.source = DetectionSource::Synthetic;
  set.model_tag = model.tag;

  const double width = obs.pose.width_px;
  const double height = obs.pose.height_px;
  for (const auto& entry : obs.entries) {
    const auto& gt = entry.box;
    const double area = gt.w * width * gt.h * height;
    const double s = detectability(model, area);

    // Fixed draw count per entry, detected or not.
    const double u = rng.uniform();
    const double nx = rng.normal();
    const double ny = rng.normal();
    const double nw = rng.normal();
    const double nh = rng.normal();
    const double nc = rng.normal();
    if (!(u < model.p_max * s)) continue;

    DetectionBox box;
    box.class_id = gt.class_id;
    box.w = std::min(1.0, gt.w * std::max(kMinSizeScale, 1.0 + model.size_jitter_frac * nw));
    box.h = std::min(1.0, gt.h * std::max(kMinSizeScale, 1.0 + model.size_jitter_frac * nh));
    box.cx = clamp01(gt.cx + model.center_jitter_frac * gt.w * nx);
    box.cy = clamp01(gt.cy + model.center_jitter_frac * gt.h * ny);
    box.confidence = clamp01(s + model.conf_noise_sigma * nc);
    set.boxes.push_back(box);
  }

  const int n_fp = rng.poisson(model.fp_rate_per_image);
  for (int i = 0; i < n_fp; ++i) {
    DetectionBox box;
    box.class_id = 0;
    const double side = rng.uniform(kFpMinSidePx, kFpMaxSidePx);
    box.w = side / width;
    box.h = side / height;
    box.cx = rng.uniform();
    box.cy = rng.uniform();
    box.confidence = rng.uniform(kFpMinConf, kFpMaxConf);
    set.boxes.push_back(box);
  }
  return set;
}

std::vector<DetectionSet> synth_detect_all(const DetectorModel& model, const Dataset& dataset) {
  validate(model);
  std::vector<DetectionSet> out;
  out.reserve(dataset.image_count());
  for (const auto& scene : dataset.scenes) {
    for (const auto& view : scene.views) out.push_back(synth_detect(model, view));
  }
  return out;
}

std::string format_detection_line(const DetectionBox& b) {
  return std::to_string(b.class_id) + ' ' + format_number(b.cx) + ' ' + format_number(b.cy) + ' ' +
         format_number(b.w) + ' ' + format_number(b.h) + ' ' + format_number(b.confidence);
}

void write_detections(std::ostream& out, const DetectionSet& set) {
  for (const auto& b : set.boxes) out << format_detection_line(b) << '\n';
}

void write_detection_file(const std::filesystem::path& dir, const DetectionSet& set) {
  const auto path = dir / (set.image_id + ".txt");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_detections(out, set);
  if (!out) throw Error("write failed: " + path.string());
}

DetectionSet parse_detections(std::istream& in, const std::string& image_id,
                              const std::string& source_name) {
  DetectionSet set;
  set.image_id = image_id;
  set.source = DetectionSource::Ingested;
  set.model_tag = "ingested";

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty() || fields.front().front() == '#') continue;
    if (fields.size() != 6) {
      throw ParseError(source_name, line_no,
                       "expected 6 fields `class cx cy w h confidence`, got " +
                           std::to_string(fields.size()));
    }
    DetectionBox box;
    const auto cls = parse_int(fields[0]);
    if (!cls || *cls < 0) throw ParseError(source_name, line_no, "bad class id");
    box.class_id = *cls;
    double* slots[] = {&box.cx, &box.cy, &box.w, &box.h, &box.confidence};
    for (std::size_t i = 0; i < 5; ++i) {
      const auto v = parse_number(fields[i + 1]);
      if (!v) throw ParseError(source_name, line_no, "bad number '" + std::string(fields[i + 1]) + "'");
      *slots[i] = *v;
    }
    if (box.confidence < 0.0 || box.confidence > 1.0) {
      throw ParseError(source_name, line_no, "confidence outside [0, 1]");
    }
    for (double v : {box.cx, box.cy, box.w, box.h}) {
      if (v < 0.0 || v > 1.0) throw ParseError(source_name, line_no, "coordinate outside [0, 1]");
    }
    set.boxes.push_back(box);
  }
  return set;
}

IngestResult ingest_detections(const std::filesystem::path& dir, const Dataset* dataset) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ValidationError("detections directory not found: " + dir.string());

  std::set<std::string> known;
  if (dataset) {
    for (const auto& scene : dataset->scenes) {
      for (const auto& v : scene.views) known.insert(v.image_id);
    }
  }

  std::vector<fs::path> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (item.is_regular_file() && item.path().extension() == ".txt") files.push_back(item.path());
  }
  std::sort(files.begin(), files.end());

  IngestResult result;
  for (const auto& path : files) {
    const std::string id = path.stem().string();
    if (dataset && !known.contains(id)) {
      result.unknown_image_ids.push_back(id);
      continue;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read " + path.string());
    result.sets.push_back(parse_detections(in, id, path.string()));
  }
  return result;
}

}  // namespace scs
