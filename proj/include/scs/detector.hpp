#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scs/box.hpp"
#include "scs/camera.hpp"
#include "scs/rng.hpp"

namespace scs {

struct Dataset;

struct DetectionBox {
  int class_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  double confidence = 0.0;

  Box geometry() const { return {cx, cy, w, h}; }

  bool operator==(const DetectionBox&) const = default;
};

enum class DetectionSource { Synthetic, Ingested };

struct DetectionSet {
  std::string image_id;
  std::vector<DetectionBox> boxes;
  DetectionSource source = DetectionSource::Synthetic;
  std::string model_tag;

  bool operator==(const DetectionSet&) const = default;
};

// Parametric stand-in for a trained detector. Detectability is a logistic
// function of the ground-truth box's apparent area in pixels, so the 1/d^2
// falloff comes in through the camera model.
struct DetectorModel {
  double p_max = 0.95;
  double area_half_px2 = 30.0;
  // Logistic scale in px^2; 0 turns the curve into a step at area_half_px2.
  double area_slope = 15.0;
  double center_jitter_frac = 0.10;
  double size_jitter_frac = 0.15;
  double fp_rate_per_image = 0.2;
  double conf_noise_sigma = 0.05;
  std::uint64_t seed = 7;
  std::string tag = "synthetic";

  bool operator==(const DetectorModel&) const = default;
};

// p_max = 1, step at zero area, no jitter/noise/false positives: detections
// reproduce the ground truth exactly.
DetectorModel noiseless_detector_model();

void validate(const DetectorModel& model);

// Logistic term alone, in [0, 1].
double detectability(const DetectorModel& model, double area_px2);
// p_max * detectability.
double detection_probability(const DetectorModel& model, double area_px2);

// Stream keyed by (model.seed, image_id), independent of call order.
DetectionSet synth_detect(const DetectorModel& model, const Observation& obs);
DetectionSet synth_detect(const DetectorModel& model, const Observation& obs, Rng& rng);

std::vector<DetectionSet> synth_detect_all(const DetectorModel& model, const Dataset& dataset);

// `class cx cy w h confidence`, one box per line.
std::string format_detection_line(const DetectionBox& box);
void write_detections(std::ostream& out, const DetectionSet& set);
// Writes <dir>/<image_id>.txt.
void write_detection_file(const std::filesystem::path& dir, const DetectionSet& set);

// Parses one image's detection stream. Blank lines and lines starting with '#'
// are skipped. Throws ParseError with the 1-based line number on malformed
// lines, out-of-range coordinates, or confidence outside [0, 1].
DetectionSet parse_detections(std::istream& in, const std::string& image_id,
                              const std::string& source_name = "<stream>");

struct IngestResult {
  // Sorted by image_id.
  std::vector<DetectionSet> sets;
  // Files whose stem names no image in the dataset.
  std::vector<std::string> unknown_image_ids;
};

// Reads every *.txt in dir. When dataset is given, ids it does not know are
// reported in unknown_image_ids and left out of sets.
IngestResult ingest_detections(const std::filesystem::path& dir, const Dataset* dataset = nullptr);

}  // namespace scs
