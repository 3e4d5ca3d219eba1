#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "scs/cluster.hpp"
#include "scs/detector.hpp"
#include "scs/fusion.hpp"
#include "scs/viewpoint.hpp"

namespace scs {

inline constexpr std::string_view kDatasetFormat = "scs-dataset";
inline constexpr std::string_view kDatasetVersion = "1.0";

struct CommSettings {
  double link_gbps = 1.0;
  // 0 means width * height * 3 of the configured camera.
  std::uint64_t image_bytes = 0;
  std::uint64_t message_bytes = kSelectionMessageBytes;
  double budget_ms = kDefaultReactionBudgetMs;
  double reaction_distance_km = 0.5;
  double closing_speed_km_s = 7.8;

  bool operator==(const CommSettings&) const = default;
};

// Everything a config file can set.
struct PipelineConfig {
  DatasetConfig dataset;
  DetectorModel detector;
  FusionConfig fusion;
  CommSettings comm;

  std::uint64_t image_bytes() const;

  bool operator==(const PipelineConfig&) const = default;
};

// Missing keys keep their defaults; unknown keys and wrong types are
// ValidationErrors naming the key.
PipelineConfig parse_config(std::string_view json_text);
PipelineConfig load_config(const std::filesystem::path& path);
// Canonical form: every key, fixed order.
std::string config_to_json(const PipelineConfig& cfg, int indent = 2);
// FNV-1a of the compact canonical form, 16 hex digits.
std::string config_digest(const PipelineConfig& cfg);

DetectorModel parse_detector_model(std::string_view json_text);
DetectorModel load_detector_model(const std::filesystem::path& path);

struct ImageRecord {
  std::string image_id;
  ClusterId cluster_id = 0;
  RadiusClass radius_class = RadiusClass::Close;
  int viewpoint_index = 1;
  std::string labels_path;  // relative to the dataset root
  std::string meta_path;
  std::string image_path;   // empty unless stub images were written

  bool operator==(const ImageRecord&) const = default;
};

struct DatasetManifest {
  std::string version{kDatasetVersion};
  std::uint64_t master_seed = 0;
  std::string config_digest;
  std::vector<ImageRecord> images;
  std::vector<SelectionResult> selections;
};

struct ExportOptions {
  // Solid-black binary PGM placeholders next to each label file.
  bool stub_images = false;
};

// Layout: <dir>/<class>/c<cluster_id>/v<j>.labels.txt, v<j>.meta.json and
// <dir>/manifest.json, written last. A previous dataset in dir is replaced.
// cfg.dataset must equal dataset.config.
DatasetManifest export_dataset(const Dataset& dataset, const PipelineConfig& cfg,
                               const std::filesystem::path& dir, const ExportOptions& options = {});
DatasetManifest export_dataset(const Dataset& dataset, const std::filesystem::path& dir,
                               const ExportOptions& options = {});

struct ImportedDataset {
  Dataset dataset;
  PipelineConfig config;
  DatasetManifest manifest;
};

// Rebuilds the dataset from the manifest's cluster geometry, re-renders every
// view and checks it against the label and meta files. Any inconsistency is a
// ValidationError naming the file and field.
ImportedDataset import_dataset(const std::filesystem::path& dir);

std::string labels_text(const Observation& obs);
// Pretty-printed meta.json document for one image.
std::string meta_json(const Scene& scene, const Observation& obs);

struct MapPoint {
  ClusterId cluster_id = 0;
  double lat_deg = 0.0;
  double lon_deg = 0.0;
  // Largest central angle between any two members of the cluster.
  double spread_deg = 0.0;
};

std::vector<MapPoint> export_map_points(const Dataset& dataset);
// Header `cluster_id,lat_deg,lon_deg,spread_deg`.
std::string map_points_csv(std::span<const MapPoint> points);

// selection.json written by the `select` command.
std::string selection_json(const Dataset& dataset, const std::string& digest);

// Writes through a temporary file and renames, so readers never see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace scs
